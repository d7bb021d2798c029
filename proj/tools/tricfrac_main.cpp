// Command-line front end: model ingestion, one subcommand per pipeline,
// deterministic CSV/JSON emission, and parameter sweeps.
//
// Exit codes: 0 success, 1 validation/configuration error, 2 numerical
// error (pole, singularity, failed convergence checks).

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tricfrac/fixed_point.hpp"
#include "tricfrac/matrix_cf.hpp"
#include "tricfrac/model_io.hpp"
#include "tricfrac/operator_core.hpp"
#include "tricfrac/oracle.hpp"
#include "tricfrac/scalar_cf.hpp"
#include "tricfrac/text_format.hpp"

namespace {

using namespace tricfrac;

struct ModelOptions {
  std::string model_path;
  std::size_t n = 0;
  double alpha = 1.0;
  double beta = 0.0;
  double gamma = 0.0;
  std::string dump_path;
};

void add_model_options(CLI::App* cmd, ModelOptions& mo) {
  cmd->add_option("--model", mo.model_path, "model JSON file");
  cmd->add_option("--n", mo.n, "size of an inline homogeneous model");
  cmd->add_option("--alpha", mo.alpha, "inline constant coupling (default 1)");
  cmd->add_option("--beta", mo.beta, "inline constant diagonal real part");
  cmd->add_option("--gamma", mo.gamma, "inline constant diagonal imaginary part");
  cmd->add_option("--dump-model", mo.dump_path,
                  "write the ingested model back out as JSON");
}

Model resolve_model(const ModelOptions& mo) {
  const bool have_file = !mo.model_path.empty();
  const bool have_inline = mo.n > 0;
  if (have_file == have_inline) {
    throw ValidationError(
        "exactly one model source required: --model FILE or inline --n/--alpha/--beta/--gamma");
  }
  Model model = have_file ? load_model_file(mo.model_path)
                          : homogeneous_model(mo.n, mo.alpha, mo.beta, mo.gamma);
  if (!mo.dump_path.empty()) {
    std::ofstream out(mo.dump_path);
    if (!out) throw ValidationError("cannot write model dump to " + mo.dump_path);
    out << dump_model_json(model) << "\n";
  }
  return model;
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open output file " + path);
  out << content;
}

std::string verdict_name(McfVerdict v) {
  switch (v) {
    case McfVerdict::Converged: return "Converged";
    case McfVerdict::Diverged: return "Diverged";
    case McfVerdict::MaxIterations: return "MaxIterations";
  }
  return "?";
}

std::string reason_name(DivergenceReason r) {
  switch (r) {
    case DivergenceReason::Magnitude: return "magnitude";
    case DivergenceReason::Singular: return "singular";
    case DivergenceReason::None: break;
  }
  return "none";
}

int run_factorize(const ModelOptions& mo, double z_re, double z_im,
                  const std::string& output, const std::string& format) {
  const Model model = resolve_model(mo);
  const Factorization fac = factorize(to_general(model.matrix), Complex(z_re, z_im));
  std::string out;
  if (format == "csv") {
    out = "k,f_diag_re,f_diag_im,u_super_re,u_super_im,l_sub_re,l_sub_im\n";
    for (std::size_t k = 0; k < fac.f_diag.size(); ++k) {
      out += std::to_string(k + 1) + "," + format_double(fac.f_diag[k].real()) + "," +
             format_double(fac.f_diag[k].imag());
      if (k < fac.u_super.size()) {
        out += "," + format_double(fac.u_super[k].real()) + "," +
               format_double(fac.u_super[k].imag()) + "," +
               format_double(fac.l_sub[k].real()) + "," + format_double(fac.l_sub[k].imag());
      } else {
        out += ",,,,";
      }
      out += "\n";
    }
  } else {
    out = "{\"z\":" + format_complex_pair(fac.z);
    out += ",\"u_super\":" + format_complex_array(fac.u_super);
    out += ",\"f_diag\":" + format_complex_array(fac.f_diag);
    out += ",\"l_sub\":" + format_complex_array(fac.l_sub);
    out += "}\n";
  }
  write_output(output, out);
  return 0;
}

int run_greens(const ModelOptions& mo, double z_re, double z_im,
               const std::string& output, const std::string& format) {
  const Model model = resolve_model(mo);
  const Complex z(z_re, z_im);
  const Complex f1 = greens_f1(to_general(model.matrix), z);
  std::string out;
  if (format == "csv") {
    out = "z_re,z_im,f1_re,f1_im\n" + format_double(z.real()) + "," +
          format_double(z.imag()) + "," + format_double(f1.real()) + "," +
          format_double(f1.imag()) + "\n";
  } else {
    out = "{\"z\":" + format_complex_pair(z) + ",\"f1\":" + format_complex_pair(f1) + "}\n";
  }
  write_output(output, out);
  return 0;
}

int run_iterate(double alpha, double beta, double gamma, double sigma, std::size_t steps,
                double tol, const std::string& output, const std::string& format) {
  const IterationTrace trace = mcf_iterate_homogeneous(alpha, beta, gamma, sigma, steps, tol);
  std::string out;
  if (format == "json") {
    out = "{\"rows\":[";
    for (std::size_t i = 0; i < trace.rows.size(); ++i) {
      if (i) out += ",";
      const McfIterationRow& r = trace.rows[i];
      out += "[" + std::to_string(r.step) + "," + format_double(r.u) + "," +
             format_double(r.x) + "," + format_double(r.y) + "]";
    }
    out += "],\"verdict\":\"" + verdict_name(trace.verdict) + "\"";
    out += ",\"steps\":" + std::to_string(trace.steps);
    if (trace.verdict == McfVerdict::Converged) {
      out += ",\"limit\":[" + format_double(trace.limit.u) + "," +
             format_double(trace.limit.x) + "," + format_double(trace.limit.y) + "]";
    }
    if (trace.verdict == McfVerdict::Diverged) {
      out += ",\"reason\":\"" + reason_name(trace.reason) + "\"";
    }
    out += "}\n";
  } else {
    out = "step,u,x,y\n";
    for (const McfIterationRow& r : trace.rows) {
      out += std::to_string(r.step) + "," + format_double(r.u) + "," + format_double(r.x) +
             "," + format_double(r.y) + "\n";
    }
  }
  write_output(output, out);
  return 0;
}

int run_sv_scan(const ModelOptions& mo, double sigma_max, std::size_t grid,
                double refine_tol, bool oracle_check, const std::string& csv_path,
                const std::string& output) {
  const Model model = resolve_model(mo);
  const BlockTridiagonal2 hb = build_block_tridiagonal(model.matrix);

  ScanOptions opt;
  opt.sigma_max = sigma_max;
  opt.grid_points = grid;
  opt.refine_tol = refine_tol;
  std::vector<double> reference;
  if (oracle_check) {
    reference = oracle::svd_values(model.matrix);
    opt.expected_count = reference.size();
  }
  const ScanResult res = singular_values_scan(hb, opt);

  if (!csv_path.empty()) {
    const double smax = sigma_max > 0.0 ? sigma_max : default_sigma_max(hb);
    std::string csv = "sigma,det\n";
    for (std::size_t i = 0; i < grid; ++i) {
      const double s = smax * static_cast<double>(i) / static_cast<double>(grid - 1);
      try {
        const SecularValue v = secular_det(hb, s);
        csv += format_double(s) + "," + format_double(v.value) + "\n";
      } catch (const PoleError&) {
        // sample sits on a persistent pole: omit the row
      }
    }
    write_output(csv_path, csv);
  }

  std::string out = "{\"singular_values\":" + format_double_array(res.singular_values);
  out += ",\"jittered\":" + format_bool_array(res.jittered);
  if (oracle_check) {
    out += ",\"oracle_count\":" + std::to_string(reference.size());
    if (res.count_mismatch) {
      out += ",\"warning\":\"count mismatch: scan found " +
             std::to_string(res.count_mismatch->first) + " roots, dense reference has " +
             std::to_string(res.count_mismatch->second) +
             " (cluster below resolution or grid too coarse)\"";
    }
  }
  out += "}\n";
  write_output(output, out);
  return 0;
}

int run_fixed_point(double sigma, double beta, double gamma, const std::string& output) {
  const FixedPointReport rep = convergence_verdict(sigma, beta, gamma);
  std::string out = "{\"sigma\":" + format_double(rep.sigma);
  out += ",\"beta\":" + format_double(rep.beta);
  out += ",\"gamma\":" + format_double(rep.gamma);
  out += ",\"roots\":" + format_complex_array(rep.roots);
  out += ",\"completed\":[";
  for (std::size_t i = 0; i < rep.completed.size(); ++i) {
    if (i) out += ",";
    const CompletedFixedPoint& c = rep.completed[i];
    out += "{\"u\":" + format_double(c.point.u) + ",\"x\":" + format_double(c.point.x) +
           ",\"y\":" + format_double(c.point.y) + ",\"radius\":" + format_double(c.radius) +
           ",\"stable\":" + (c.stable ? "true" : "false") + "}";
  }
  out += "],\"verdict\":\"" + std::string(to_string(rep.verdict)) + "\"}\n";
  write_output(output, out);
  return 0;
}

int run_oracle_check(const ModelOptions& mo, std::size_t grid, const std::string& output) {
  const Model model = resolve_model(mo);
  const std::vector<double> sv = oracle::svd_values(model.matrix);
  const std::vector<Complex> eig = oracle::eig_complex(to_general(model.matrix));

  ScanOptions opt;
  opt.grid_points = grid;
  opt.expected_count = sv.size();
  const ScanResult scan = singular_values_scan(build_block_tridiagonal(model.matrix), opt);

  const bool counts_match = !scan.count_mismatch.has_value();
  double max_diff = 0.0;
  if (counts_match) {
    for (std::size_t i = 0; i < sv.size(); ++i)
      max_diff = std::max(max_diff, std::abs(sv[i] - scan.singular_values[i]));
  }

  std::string out = "{\"singular_values\":" + format_double_array(sv);
  out += ",\"eigenvalues\":" + format_complex_array(eig);
  out += ",\"scan\":" + format_double_array(scan.singular_values);
  out += ",\"counts_match\":" + std::string(counts_match ? "true" : "false");
  if (counts_match) out += ",\"max_scan_diff\":" + format_double(max_diff);
  out += "}\n";
  write_output(output, out);
  return 0;
}

int run_sweep(double sigma, double beta_min, double beta_max, std::size_t beta_steps,
              double gamma_min, double gamma_max, std::size_t gamma_steps,
              const std::string& output) {
  const auto check_range = [](double lo, double hi, std::size_t steps, const char* name) {
    if (steps == 0) throw ValidationError(std::string(name) + " range is empty");
    if (steps == 1 && lo != hi)
      throw ValidationError(std::string(name) + " range needs at least 2 points");
    if (lo > hi) throw ValidationError(std::string(name) + " range is reversed");
    if (!std::isfinite(lo) || !std::isfinite(hi))
      throw ValidationError(std::string(name) + " range must be finite");
  };
  check_range(beta_min, beta_max, beta_steps, "beta");
  check_range(gamma_min, gamma_max, gamma_steps, "gamma");

  const auto grid_value = [](double lo, double hi, std::size_t steps, std::size_t i) {
    if (steps == 1) return lo;
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
  };

  // cells are independent; grid order of the rows is part of the contract
  std::string out = "beta,gamma,verdict,u,x,y,radius\n";
  for (std::size_t bi = 0; bi < beta_steps; ++bi) {
    for (std::size_t gi = 0; gi < gamma_steps; ++gi) {
      const double beta = grid_value(beta_min, beta_max, beta_steps, bi);
      const double gamma = grid_value(gamma_min, gamma_max, gamma_steps, gi);
      std::string verdict;
      std::string cells = ",,,";
      try {
        const FixedPointReport rep = convergence_verdict(sigma, beta, gamma);
        verdict = to_string(rep.verdict);
        if (rep.verdict == FixedPointVerdict::Convergent) {
          double radius = 0.0;
          for (const CompletedFixedPoint& c : rep.completed)
            if (c.stable) radius = c.radius;
          cells = format_double(rep.stable->u) + "," + format_double(rep.stable->x) + "," +
                  format_double(rep.stable->y) + "," + format_double(radius);
        }
      } catch (const ConsistencyError&) {
        verdict = "Inconsistent";
      }
      out += format_double(beta) + "," + format_double(gamma) + "," + verdict + "," + cells +
             "\n";
    }
  }
  write_output(output, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tridiagonal continued-fraction toolkit"};
  app.require_subcommand(1);

  ModelOptions fac_model;
  double fac_zre = 0.0, fac_zim = 0.0;
  std::string fac_output, fac_format = "json";
  CLI::App* fac = app.add_subcommand("factorize", "U*F*L factorization of H - z");
  add_model_options(fac, fac_model);
  fac->add_option("--z-re", fac_zre, "real part of the shift");
  fac->add_option("--z-im", fac_zim, "imaginary part of the shift");
  fac->add_option("--output", fac_output, "output path (default stdout)");
  fac->add_option("--format", fac_format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  ModelOptions gre_model;
  double gre_zre = 0.0, gre_zim = 0.0;
  std::string gre_output, gre_format = "json";
  CLI::App* gre = app.add_subcommand("greens", "corner resolvent entry f1(z)");
  add_model_options(gre, gre_model);
  gre->add_option("--z-re", gre_zre, "real part of the shift");
  gre->add_option("--z-im", gre_zim, "imaginary part of the shift");
  gre->add_option("--output", gre_output, "output path (default stdout)");
  gre->add_option("--format", gre_format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  double it_alpha = 1.0, it_beta = 0.0, it_gamma = 0.0, it_sigma = 0.0, it_tol = 1e-12;
  std::size_t it_steps = 0;
  std::string it_output, it_format = "csv";
  CLI::App* ite = app.add_subcommand("iterate", "homogeneous (u,x,y) iteration trace");
  ite->add_option("--alpha", it_alpha, "constant coupling (default 1)");
  ite->add_option("--beta", it_beta, "constant diagonal real part")->required();
  ite->add_option("--gamma", it_gamma, "constant diagonal imaginary part")->required();
  ite->add_option("--sigma", it_sigma, "shift")->required();
  ite->add_option("--steps", it_steps, "number of iterations")->required();
  ite->add_option("--tol", it_tol, "convergence tolerance (default 1e-12)");
  ite->add_option("--output", it_output, "output path (default stdout)");
  ite->add_option("--format", it_format, "csv or json")
      ->check(CLI::IsMember({"json", "csv"}));

  ModelOptions scan_model;
  double scan_sigma_max = 0.0, scan_refine_tol = 1e-12;
  std::size_t scan_grid = 2048;
  bool scan_oracle = false;
  std::string scan_csv, scan_output;
  CLI::App* scan = app.add_subcommand("sv-scan", "singular values via the secular determinant");
  add_model_options(scan, scan_model);
  scan->add_option("--sigma-max", scan_sigma_max,
                   "scan upper bound (default: spectral bound of the partner)");
  scan->add_option("--grid", scan_grid, "number of grid points (default 2048)");
  scan->add_option("--refine-tol", scan_refine_tol, "bisection tolerance (default 1e-12)");
  scan->add_flag("--oracle-check", scan_oracle, "compare the root count against the dense reference");
  scan->add_option("--csv", scan_csv, "also dump the sampled sigma,det grid to this path");
  scan->add_option("--output", scan_output, "output path for the JSON root list");

  double fp_sigma = 0.0, fp_beta = 0.0, fp_gamma = 0.0;
  std::string fp_output;
  CLI::App* fp = app.add_subcommand("fixed-point", "closed-form convergence analysis");
  fp->add_option("--sigma", fp_sigma, "shift")->required();
  fp->add_option("--beta", fp_beta, "constant diagonal real part")->required();
  fp->add_option("--gamma", fp_gamma, "constant diagonal imaginary part")->required();
  fp->add_option("--output", fp_output, "output path (default stdout)");

  ModelOptions orc_model;
  std::size_t orc_grid = 2048;
  std::string orc_output;
  CLI::App* orc = app.add_subcommand("oracle-check",
                                     "dense singular values and eigenvalues side by side");
  add_model_options(orc, orc_model);
  orc->add_option("--grid", orc_grid, "scan grid for the comparison (default 2048)");
  orc->add_option("--output", orc_output, "output path (default stdout)");

  double sw_sigma = 0.0;
  double sw_beta_min = 0.0, sw_beta_max = 0.0, sw_gamma_min = 0.0, sw_gamma_max = 0.0;
  std::size_t sw_beta_steps = 0, sw_gamma_steps = 0;
  std::string sw_output;
  CLI::App* sw = app.add_subcommand("sweep", "verdict grid over beta and gamma at fixed sigma");
  sw->add_option("--sigma", sw_sigma, "shift")->required();
  sw->add_option("--beta-min", sw_beta_min)->required();
  sw->add_option("--beta-max", sw_beta_max)->required();
  sw->add_option("--beta-steps", sw_beta_steps)->required();
  sw->add_option("--gamma-min", sw_gamma_min)->required();
  sw->add_option("--gamma-max", sw_gamma_max)->required();
  sw->add_option("--gamma-steps", sw_gamma_steps)->required();
  sw->add_option("--output", sw_output, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (fac->parsed())
      return run_factorize(fac_model, fac_zre, fac_zim, fac_output, fac_format);
    if (gre->parsed())
      return run_greens(gre_model, gre_zre, gre_zim, gre_output, gre_format);
    if (ite->parsed())
      return run_iterate(it_alpha, it_beta, it_gamma, it_sigma, it_steps, it_tol, it_output,
                         it_format);
    if (scan->parsed())
      return run_sv_scan(scan_model, scan_sigma_max, scan_grid, scan_refine_tol, scan_oracle,
                         scan_csv, scan_output);
    if (fp->parsed()) return run_fixed_point(fp_sigma, fp_beta, fp_gamma, fp_output);
    if (orc->parsed()) return run_oracle_check(orc_model, orc_grid, orc_output);
    if (sw->parsed())
      return run_sweep(sw_sigma, sw_beta_min, sw_beta_max, sw_beta_steps, sw_gamma_min,
                       sw_gamma_max, sw_gamma_steps, sw_output);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
