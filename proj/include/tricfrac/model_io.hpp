#pragma once

// JSON model ingestion and emission.  Two accepted shapes:
//   { "n": int, "alpha": [..], "beta": [..], "gamma": [..] }
//   { "schroedinger": { "h": float, "v_re": [..], "v_im": [..], "normalized": bool } }
// Arrays are plain decimal numbers; NaN/Inf are rejected.  Emission is
// byte-deterministic (fixed field order, 17 significant digits).

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tricfrac/errors.hpp"
#include "tricfrac/operator_core.hpp"
#include "tricfrac/text_format.hpp"

namespace tricfrac {

struct SchroedingerParams {
  double h;
  std::vector<double> v_re;
  std::vector<double> v_im;
  bool normalized;
};

struct Model {
  ComplexTridiagonal matrix;
  std::optional<SchroedingerParams> schroedinger;  // provenance for round trips
};

namespace detail {

inline std::vector<double> json_double_array(const nlohmann::json& j, const char* field) {
  if (!j.contains(field)) throw ValidationError(std::string("model is missing field ") + field);
  const auto& arr = j.at(field);
  if (!arr.is_array()) throw ValidationError(std::string(field) + " must be an array of numbers");
  std::vector<double> out;
  out.reserve(arr.size());
  for (const auto& v : arr) {
    if (!v.is_number()) throw ValidationError(std::string(field) + " must contain only numbers");
    out.push_back(v.get<double>());
  }
  require_finite(out, field);
  return out;
}

}  // namespace detail

inline Model parse_model_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("model file is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("model must be a JSON object");

  if (j.contains("schroedinger")) {
    const auto& s = j.at("schroedinger");
    if (!s.is_object()) throw ValidationError("schroedinger must be an object");
    if (!s.contains("h") || !s.at("h").is_number())
      throw ValidationError("schroedinger.h must be a number");
    SchroedingerParams params;
    params.h = s.at("h").get<double>();
    params.v_re = detail::json_double_array(s, "v_re");
    params.v_im = detail::json_double_array(s, "v_im");
    params.normalized = false;
    if (s.contains("normalized")) {
      if (!s.at("normalized").is_boolean())
        throw ValidationError("schroedinger.normalized must be a boolean");
      params.normalized = s.at("normalized").get<bool>();
    }
    ComplexTridiagonal matrix =
        discretize_schroedinger(params.v_re, params.v_im, params.h, params.normalized);
    return Model{std::move(matrix), std::move(params)};
  }

  if (!j.contains("n") || !j.at("n").is_number_integer())
    throw ValidationError("model field n must be an integer");
  const long long n = j.at("n").get<long long>();
  if (n < 1) throw ValidationError("model field n must be at least 1");
  std::vector<double> alpha = detail::json_double_array(j, "alpha");
  std::vector<double> beta = detail::json_double_array(j, "beta");
  std::vector<double> gamma = detail::json_double_array(j, "gamma");
  if (beta.size() != static_cast<std::size_t>(n))
    throw ValidationError("beta must have exactly n entries");
  if (gamma.size() != static_cast<std::size_t>(n))
    throw ValidationError("gamma must have exactly n entries");
  if (alpha.size() + 1 != static_cast<std::size_t>(n))
    throw ValidationError("alpha must have exactly n-1 entries");
  return Model{ComplexTridiagonal(std::move(alpha), std::move(beta), std::move(gamma)),
               std::nullopt};
}

inline Model load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open model file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_model_json(buffer.str());
}

inline Model homogeneous_model(std::size_t n, double alpha, double beta, double gamma) {
  if (n < 1) throw ValidationError("model size n must be at least 1");
  return Model{ComplexTridiagonal(std::vector<double>(n - 1, alpha),
                                  std::vector<double>(n, beta),
                                  std::vector<double>(n, gamma)),
               std::nullopt};
}

inline std::string dump_model_json(const Model& model) {
  std::string out;
  if (model.schroedinger) {
    const SchroedingerParams& s = *model.schroedinger;
    out += "{\"schroedinger\":{\"h\":" + format_double(s.h);
    out += ",\"v_re\":" + format_double_array(s.v_re);
    out += ",\"v_im\":" + format_double_array(s.v_im);
    out += std::string(",\"normalized\":") + (s.normalized ? "true" : "false");
    out += "}}";
    return out;
  }
  const ComplexTridiagonal& m = model.matrix;
  out += "{\"n\":" + std::to_string(m.size());
  out += ",\"alpha\":" + format_double_array(m.alpha());
  out += ",\"beta\":" + format_double_array(m.beta());
  out += ",\"gamma\":" + format_double_array(m.gamma());
  out += "}";
  return out;
}

}  // namespace tricfrac
