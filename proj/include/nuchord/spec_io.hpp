#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "nuchord/algebra.hpp"
#include "nuchord/errors.hpp"
#include "nuchord/factorization.hpp"
#include "nuchord/index_ops.hpp"
#include "nuchord/metric.hpp"
#include "nuchord/stability.hpp"

namespace nuchord {

using Json = nlohmann::ordered_json;

struct PlantSpecFile {
  AlgebraInstance instance;
  Fraction plant;
  std::string instance_name;
};

namespace spec_detail {

// Coefficient entry: a number, or a parameter token like "a", "-a", "2*a",
// "0.5a" resolved against the sweep parameter.
inline double coefficient(const Json& entry, std::optional<double> param) {
  if (entry.is_number()) return entry.get<double>();
  if (entry.is_string()) {
    if (!param) throw ParseError("parameter token without a parameter value");
    std::string s = entry.get<std::string>();
    if (s.empty() || s.back() != 'a') throw ParseError("bad coefficient token: " + s);
    s.pop_back();
    if (!s.empty() && s.back() == '*') s.pop_back();
    double factor = 1.0;
    if (s == "-")
      factor = -1.0;
    else if (!s.empty()) {
      std::size_t used = 0;
      factor = std::stod(s, &used);
      if (used != s.size()) throw ParseError("bad coefficient token");
    }
    return factor * *param;
  }
  throw ParseError("coefficient entries must be numbers or parameter tokens");
}

inline Polynomial polynomial(const Json& arr, std::optional<double> param) {
  if (!arr.is_array() || arr.empty()) throw ParseError("coefficient list must be a nonempty array");
  std::vector<double> c;
  c.reserve(arr.size());
  for (const auto& e : arr) c.push_back(coefficient(e, param));
  return Polynomial(std::move(c));
}

inline StableElement element(Domain domain, const Json& terms, std::optional<double> param) {
  if (!terms.is_array() || terms.empty()) throw ParseError("element needs a nonempty term array");
  std::vector<RationalDelayTerm> out;
  for (const auto& t : terms) {
    RationalDelayTerm term;
    term.num = polynomial(t.at("num"), param);
    term.den = t.contains("den") ? polynomial(t.at("den"), param) : Polynomial::constant(1.0);
    term.delay = t.value("delay", 0.0);
    if (term.delay < 0.0) throw ParseError("delays must be nonnegative");
    if (term.delay > 0.0 && domain != Domain::HalfPlane)
      throw ParseError("delays are only valid under half-plane instances");
    out.push_back(std::move(term));
  }
  return StableElement(domain, std::move(out));
}

}  // namespace spec_detail

inline AlgebraInstance parse_instance(const Json& doc, Tolerances tol = {}) {
  const std::string name = doc.at("instance").get<std::string>();
  if (name == "circle") return AlgebraInstance::circle(tol);
  if (name == "halfplane_c0ap")
    return AlgebraInstance::halfplane_c0ap(tol, doc.value("ap_window", 1e4),
                                           doc.value("ap_grid_density", 4.0));
  if (name == "annulus") {
    std::vector<double> radii = {0.9, 0.99, 0.999, 0.9999, 0.99999};
    if (doc.contains("annulus_radii")) radii = doc.at("annulus_radii").get<std::vector<double>>();
    return AlgebraInstance::annulus_limit(std::move(radii), tol);
  }
  throw ParseError("unknown instance: " + name);
}

inline PlantSpecFile parse_plant_spec(const Json& doc, Tolerances tol = {},
                                      std::optional<double> param = std::nullopt) {
  try {
    AlgebraInstance inst = parse_instance(doc, tol);
    const Domain domain = inst.element_domain();
    const Json& plant = doc.at("plant");
    const std::string kind = plant.at("kind").get<std::string>();
    if (kind == "rational") {
      if (plant.contains("delay") || plant.contains("delays"))
        throw ParseError("rational plants carry no delays; supply a cf");
      Fraction f = Fraction::from_rational(spec_detail::polynomial(plant.at("num"), param),
                                           spec_detail::polynomial(plant.at("den"), param));
      return PlantSpecFile{std::move(inst), std::move(f), doc.at("instance").get<std::string>()};
    }
    if (kind == "cf") {
      StableElement n = spec_detail::element(domain, plant.at("n"), param);
      StableElement d = spec_detail::element(domain, plant.at("d"), param);
      std::optional<BezoutWitness> bezout;
      if (plant.contains("bezout")) {
        bezout = BezoutWitness{
            spec_detail::element(domain, plant.at("bezout").at("x"), param),
            spec_detail::element(domain, plant.at("bezout").at("y"), param)};
      }
      Fraction f = Fraction::from_cf(
          CoprimeFactorization(std::move(n), std::move(d), std::move(bezout), inst));
      return PlantSpecFile{std::move(inst), std::move(f), doc.at("instance").get<std::string>()};
    }
    throw ParseError("unknown plant kind: " + kind);
  } catch (const ParseError&) {
    throw;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("malformed plant spec: ") + e.what());
  } catch (const Error& e) {
    throw ParseError(std::string("invalid plant spec: ") + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline PlantSpecFile load_plant_spec(const std::string& path, Tolerances tol = {},
                                     std::optional<double> param = std::nullopt) {
  Json doc;
  try {
    doc = Json::parse(read_file(path));
  } catch (const Json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return parse_plant_spec(doc, tol, param);
}

/// FNV-1a digest of raw input bytes; identifies inputs inside result records.
inline std::string content_digest(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

inline Json to_json(const IndexValue& idx) {
  Json j;
  if (idx.kind == IndexValue::Kind::Integer) {
    j["group"] = "Z";
    j["w"] = idx.w;
  } else {
    j["group"] = "RxZ";
    j["w_av"] = idx.w_av;
    j["w_av_tol"] = idx.w_av_tol;
    j["w"] = idx.w;
  }
  return j;
}

inline Json to_json(const InvertibilityReport& rep) {
  Json j;
  j["invertible"] = rep.invertible;
  j["min_modulus"] = rep.min_modulus;
  j["sup_modulus"] = rep.sup_modulus;
  j["threshold"] = rep.threshold;
  j["witness_theta"] = rep.witness_point.theta;
  j["near_threshold"] = rep.near_threshold;
  return j;
}

inline Json to_json(const MetricResult& m) {
  Json j;
  j["value"] = m.value;
  j["branch"] = m.branch == MetricBranch::KappaSup ? "kappa_sup" : "index_condition_failed";
  Json cond;
  cond["holds"] = m.condition.holds;
  cond["invertibility"] = to_json(m.condition.invertibility);
  if (m.condition.index) cond["index"] = to_json(*m.condition.index);
  if (!m.condition.note.empty()) cond["note"] = m.condition.note;
  j["condition"] = std::move(cond);
  Json grid;
  grid["final_grid"] = m.grid.final_grid;
  grid["achieved_tol"] = m.grid.achieved_tol;
  grid["branch_ambiguous"] = m.grid.branch_ambiguous;
  j["grid"] = std::move(grid);
  return j;
}

inline Json to_json(const Certificate& cert) {
  Json j;
  j["mu_nominal"] = cert.mu_nominal;
  j["distance"] = cert.distance;
  j["lower_bound"] = cert.lower_bound;
  j["stabilized"] = cert.stabilized;
  j["mu_achieved_tol"] = cert.mu_achieved_tol;
  if (cert.mu_perturbed) j["mu_perturbed"] = *cert.mu_perturbed;
  j["metric"] = to_json(cert.metric);
  return j;
}

}  // namespace nuchord
