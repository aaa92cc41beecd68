// nuchord: refined chordal metrics, stability margins and robustness
// certificates for factored SISO plants.
//
// Exit codes: 0 success, 2 input/parse error, 3 factors not coprime,
// 4 refinement did not converge, 5 other computation error.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nuchord/nuchord.hpp"
#include "nuchord/selfcheck.hpp"

namespace {

using namespace nuchord;

struct GlobalFlags {
  double tol = 1e-9;
  std::size_t max_grid = std::size_t{1} << 20;
  bool json = false;
  std::string instance;  // when set, every input must declare this instance
};

struct LoadedPlant {
  PlantSpecFile spec;
  std::string path;
  std::string digest;
};

LoadedPlant load(const std::string& path, const GlobalFlags& flags,
                 std::optional<double> param = std::nullopt) {
  Tolerances tol;
  tol.sup_tol = flags.tol;
  LoadedPlant out{load_plant_spec(path, tol, param), path, content_digest(read_file(path))};
  if (!flags.instance.empty() && out.spec.instance_name != flags.instance)
    throw ParseError(path + " declares instance " + out.spec.instance_name + ", expected " +
                     flags.instance);
  out.spec.instance = out.spec.instance.with_grid_budget(std::size_t{1} << 10, flags.max_grid);
  return out;
}

AlgebraInstance common_instance(const LoadedPlant& a, const LoadedPlant& b) {
  if (a.spec.instance.kind() != b.spec.instance.kind())
    throw ParseError("input files use different instances: " + a.spec.instance_name + " vs " +
                     b.spec.instance_name);
  return a.spec.instance;
}

Json base_record(const std::string& command, const std::vector<const LoadedPlant*>& inputs) {
  Json rec;
  rec["command"] = command;
  Json in = Json::array();
  for (const auto* p : inputs) in.push_back({{"path", p->path}, {"digest", p->digest}});
  rec["inputs"] = std::move(in);
  return rec;
}

void emit(Json rec, double wall_ms, const GlobalFlags& flags, const std::string& human) {
  if (flags.json) {
    rec["wall_time_ms"] = wall_ms;
    std::cout << rec.dump(2) << "\n";
  } else {
    std::cout << human;
  }
}

class Timer {
 public:
  double ms() const {
    return std::chrono::duration<double, std::milli>(Clock::now() - start_).count();
  }

 private:
  using Clock = std::chrono::steady_clock;
  Clock::time_point start_ = Clock::now();
};

void write_kappa_csv(const std::string& path, const CoprimeFactorization& cf1,
                     const CoprimeFactorization& cf2) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  out << "theta,omega,kappa\n";
  const bool skip_infinity = cf1.n.has_delay() || cf1.d.has_delay() || cf2.n.has_delay() ||
                             cf2.d.has_delay();
  const Domain dom = cf1.instance.element_domain();
  const std::size_t n = 4096;
  char line[128];
  for (std::size_t j = 0; j < n; ++j) {
    const double theta = skip_infinity ? -kPi + 2.0 * kPi * (j + 0.5) / n
                                       : -kPi + 2.0 * kPi * (j + 1.0) / n;
    const BoundaryPoint p{theta, dom};
    const double omega = dom == Domain::HalfPlane ? p.omega() : 0.0;
    std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g\n", theta, omega,
                  kappa_at(cf1, cf2, p));
    out << line;
  }
}

int cmd_metric(const std::string& p1_path, const std::string& p2_path,
               const std::string& kappa_csv, const GlobalFlags& flags) {
  Timer timer;
  const LoadedPlant a = load(p1_path, flags);
  const LoadedPlant b = load(p2_path, flags);
  const AlgebraInstance inst = common_instance(a, b);
  const auto cf1 = ensure_cf(a.spec.plant, inst);
  const auto cf2 = ensure_cf(b.spec.plant, inst);
  const MetricResult m = d_cr(cf1, cf2);
  if (!kappa_csv.empty()) write_kappa_csv(kappa_csv, cf1, cf2);

  Json rec = base_record("metric", {&a, &b});
  rec["instance"] = a.spec.instance_name;
  rec["d_cr"] = to_json(m);
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "d_cr = %.10f\nbranch: %s\ncondition holds: %s\nachieved tol: %.3e (grid %zu)\n",
                m.value, m.branch == MetricBranch::KappaSup ? "kappa_sup" : "index_condition_failed",
                m.condition.holds ? "yes" : "no", m.grid.achieved_tol, m.grid.final_grid);
  emit(std::move(rec), timer.ms(), flags, buf);
  return 0;
}

int cmd_margin(const std::string& p_path, const std::string& c_path, const GlobalFlags& flags) {
  Timer timer;
  const LoadedPlant a = load(p_path, flags);
  const LoadedPlant b = load(c_path, flags);
  const AlgebraInstance inst = common_instance(a, b);
  const auto cf_p = ensure_cf(a.spec.plant, inst);
  const auto cf_c = ensure_cf(b.spec.plant, inst);
  const bool stab = stabilizes(cf_p, cf_c);
  MarginDiagnostics diag;
  const double mu = stab ? margin(cf_p, cf_c, &diag) : 0.0;
  double agreement = 0.0;
  if (stab) agreement = std::abs(mu - margin_via_norm(cf_p, cf_c));

  Json rec = base_record("margin", {&a, &b});
  rec["instance"] = a.spec.instance_name;
  rec["stabilizes"] = stab;
  rec["mu"] = mu;
  if (stab) {
    rec["mu_inverse"] = 1.0 / mu;
    rec["achieved_tol"] = diag.achieved_tol;
    rec["grid_points"] = diag.grid_points;
    rec["two_formula_delta"] = agreement;
  }
  char buf[256];
  if (stab)
    std::snprintf(buf, sizeof(buf),
                  "stabilizes: yes\nmu = %.10f\nmu^-1 = %.10f\n|margin - margin_via_norm| = %.3e\n",
                  mu, 1.0 / mu, agreement);
  else
    std::snprintf(buf, sizeof(buf), "stabilizes: no\nmu = 0\n");
  emit(std::move(rec), timer.ms(), flags, buf);
  return 0;
}

int cmd_certify(const std::string& p0_path, const std::string& c_path, const std::string& p_path,
                bool direct_mu, const GlobalFlags& flags) {
  Timer timer;
  const LoadedPlant f0 = load(p0_path, flags);
  const LoadedPlant fc = load(c_path, flags);
  const LoadedPlant fp = load(p_path, flags);
  const AlgebraInstance inst = common_instance(f0, fc);
  common_instance(f0, fp);
  const Certificate cert =
      certify_robust(ensure_cf(f0.spec.plant, inst), ensure_cf(fc.spec.plant, inst),
                     ensure_cf(fp.spec.plant, inst), direct_mu);

  Json rec = base_record("certify", {&f0, &fc, &fp});
  rec["instance"] = f0.spec.instance_name;
  rec["certificate"] = to_json(cert);
  char buf[320];
  std::snprintf(buf, sizeof(buf),
                "mu_nominal = %.10f\nd_cr(p, p0) = %.10f\nlower_bound = %.10f\nstabilized: %s\n%s",
                cert.mu_nominal, cert.distance, cert.lower_bound,
                cert.stabilized ? "yes" : "not certified",
                cert.mu_perturbed
                    ? ("mu_perturbed = " + std::to_string(*cert.mu_perturbed) + "\n").c_str()
                    : "");
  emit(std::move(rec), timer.ms(), flags, buf);
  return 0;
}

int cmd_sweep(const std::string& p0_path, const std::string& c_path,
              const std::string& template_path, const std::string& range,
              const std::string& out_path, const GlobalFlags& flags) {
  const auto first = range.find(':');
  const auto second = range.find(':', first + 1);
  if (first == std::string::npos || second == std::string::npos)
    throw ParseError("--param-range expects a0:a1:step");
  const double a0 = std::stod(range.substr(0, first));
  const double a1 = std::stod(range.substr(first + 1, second - first - 1));
  const double step = std::stod(range.substr(second + 1));
  if (step <= 0.0 || a1 < a0) throw ParseError("--param-range expects a0 <= a1 and step > 0");

  const LoadedPlant nominal = load(p0_path, flags);
  const LoadedPlant controller = load(c_path, flags);
  const AlgebraInstance inst = common_instance(nominal, controller);
  const auto cf0 = ensure_cf(nominal.spec.plant, inst);
  const auto cfc = ensure_cf(controller.spec.plant, inst);
  const double mu0 = margin(cf0, cfc);

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw ParseError("cannot write " + out_path);
    out = &file;
  }
  (*out) << "a,d_cr,closed_form,mu_lower_bound,certified\n";
  char line[192];
  for (double a = a0; a <= a1 + 0.5 * step; a += step) {
    const LoadedPlant pa = load(template_path, flags, a);
    const auto cfa = ensure_cf(pa.spec.plant, inst);
    const double d = d_cr(cfa, cf0).value;
    const double closed_form = std::abs(a - 1.0) / std::sqrt(2.0 * (1.0 + a * a));
    const double lower = mu0 - d;
    std::snprintf(line, sizeof(line), "%.10g,%.10g,%.10g,%.10g,%d\n", a, d, closed_form, lower,
                  lower > 0.0 ? 1 : 0);
    (*out) << line;
  }
  return 0;
}

int cmd_selftest() {
  const auto results = run_selftest();
  std::printf("%-24s %8s  %-6s %s\n", "check", "cases", "result", "detail");
  bool all = true;
  for (const auto& r : results) {
    std::printf("%-24s %8zu  %-6s %s\n", r.name.c_str(), r.cases, r.pass ? "PASS" : "FAIL",
                r.detail.c_str());
    all = all && r.pass;
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"refined chordal metric, stability margins and robustness certificates"};
  app.require_subcommand(1);
  GlobalFlags flags;
  app.add_option("--tol", flags.tol, "sup refinement tolerance")->capture_default_str();
  app.add_option("--max-grid", flags.max_grid, "grid refinement ceiling")->capture_default_str();
  app.add_flag("--json", flags.json, "emit a machine-readable result record");
  app.add_option("--instance", flags.instance,
                 "require every input to declare this instance (circle, halfplane_c0ap, annulus)");

  std::string p1, p2, p3, kappa_csv, range, out_path;
  bool direct_mu = false;

  auto* metric = app.add_subcommand("metric", "d_cr between two plants");
  metric->fallthrough();
  metric->add_option("p1", p1, "plant spec file")->required();
  metric->add_option("p2", p2, "plant spec file")->required();
  metric->add_option("--kappa-csv", kappa_csv, "write pointwise kappa samples to a CSV file");

  auto* margin_cmd = app.add_subcommand("margin", "stability margin of a plant/controller pair");
  margin_cmd->fallthrough();
  margin_cmd->add_option("plant", p1, "plant spec file")->required();
  margin_cmd->add_option("controller", p2, "controller spec file")->required();

  auto* certify = app.add_subcommand("certify", "robust stabilization certificate");
  certify->fallthrough();
  certify->add_option("nominal", p1, "nominal plant spec file")->required();
  certify->add_option("controller", p2, "controller spec file")->required();
  certify->add_option("perturbed", p3, "perturbed plant spec file")->required();
  certify->add_flag("--direct-mu", direct_mu, "also compute the perturbed margin directly");

  auto* sweep = app.add_subcommand("sweep", "parameter sweep over a plant template");
  sweep->fallthrough();
  sweep->add_option("nominal", p1, "nominal plant spec file")->required();
  sweep->add_option("controller", p2, "controller spec file")->required();
  sweep->add_option("template", p3, "plant template with parameter tokens")->required();
  sweep->add_option("--param-range", range, "a0:a1:step")->required();
  sweep->add_option("--out", out_path, "CSV output path (default stdout)");

  app.add_subcommand("selftest", "run the built-in invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (metric->parsed()) return cmd_metric(p1, p2, kappa_csv, flags);
    if (margin_cmd->parsed()) return cmd_margin(p1, p2, flags);
    if (certify->parsed()) return cmd_certify(p1, p2, p3, direct_mu, flags);
    if (sweep->parsed()) return cmd_sweep(p1, p2, p3, range, out_path, flags);
    return cmd_selftest();
  } catch (const nuchord::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nuchord::DomainMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nuchord::NotCoprime& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const nuchord::NoConvergence& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const nuchord::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  }
}
