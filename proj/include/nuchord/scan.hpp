#pragma once

#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "nuchord/algebra.hpp"
#include "nuchord/errors.hpp"
#include "nuchord/expr.hpp"

namespace nuchord {

/// Worker cap for grid evaluation. NU_CHORD_THREADS overrides the hardware
/// count. Reductions are always performed sequentially over the value
/// vector, so results are identical for any thread count.
inline unsigned thread_count() {
  static const unsigned cached = [] {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("NU_CHORD_THREADS")) {
      char* end = nullptr;
      const long v = std::strtol(env, &end, 10);
      if (end != env && v >= 1) n = static_cast<unsigned>(std::min<long>(v, n));
    }
    return n;
  }();
  return cached;
}

template <typename F>
void parallel_for(std::size_t n, F&& body) {
  const unsigned workers = thread_count();
  if (workers <= 1 || n < 8192) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct ScanOptions {
  double tol = 1e-9;
  std::size_t initial_grid = std::size_t{1} << 10;
  std::size_t max_grid = std::size_t{1} << 20;
  Domain point_domain = Domain::Circle;
  bool closed = true;            // wrap neighbors on the theta family
  bool include_infinity = true;  // half-plane: allow the theta = pi sample
  bool use_window = false;       // add a uniform omega window family
  double window = 1e4;
  double density = 4.0;  // initial samples per unit omega on the window
  int polish_candidates = 8;
};

inline ScanOptions scan_options_for(const AlgebraInstance& inst, bool oscillatory,
                                    double freq_scale = 1.0) {
  ScanOptions opt;
  opt.tol = inst.tolerances().sup_tol;
  opt.initial_grid = inst.initial_grid();
  opt.max_grid = inst.max_grid();
  switch (inst.kind()) {
    case InstanceKind::Circle:
    case InstanceKind::AnnulusLimit:
      opt.point_domain = Domain::Circle;
      break;
    case InstanceKind::HalfPlaneC0AP:
      opt.point_domain = Domain::HalfPlane;
      if (oscillatory) {
        opt.use_window = true;
        opt.include_infinity = false;
        opt.closed = false;
        opt.window = inst.ap_window();
        opt.density = inst.ap_grid_density() * std::max(1.0, freq_scale);
      }
      break;
  }
  return opt;
}

struct ScanExtremum {
  double value = 0.0;
  BoundaryPoint where;
};

struct ScanResult {
  ScanExtremum min;
  ScanExtremum max;
  double achieved_tol = 0.0;
  std::size_t grid_points = 0;
  int rounds = 0;
};

namespace detail {

// Golden-section maximization of h on [lo, hi]; returns {x, h(x)}.
template <typename H>
std::pair<double, double> golden_max(H&& h, double lo, double hi) {
  constexpr double ratio = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double hc = h(c), hd = h(d);
  double best_x = hc >= hd ? c : d;
  double best_v = std::max(hc, hd);
  for (int it = 0; it < 120 && (b - a) > 1e-13 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
    if (hc >= hd) {
      b = d;
      d = c;
      hd = hc;
      c = b - ratio * (b - a);
      hc = h(c);
    } else {
      a = c;
      c = d;
      hc = hd;
      d = a + ratio * (b - a);
      hd = h(d);
    }
    if (hc > best_v) best_v = hc, best_x = c;
    if (hd > best_v) best_v = hd, best_x = d;
  }
  return {best_x, best_v};
}

struct Family {
  std::vector<double> coords;  // theta or omega
  std::vector<double> values;
  bool wrap = false;
  bool omega_coord = false;
};

// Indices of strict-or-flat local extrema, ranked best-first, capped.
inline std::vector<std::size_t> candidates(const Family& fam, bool maximize, int cap) {
  const std::size_t n = fam.coords.size();
  std::vector<std::size_t> idx;
  auto better = [&](double a, double b) { return maximize ? a > b : a < b; };
  for (std::size_t i = 0; i < n; ++i) {
    const bool has_prev = i > 0 || fam.wrap;
    const bool has_next = i + 1 < n || fam.wrap;
    const double prev = has_prev ? fam.values[(i + n - 1) % n] : fam.values[i];
    const double next = has_next ? fam.values[(i + 1) % n] : fam.values[i];
    const bool ge_prev = !has_prev || !better(prev, fam.values[i]);
    const bool ge_next = !has_next || !better(next, fam.values[i]);
    if (ge_prev && ge_next) idx.push_back(i);
  }
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return better(fam.values[a], fam.values[b]);
  });
  if (static_cast<int>(idx.size()) > cap) idx.resize(cap);
  return idx;
}

}  // namespace detail

/// Adaptive boundary extremum scan: evaluates the objective on refining
/// grids, polishes the best local extrema of each round with golden-section
/// search, and stops once two successive rounds agree within tol for both
/// the minimum and the maximum.
inline ScanResult scan_extrema(const std::function<double(const BoundaryPoint&)>& objective,
                               const ScanOptions& opt) {
  std::size_t n_theta = opt.initial_grid;
  std::size_t n_window =
      opt.use_window
          ? std::max<std::size_t>(1024, static_cast<std::size_t>(2.0 * opt.window * opt.density))
          : 0;
  const double theta_span = opt.use_window ? 2.0 * std::atan(opt.window) : kPi;

  auto point_at = [&](double coord, bool omega_coord) {
    BoundaryPoint p =
        omega_coord ? BoundaryPoint::from_omega(coord) : BoundaryPoint{coord, opt.point_domain};
    p.domain = opt.point_domain;
    return p;
  };

  double prev_min = std::numeric_limits<double>::quiet_NaN();
  double prev_max = std::numeric_limits<double>::quiet_NaN();
  ScanResult out;

  for (int round = 0;; ++round) {
    std::vector<detail::Family> families;

    detail::Family theta;
    theta.wrap = opt.closed;
    theta.coords.resize(n_theta);
    for (std::size_t j = 0; j < n_theta; ++j) {
      if (opt.use_window) {
        // window-limited: |omega| <= W, open chain
        theta.coords[j] =
            -theta_span + 2.0 * theta_span * (static_cast<double>(j) + 0.5) / n_theta;
      } else if (opt.include_infinity) {
        theta.coords[j] = -kPi + 2.0 * kPi * (static_cast<double>(j) + 1.0) / n_theta;
      } else {
        theta.coords[j] = -kPi + 2.0 * kPi * (static_cast<double>(j) + 0.5) / n_theta;
      }
    }
    families.push_back(std::move(theta));

    if (opt.use_window) {
      detail::Family win;
      win.omega_coord = true;
      win.coords.resize(n_window);
      for (std::size_t j = 0; j < n_window; ++j)
        win.coords[j] = -opt.window + 2.0 * opt.window * static_cast<double>(j) / (n_window - 1);
      families.push_back(std::move(win));
    }

    std::size_t total = 0;
    for (auto& fam : families) {
      fam.values.resize(fam.coords.size());
      parallel_for(fam.coords.size(), [&](std::size_t i) {
        fam.values[i] = objective(point_at(fam.coords[i], fam.omega_coord));
      });
      total += fam.coords.size();
    }

    ScanExtremum round_min{std::numeric_limits<double>::infinity(), {}};
    ScanExtremum round_max{-std::numeric_limits<double>::infinity(), {}};
    for (const auto& fam : families) {
      for (bool maximize : {false, true}) {
        for (std::size_t i : detail::candidates(fam, maximize, opt.polish_candidates)) {
          const std::size_t n = fam.coords.size();
          double lo, hi;
          if (fam.wrap) {
            lo = i == 0 ? fam.coords[n - 1] - 2.0 * kPi : fam.coords[i - 1];
            hi = i + 1 == n ? fam.coords[0] + 2.0 * kPi : fam.coords[i + 1];
          } else {
            lo = i == 0 ? fam.coords[0] : fam.coords[i - 1];
            hi = i + 1 == n ? fam.coords[n - 1] : fam.coords[i + 1];
          }
          auto h = [&](double x) {
            if (!fam.omega_coord) x = BoundaryPoint::wrap(x);
            const double v = objective(point_at(x, fam.omega_coord));
            return maximize ? v : -v;
          };
          auto [x, v] = detail::golden_max(h, lo, hi);
          if (maximize) {
            if (v > round_max.value) round_max = {v, point_at(fam.omega_coord ? x : BoundaryPoint::wrap(x), fam.omega_coord)};
          } else {
            if (-v < round_min.value) round_min = {-v, point_at(fam.omega_coord ? x : BoundaryPoint::wrap(x), fam.omega_coord)};
          }
        }
      }
    }

    out.grid_points = total;
    out.rounds = round + 1;
    if (round > 0) {
      const double dmin = std::abs(round_min.value - prev_min);
      const double dmax = std::abs(round_max.value - prev_max);
      out.min = round_min;
      out.max = round_max;
      out.achieved_tol = std::max(dmin, dmax);
      // tolerance is relative above unit scale: estimates of size 1/margin
      // can be huge while only their reciprocal is reported
      const double scale_min = std::max(1.0, std::abs(round_min.value));
      const double scale_max = std::max(1.0, std::abs(round_max.value));
      if (dmin <= opt.tol * scale_min && dmax <= opt.tol * scale_max) return out;
    } else {
      out.min = round_min;
      out.max = round_max;
    }
    prev_min = round_min.value;
    prev_max = round_max.value;

    if (n_theta >= opt.max_grid) throw NoConvergence("extremum scan exhausted its grid budget");
    n_theta *= 2;
    if (opt.use_window) n_window *= 2;
  }
}

/// Adaptive estimate of the boundary sup of |expression| within sup_tol.
inline ScanResult modulus_extrema(const BoundaryExpr& expr, const AlgebraInstance& inst) {
  const bool oscillatory =
      inst.kind() == InstanceKind::HalfPlaneC0AP && expr.has_delay();
  double freq_scale = 1.0;
  if (oscillatory) freq_scale = std::max(1.0, expr.axis_terms().max_abs_shift());
  const ScanOptions opt = scan_options_for(inst, oscillatory, freq_scale);
  return scan_extrema([&](const BoundaryPoint& p) { return std::abs(expr.eval(p)); }, opt);
}

inline double sup_modulus(const BoundaryExpr& expr, const AlgebraInstance& inst) {
  return modulus_extrema(expr, inst).max.value;
}

inline double sup_modulus(const StableElement& elem, const AlgebraInstance& inst) {
  return sup_modulus(BoundaryExpr(elem), inst);
}

}  // namespace nuchord
