#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "nuchord/algebra.hpp"
#include "nuchord/errors.hpp"

namespace nuchord {

struct WindingOptions {
  double zero_tol = 0.0;  // absolute floor on |value|; <= 0 means 1e-9 * max|value|
  int max_depth = 24;     // bisection levels per offending segment
};

/// Winding number about the origin of a closed nonvanishing curve: the sum
/// of principal-branch phase increments over 2*pi, rounded to the nearest
/// integer. Per-step increments above pi/2 are bisected through the
/// re-evaluation callback until they resolve or the depth budget runs out;
/// a leftover step of essentially pi is not resolvable.
inline int winding_number(const SampledCurve& curve,
                          const std::function<Complex(double)>* reeval = nullptr,
                          WindingOptions opt = {}) {
  if (!curve.closed) throw GridMismatch("winding number needs a closed curve");
  double max_abs = 0.0;
  for (const Complex& v : curve.values) max_abs = std::max(max_abs, std::abs(v));
  const double zero_tol = opt.zero_tol > 0.0 ? opt.zero_tol : 1e-9 * max_abs;
  for (std::size_t i = 0; i < curve.size(); ++i)
    if (std::abs(curve.values[i]) <= zero_tol)
      throw CurveThroughZero("curve modulus below the invertibility threshold");

  struct Segment {
    double t0, t1;
    Complex v0, v1;
    int depth;
  };
  std::vector<Segment> stack;
  stack.reserve(2 * curve.size());
  const std::size_t n = curve.size();
  for (std::size_t i = 0; i + 1 < n; ++i)
    stack.push_back({curve.thetas[i], curve.thetas[i + 1], curve.values[i], curve.values[i + 1], 0});
  stack.push_back(
      {curve.thetas[n - 1], curve.thetas[0] + 2.0 * kPi, curve.values[n - 1], curve.values[0], 0});

  double total = 0.0;
  while (!stack.empty()) {
    const Segment seg = stack.back();
    stack.pop_back();
    const double step = std::arg(seg.v1 / seg.v0);
    if (std::abs(step) <= 0.5 * kPi) {
      total += step;
      continue;
    }
    if (seg.depth < opt.max_depth && reeval != nullptr) {
      const double tm = 0.5 * (seg.t0 + seg.t1);
      const Complex vm = (*reeval)(BoundaryPoint::wrap(tm));
      if (std::abs(vm) <= zero_tol)
        throw CurveThroughZero("curve modulus below the invertibility threshold");
      stack.push_back({seg.t0, tm, seg.v0, vm, seg.depth + 1});
      stack.push_back({tm, seg.t1, vm, seg.v1, seg.depth + 1});
      continue;
    }
    if (std::abs(step) >= kPi * (1.0 - 1e-12))
      throw NonResolvableWinding("phase step of pi after refinement budget");
    total += step;
  }

  const double turns = total / (2.0 * kPi);
  const double rounded = std::round(turns);
  if (std::abs(turns - rounded) > 0.25)
    throw NonResolvableWinding("accumulated phase is not an integer multiple of 2*pi");
  return static_cast<int>(rounded);
}

/// Samples fn over a closed uniform theta grid (theta = pi included) and
/// computes the winding number with fn as the refinement callback.
inline int winding_of_boundary_function(const std::function<Complex(double)>& fn,
                                        std::size_t initial_grid = std::size_t{1} << 10,
                                        WindingOptions opt = {}) {
  std::vector<double> thetas(initial_grid);
  std::vector<Complex> values(initial_grid);
  for (std::size_t j = 0; j < initial_grid; ++j) {
    thetas[j] = -kPi + 2.0 * kPi * (static_cast<double>(j) + 1.0) / initial_grid;
    values[j] = fn(thetas[j]);
  }
  const SampledCurve curve(std::move(thetas), std::move(values), /*closed=*/true);
  return winding_number(curve, &fn, opt);
}

}  // namespace nuchord
