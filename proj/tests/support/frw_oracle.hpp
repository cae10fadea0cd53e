#pragma once

#include <array>
#include <string>
#include <vector>

#include "cosmo/tensor.hpp"

namespace cosmo::testing {

using Point = std::array<double, 4>;  // t, r, theta, varphi
using Mat4 = std::array<std::array<double, 4>, 4>;
using Gamma = std::array<Mat4, 4>;    // [a][b][c] = Gamma^a_bc

/// Purely numeric FRW with R(t) = e^t, k = 1, c = 1. Nothing here touches the
/// symbolic engine: metric values, a cofactor inverse and 4th-order central
/// stencils only.
struct FrwOracle {
  double step = 1e-3;

  Mat4 metric(const Point& x) const;
  Gamma christoffel(const Point& x) const;
  Mat4 ricci(const Point& x) const;
  double ricci_scalar(const Point& x) const;
  Mat4 einstein(const Point& x) const;
};

Mat4 invert4(const Mat4& m);

/// Sample points inside 0 < r < 1 used by the oracle comparisons.
std::vector<Point> oracle_points();

struct OracleReport {
  int compared = 0;
  int failures = 0;
  double worst = 0;  ///< largest |sym - fd| / max(1, |fd|)
  std::string first_failure;
};

/// Compares every Christoffel, Ricci and Einstein component of the symbolic
/// FRW metric with the oracle, plus the Ricci scalar.
OracleReport compare_frw_curvature(double tol = 1e-5);

/// Numeric value of a canonical FRW component at x with R = e^t, k = c = 1.
double eval_frw(const Canonical& c, const Point& x);

}  // namespace cosmo::testing
