#pragma once

#include <cmath>

#include "modalctl/errors.hpp"

namespace modalctl {

/// Dense 2x2 real matrix. All arithmetic is exact algebraic composition of
/// double operations; no hidden tolerances.
struct Mat2 {
  double m00 = 0.0, m01 = 0.0;
  double m10 = 0.0, m11 = 0.0;

  Mat2 transpose() const { return {m00, m10, m01, m11}; }
  double det() const { return m00 * m11 - m01 * m10; }
};

struct Vec2 {
  double v0 = 0.0, v1 = 0.0;
};

inline Mat2 operator*(const Mat2& a, const Mat2& b) {
  return {a.m00 * b.m00 + a.m01 * b.m10, a.m00 * b.m01 + a.m01 * b.m11,
          a.m10 * b.m00 + a.m11 * b.m10, a.m10 * b.m01 + a.m11 * b.m11};
}

inline Vec2 operator*(const Mat2& a, const Vec2& x) {
  return {a.m00 * x.v0 + a.m01 * x.v1, a.m10 * x.v0 + a.m11 * x.v1};
}

/// One 2x2 block of the block-diagonal generator: either the rigid-body
/// double integrator [[0,1],[0,0]] or a damped mode [[0,w],[-w,-2k]].
struct BlockSpec {
  bool rigid = false;
  double omega = 0.0;
  double kappa = 0.0;

  static BlockSpec rigid_body() { return {true, 0.0, 0.0}; }
  static BlockSpec mode(double omega, double kappa) { return {false, omega, kappa}; }
};

/// Exact matrix exponential e^{tA} of a block.
///
/// Rigid block: [[1,t],[0,1]].
/// Mode block A = [[0,w],[-w,-2k]]: with N = A + kI, N^2 = (k^2-w^2) I, so
///   e^{tA} = e^{-kt} (c(t) I + s(t) N),
/// where (c,s) = (cos(mu t), sin(mu t)/mu) for mu = sqrt(w^2-k^2) underdamped,
/// (1, t) critically damped, and (cosh(lam t), sinh(lam t)/lam) for
/// lam = sqrt(k^2-w^2) overdamped. The overdamped branch is assembled from
/// e^{(lam-k)t} and e^{-(lam+k)t} once lam*t is large, so heavily damped
/// blocks neither overflow nor lose the slow e^{(lam-k)t} component.
Mat2 block_expm(const BlockSpec& block, double t);

}  // namespace modalctl
