#include "modalctl/block2.hpp"

namespace modalctl {

namespace {

// sin(x)/x, series below the rounding floor of the quotient
double sinc(double x) {
  if (std::abs(x) < 1e-6) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

double sinhc(double x) {
  if (std::abs(x) < 1e-6) {
    const double x2 = x * x;
    return 1.0 + x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sinh(x) / x;
}

}  // namespace

Mat2 block_expm(const BlockSpec& block, double t) {
  if (!std::isfinite(t)) {
    throw NumericalError("block_expm: non-finite time");
  }
  if (block.rigid) {
    return {1.0, t, 0.0, 1.0};
  }
  const double w = block.omega;
  const double k = block.kappa;
  const double disc = (w - k) * (w + k);  // w^2 - k^2

  // e^{tA} = ec I + es (A + kI) with A + kI = [[k,w],[-w,-k]]
  double ec = 0.0, es = 0.0;
  if (disc > 0.0) {
    const double mu = std::sqrt(disc);
    const double decay = std::exp(-k * t);
    ec = decay * std::cos(mu * t);
    es = decay * t * sinc(mu * t);
  } else if (disc < 0.0) {
    const double lam = std::sqrt(-disc);
    if (std::abs(lam * t) < 1.0) {
      const double decay = std::exp(-k * t);
      ec = decay * std::cosh(lam * t);
      es = decay * t * sinhc(lam * t);
    } else {
      const double ep = std::exp((lam - k) * t);
      const double em = std::exp(-(lam + k) * t);
      ec = 0.5 * (ep + em);
      es = 0.5 * (ep - em) / lam;
    }
  } else {
    const double decay = std::exp(-k * t);
    ec = decay;
    es = decay * t;
  }
  return {ec + es * k, es * w, -es * w, ec - es * k};
}

}  // namespace modalctl
