#include "sfa/double_delta.hpp"

#include <algorithm>
#include <numbers>
#include <stdexcept>

#include "sfa/rootfind.hpp"

namespace sfa {

double kappa_of_separation(double lambda, double separation) {
  if (!(lambda > 0.0))
    throw std::domain_error("double delta: lambda must be > 0");
  if (separation < 0.0)
    throw std::domain_error("double delta: separation must be >= 0");
  auto f = [&](double kappa) {
    return kappa - lambda * (1.0 + std::exp(-kappa * separation));
  };
  // f(lambda) <= 0 <= f(2 lambda) always brackets the unique root.
  return brent_root(f, lambda, 2.0 * lambda,
                    1e-14 * std::max(1.0, lambda));
}

DoubleDeltaTarget::DoubleDeltaTarget(double lambda, double separation)
    : lambda_(lambda), r_(separation) {
  kappa_ = kappa_of_separation(lambda, separation);
  const double e = std::exp(-kappa_ * r_);
  // 1 = N^2 int cos^2(kR/2)/(k^2+kappa^2)^2 dk over the real line.
  const double integral = std::numbers::pi / (4.0 * kappa_ * kappa_ * kappa_) *
                          (1.0 + e * (1.0 + kappa_ * r_));
  norm_ = 1.0 / std::sqrt(integral);
}

}  // namespace sfa
