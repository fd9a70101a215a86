#pragma once

#include <cmath>
#include <complex>

namespace sfa {

// Positive root of kappa = lambda (1 + exp(-kappa R)); lambda carries
// inverse length. kappa(0) = 2 lambda, kappa(inf) = lambda, so the binding
// energy kappa^2/2 relaxes by exactly a factor of 4 as the centers separate.
double kappa_of_separation(double lambda, double separation);

// 1D two-center contact-potential model: wells of strength lambda at
// +-R/2. Only the even bound state is kept; its momentum wavefunction is
// Phi0(k) = N cos(kR/2) / (k^2 + kappa^2).
class DoubleDeltaTarget {
 public:
  DoubleDeltaTarget(double lambda, double separation);

  double lambda() const { return lambda_; }
  double separation() const { return r_; }
  double kappa() const { return kappa_; }
  double ip() const { return 0.5 * kappa_ * kappa_; }
  double norm() const { return norm_; }

  std::complex<double> bound_wavefunction(double k) const {
    return norm_ * std::cos(0.5 * k * r_) / (k * k + kappa_ * kappa_);
  }

  // Bound-free dipole; terms proportional to R ("unphysical" translations
  // of the two-center state) are dropped. Entire in p, so complex momenta
  // are fine.
  template <class T>
  std::complex<double> dipole(T p) const {
    using std::cos;
    const T den = p * p + kappa_ * kappa_;
    return std::complex<double>(0.0, -2.0) * norm_ * p *
           cos(0.5 * p * r_) / (den * den);
  }

 private:
  double lambda_ = 0.0;
  double r_ = 0.0;
  double kappa_ = 0.0;
  double norm_ = 0.0;
};

}  // namespace sfa
