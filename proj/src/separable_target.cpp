#include "sfa/separable_target.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "sfa/constants.hpp"
#include "sfa/errors.hpp"
#include "sfa/radial_integral.hpp"
#include "sfa/rootfind.hpp"

namespace sfa {

namespace {

using C = std::complex<double>;
constexpr double kPi = std::numbers::pi;
constexpr C kI(0.0, 1.0);

// Closed-form spherical Bessel functions. The library versions refuse large
// arguments, and the tail transforms below push p |R_i - R_j| well past that
// guard. Small arguments switch to the Taylor series to avoid cancellation.
double sph_j0(double x) {
  const double ax = std::abs(x);
  if (ax < 1e-2) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0);
  }
  return std::sin(x) / x;
}

double sph_j1(double x) {
  const double ax = std::abs(x);
  if (ax < 1e-2) {
    const double x2 = x * x;
    return x / 3.0 * (1.0 - x2 / 10.0 * (1.0 - x2 / 28.0));
  }
  return (std::sin(x) / x - std::cos(x)) / x;
}

}  // namespace

bool FormFactor::single_center_origin_real() const {
  return centers.size() == 1 && norm(centers[0]) == 0.0 &&
         weights.size() == 1 && weights[0].imag() == 0.0;
}

double FormFactor::momentum_cutoff() const {
  if (profile == Profile::gaussian) return 6.5 / width;
  return std::max(40.0 * width, 40.0);
}

void FormFactor::validate() const {
  if (!(width > 0.0))
    throw std::domain_error("form factor: width must be > 0");
  if (centers.empty())
    throw std::domain_error("form factor: at least one center required");
  if (weights.size() != centers.size())
    throw std::domain_error(
        "form factor: weights and centers must have equal length");
}

// |phi(p)|^2 integrated over angles, divided by 4 pi p^2: returns
// sum_ij w_i w_j* j0(p |R_i - R_j|) phi~(p)^2, which is real.
std::complex<double> SeparableTarget::radial_pair_sum(
    double p, const std::vector<double>& dmag) const {
  const double rad = ff_.radial(p);
  C acc = 0.0;
  const std::size_t n = ff_.centers.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      acc += ff_.weights[i] * std::conj(ff_.weights[j]) *
             sph_j0(p * dmag[i * n + j]);
  return acc * rad * rad;
}

C SeparableTarget::a_function(C k) const {
  const std::size_t n = ff_.centers.size();
  std::vector<double> dmag(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      dmag[i * n + j] = sfa::norm(ff_.centers[i] - ff_.centers[j]);
  const double pcut =
      std::max(ff_.momentum_cutoff(), 1.3 * std::abs(k.imag()) + 2.0);
  auto kernel = [&](double p) -> C {
    return 4.0 * kPi * p * p * radial_pair_sum(p, dmag);
  };
  return 2.0 * gamma_ * pole_weighted_integral(kernel, k, 1, pcut, 1e-12);
}

void SeparableTarget::build_a_cache() const {
  cache_qmax_ = std::max(12.0, 1.5 * p_cut_);
  const int n_nodes = 2048;
  std::vector<C> vals(n_nodes);
  const double dq = cache_qmax_ / (n_nodes - 1);
  for (int i = 0; i < n_nodes; ++i)
    vals[i] = a_function(C(eps_, i * dq));
  a_cache_ = std::make_unique<CubicSpline>(0.0, dq, std::move(vals));
}

C SeparableTarget::a_outgoing(double q) const {
  if (q < 0.0) throw std::domain_error("a_outgoing: q must be >= 0");
  std::call_once(cache_flag_, [this] { build_a_cache(); });
  if (q > cache_qmax_) return a_function(C(eps_, q));
  return (*a_cache_)(q);
}

C SeparableTarget::a_conjugate(double q) const {
  return std::conj(a_outgoing(q));
}

double SeparableTarget::critical_gamma() const {
  // Bound state exists iff the zero-binding limit satisfies
  // 2 gamma int |phi|^2 / p^2 d3p >= 1; the p^2 factors cancel, so the
  // radial integrand 4 pi * pair_sum is bounded at p = 0.
  const std::size_t n = ff_.centers.size();
  std::vector<double> dmag(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      dmag[i * n + j] = sfa::norm(ff_.centers[i] - ff_.centers[j]);
  auto kernel = [&](double p) -> C {
    return 4.0 * kPi * radial_pair_sum(p, dmag);
  };
  const double pcut = ff_.momentum_cutoff();
  C q0 = adaptive_simpson(kernel, 0.0, pcut, 1e-13, 48);
  // Tail via u = 1/p; the integrand decays at least like p^-4.
  auto tail = [&](double u) -> C {
    if (u <= 0.0) return C(0.0);
    return kernel(1.0 / u) / (u * u);
  };
  q0 += adaptive_simpson(tail, 0.0, 1.0 / pcut, 1e-13, 40);
  return 1.0 / (2.0 * q0.real());
}

SeparableTarget::SeparableTarget(FormFactor ff, double gamma, double epsilon)
    : ff_(std::move(ff)), gamma_(gamma), eps_(epsilon) {
  ff_.validate();
  if (!(gamma > 0.0))
    throw std::domain_error("separable target: gamma must be > 0");
  if (!(epsilon > 0.0))
    throw std::domain_error("separable target: epsilon must be > 0");
  p_cut_ = ff_.momentum_cutoff();

  auto residual = [this](double ip) {
    return a_function(C(std::sqrt(2.0 * ip), 0.0)).real() - 1.0;
  };
  const double lo = 1e-12;
  if (residual(lo) <= 0.0) {
    std::ostringstream msg;
    msg << "separable target: no bound state at gamma = " << gamma_
        << "; critical gamma = " << critical_gamma();
    throw convergence_error(msg.str());
  }
  double hi = 1.0;
  while (residual(hi) > 0.0) {
    hi *= 2.0;
    if (hi > 1e7)
      throw convergence_error("separable target: bound-state bracket failed");
  }
  ip_ = brent_root(residual, lo, hi, 3e-14 * std::max(1.0, hi));

  // Normalization: 1 = N^2 int |phi|^2 / (p^2/2 + Ip)^2 d3p.
  const std::size_t n = ff_.centers.size();
  std::vector<double> dmag(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      dmag[i * n + j] = sfa::norm(ff_.centers[i] - ff_.centers[j]);
  auto kernel = [&](double p) -> C {
    return 4.0 * kPi * p * p * radial_pair_sum(p, dmag);
  };
  const C q2 = pole_weighted_integral(
      kernel, C(std::sqrt(2.0 * ip_), 0.0), 2, p_cut_, 1e-13);
  norm_ = 1.0 / std::sqrt(4.0 * q2.real());
}

SeparableTarget SeparableTarget::with_ip(FormFactor ff, double ip,
                                         double epsilon) {
  ff.validate();
  if (!(ip > 0.0))
    throw std::domain_error("separable target: ip must be > 0");
  const std::size_t n = ff.centers.size();
  std::vector<double> dmag(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      dmag[i * n + j] = sfa::norm(ff.centers[i] - ff.centers[j]);
  auto pair_sum = [&](double p) -> C {
    const double rad = ff.radial(p);
    C acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        acc += ff.weights[i] * std::conj(ff.weights[j]) *
               sph_j0(p * dmag[i * n + j]);
    return acc * rad * rad;
  };
  auto kernel = [&](double p) -> C {
    return 4.0 * kPi * p * p * pair_sum(p);
  };
  const C q = pole_weighted_integral(
      kernel, C(std::sqrt(2.0 * ip), 0.0), 1, ff.momentum_cutoff(), 1e-13);
  const double gamma = 1.0 / (2.0 * q.real());
  return SeparableTarget(std::move(ff), gamma, epsilon);
}

C SeparableTarget::bound_wavefunction(const Vec3& p) const {
  return norm_ * ff_.value(p) / (0.5 * dot(p, p) + ip_);
}

C SeparableTarget::scattering_correction(const Vec3& p,
                                         const Vec3& p0) const {
  const double p0m = sfa::norm(p0);
  if (!(p0m > 0.0))
    throw std::domain_error("scattering_correction: |p0| must be > 0");
  const C k(eps_, p0m);  // p^2 - (p0 - i eps)^2 = p^2 + k^2
  const C den = dot(p, p) + k * k;
  return 2.0 * gamma_ * ff_.value(p) * std::conj(ff_.value(p0)) /
         ((1.0 - a_outgoing(p0m)) * den);
}

CVec3 SeparableTarget::dipole(const Vec3& p0) const {
  const C ie = kI * electron_charge;
  const double c1 = 0.5 * dot(p0, p0) + ip_;
  CVec3 d = (ie * norm_ / c1) * ff_.gradient(p0) +
            (-ie * norm_ / (c1 * c1)) * (ff_.value(p0) * to_complex(p0));
  if (ff_.single_center_origin_real()) return d;

  const double p0m = sfa::norm(p0);
  const C k1(eps_, -p0m);  // p^2 - (p0 + i eps)^2 = p^2 + k1^2
  const double pcut = std::max(p_cut_, 1.3 * p0m + 2.0);
  const std::size_t n = ff_.centers.size();
  CVec3 integral{};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const Vec3 dvec = ff_.centers[i] - ff_.centers[j];
      const double dm = sfa::norm(dvec);
      const C wij = ff_.weights[i] * std::conj(ff_.weights[j]);
      auto g1 = [&](double p) -> C {
        const double r = ff_.radial(p);
        return 4.0 * kPi * p * p * sph_j0(p * dm) * r * r /
               (0.5 * p * p + ip_);
      };
      integral += (wij * kI *
                   pole_weighted_integral(g1, k1, 1, pcut, 1e-10)) *
                  to_complex(ff_.centers[i]);
      if (dm > 1e-14) {
        auto g2 = [&](double p) -> C {
          const double r = ff_.radial(p);
          const double rp = ff_.radial_deriv_over_p(p) * p;
          const double c = 0.5 * p * p + ip_;
          return 4.0 * kPi * p * p * sph_j1(p * dm) *
                 (r * rp / c - p * r * r / (c * c));
        };
        integral += (wij * kI *
                     pole_weighted_integral(g2, k1, 1, pcut, 1e-10) / dm) *
                    to_complex(dvec);
      }
    }
  }
  const C pref = 2.0 * kI * electron_charge * gamma_ * norm_ *
                 ff_.value(p0) / (1.0 - a_conjugate(p0m));
  return d + pref * integral;
}

CVec3 SeparableTarget::dipole(const CVec3& p0) const {
  if (!supports_complex_momentum())
    throw std::domain_error(
        "dipole: complex momentum requires a single real center at the "
        "origin");
  const C ie = kI * electron_charge;
  const C c1 = 0.5 * dot(p0, p0) + ip_;
  return (ie * norm_ / c1) * ff_.gradient(p0) +
         (-ie * norm_ / (c1 * c1)) * (ff_.value(p0) * p0);
}

CVec3 SeparableTarget::rescattering(const Vec3& p1, const Vec3& p2) const {
  const double p1m = sfa::norm(p1);
  const double p2m = sfa::norm(p2);
  if (!(p1m > 0.0) || !(p2m > 0.0))
    throw std::domain_error("rescattering: |p1| and |p2| must be > 0");

  const C ie = kI * electron_charge;
  const C k1(eps_, -p1m);  // conjugate-state pole: p^2 - (p1 + i eps)^2
  const C k2(eps_, p2m);   // outgoing-state pole:  p^2 - (p2 - i eps)^2
  const C c2 = 2.0 * gamma_ * std::conj(ff_.value(p2)) /
               (1.0 - a_outgoing(p2m));
  const C c1t = 2.0 * gamma_ * ff_.value(p1) / (1.0 - a_conjugate(p1m));

  // Boundary terms: gradients of the scattering corrections at p1 and p2.
  const C d21 = dot(p1, p1) + k2 * k2;
  CVec3 g = (ie * c2 / d21) * ff_.gradient(p1) +
            (-2.0 * ie * c2 * ff_.value(p1) / (d21 * d21)) * to_complex(p1);
  const C d12 = dot(p2, p2) + k1 * k1;
  g += (-ie * c1t / d12) * conj(ff_.gradient(p2)) +
       (2.0 * ie * c1t * std::conj(ff_.value(p2)) / (d12 * d12)) *
           to_complex(p2);

  if (ff_.single_center_origin_real()) return g;

  // Double-resolvent integral term; partial fractions split the
  // (p^2+k1^2)(p^2+k2^2) products into single- and double-pole pieces.
  const double pcut = std::max(p_cut_, 1.3 * std::max(p1m, p2m) + 2.0);
  const C a = k1 * k1;
  const C b = k2 * k2;
  const C inv_ba = 1.0 / (b - a);
  const std::size_t n = ff_.centers.size();
  CVec3 integral{};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const Vec3 dvec = ff_.centers[i] - ff_.centers[j];
      const double dm = sfa::norm(dvec);
      const C wij = ff_.weights[i] * std::conj(ff_.weights[j]);
      auto q1 = [&](double p) -> C {
        const double r = ff_.radial(p);
        return 4.0 * kPi * p * p * sph_j0(p * dm) * r * r;
      };
      const C j1v = inv_ba * (pole_weighted_integral(q1, k1, 1, pcut, 1e-10) -
                              pole_weighted_integral(q1, k2, 1, pcut, 1e-10));
      integral += (wij * kI * j1v) * to_complex(ff_.centers[i]);
      if (dm > 1e-14) {
        auto q2 = [&](double p) -> C {
          const double r = ff_.radial(p);
          const double rp = ff_.radial_deriv_over_p(p) * p;
          return 4.0 * kPi * p * p * sph_j1(p * dm) * r * rp;
        };
        auto q3 = [&](double p) -> C {
          const double r = ff_.radial(p);
          return -2.0 * 4.0 * kPi * p * p * p * sph_j1(p * dm) * r * r;
        };
        const C j2v =
            inv_ba * (pole_weighted_integral(q2, k1, 1, pcut, 1e-10) -
                      pole_weighted_integral(q2, k2, 1, pcut, 1e-10));
        const C j3v =
            inv_ba * inv_ba *
                (pole_weighted_integral(q3, k1, 1, pcut, 1e-10) -
                 pole_weighted_integral(q3, k2, 1, pcut, 1e-10)) -
            inv_ba * pole_weighted_integral(q3, k2, 2, pcut, 1e-10);
        integral += (wij * kI * (j2v + j3v) / dm) * to_complex(dvec);
      }
    }
  }
  return g + (ie * c1t * c2) * integral;
}

}  // namespace sfa
