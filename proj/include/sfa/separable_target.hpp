#pragma once

#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "sfa/quadrature.hpp"
#include "sfa/vec3.hpp"

namespace sfa {

// Molecular orbital form factor phi(p) = sum_i w_i exp(i p.R_i) phi~(|p|).
// The radial profile phi~ is entire (Gaussian) or rational (Lorentzian), so
// phi continues to complex momentum vectors, which saddle-point evaluation
// relies on.
struct FormFactor {
  enum class Profile { gaussian, lorentzian };

  Profile profile = Profile::gaussian;
  double width = 1.0;  // Gaussian momentum width w, or Lorentzian scale s
  std::vector<Vec3> centers = {Vec3{0.0, 0.0, 0.0}};
  std::vector<std::complex<double>> weights = {{1.0, 0.0}};

  template <class T>
  T radial(T p) const {
    if (profile == Profile::gaussian)
      return exp(-0.5 * width * width * p * p);
    return 1.0 / (p * p + width * width);
  }

  // phi~'(p)/p, finite at p = 0 for both profiles.
  template <class T>
  T radial_deriv_over_p(T p) const {
    if (profile == Profile::gaussian)
      return -width * width * radial(p);
    const T r = radial(p);
    return -2.0 * r * r;
  }

  template <class T>
  std::complex<double> value(const V3<T>& p) const {
    const std::complex<double> rad = radial(magnitude(p));
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < centers.size(); ++i)
      acc += weights[i] * std::exp(std::complex<double>(0.0, 1.0) *
                                   std::complex<double>(dot(p, centers[i])));
    return acc * rad;
  }

  template <class T>
  CVec3 gradient(const V3<T>& p) const {
    const std::complex<double> rad = radial(magnitude(p));
    const std::complex<double> dr_over_p = radial_deriv_over_p(magnitude(p));
    CVec3 acc{};
    const std::complex<double> iu(0.0, 1.0);
    for (std::size_t i = 0; i < centers.size(); ++i) {
      const std::complex<double> ph =
          weights[i] *
          std::exp(iu * std::complex<double>(dot(p, centers[i])));
      acc += ph * (iu * rad * to_cvec(centers[i]) + dr_over_p * to_cvec(p));
    }
    return acc;
  }

  bool single_center_origin_real() const;
  // Momentum beyond which the radial profile no longer contributes at
  // double precision (Gaussian) or only through the algebraic tail
  // (Lorentzian).
  double momentum_cutoff() const;
  void validate() const;

 private:
  template <class T>
  static T magnitude(const V3<T>& p) {
    using std::sqrt;
    return sqrt(dot(p, p));
  }
  static CVec3 to_cvec(const Vec3& v) { return to_complex(v); }
  static CVec3 to_cvec(const CVec3& v) { return v; }
};

// Single-bound-state atom/molecule with the non-local separable potential
// V(p,p') = -gamma phi(p) phi*(p'). Bound state, scattering states,
// bound-free dipole and continuum-continuum rescattering matrix elements
// are closed forms in phi and the resolvent function
// A(k) = 2 gamma int d3p |phi(p)|^2 / (p^2 + k^2).
class SeparableTarget {
 public:
  // Solves the binding energy ip and normalization from gamma; throws
  // convergence_error naming the critical coupling when gamma is too weak
  // to bind.
  SeparableTarget(FormFactor ff, double gamma, double epsilon = 1e-3);

  // Inverse construction: fixes ip, derives gamma from the bound-state
  // condition.
  static SeparableTarget with_ip(FormFactor ff, double ip,
                                 double epsilon = 1e-3);

  const FormFactor& form_factor() const { return ff_; }
  double gamma() const { return gamma_; }
  double ip() const { return ip_; }
  double norm() const { return norm_; }
  double epsilon() const { return eps_; }
  double critical_gamma() const;

  // A(k) by pole-subtracted radial quadrature; valid for Re k > 0.
  std::complex<double> a_function(std::complex<double> k) const;
  // Cached A(i q + eps) and A(-i q + eps) = conj for real q >= 0 (spline
  // over the solver's momentum window, direct quadrature beyond it).
  std::complex<double> a_outgoing(double q) const;
  std::complex<double> a_conjugate(double q) const;

  std::complex<double> bound_wavefunction(const Vec3& p) const;
  // Correction delta-Psi_{p0}(p) to the plane wave in the scattering state
  // with asymptotic momentum p0.
  std::complex<double> scattering_correction(const Vec3& p,
                                             const Vec3& p0) const;

  // Bound-free dipole matrix element d(p0) (charge included).
  CVec3 dipole(const Vec3& p0) const;
  // Analytic continuation for saddle-point work; requires a single real
  // center at the origin, where the closed form is entire.
  CVec3 dipole(const CVec3& p0) const;

  // Non-singular part g(p1,p2) of the continuum-continuum matrix element
  // e<p1|x|p2> (the i e grad-delta part excluded).
  CVec3 rescattering(const Vec3& p1, const Vec3& p2) const;

  bool supports_complex_momentum() const {
    return ff_.single_center_origin_real();
  }

 private:
  std::complex<double> radial_pair_sum(
      double p, const std::vector<double>& dmag) const;
  void build_a_cache() const;

  FormFactor ff_;
  double gamma_ = 0.0;
  double eps_ = 1e-3;
  double ip_ = 0.0;
  double norm_ = 0.0;
  double p_cut_ = 0.0;

  mutable std::once_flag cache_flag_;
  mutable std::unique_ptr<CubicSpline> a_cache_;
  mutable double cache_qmax_ = 0.0;
};

}  // namespace sfa
