#pragma once

#include <complex>
#include <string>

#include "sfa/trig_series.hpp"
#include "sfa/vec3.hpp"

namespace sfa {

enum class Envelope {
  flat,                      // monochromatic, defined for all t
  sin2_on_vector_potential,  // sin^2 envelope on A(t); A(0)=A(t_F)=0 exactly
  sin2_on_field,             // sin^2 envelope on E(t); net area may be nonzero
};

Envelope envelope_from_string(const std::string& name);
std::string to_string(Envelope e);

struct PulseParams {
  double e0_au = 0.0;    // peak field amplitude (a.u.)
  double omega0 = 0.0;   // carrier angular frequency (a.u.)
  double cep = 0.0;      // carrier-envelope phase phi0 (rad)
  double n_cycles = 1.0; // pulse length in optical cycles
  Envelope envelope = Envelope::sin2_on_vector_potential;
  double ellipticity = 0.0;  // 0 = linear, 1 = circular
  Vec3 axis1{1.0, 0.0, 0.0};
  Vec3 axis2{0.0, 1.0, 0.0};
};

// Laser pulse with closed-form drift momentum alpha(t) = e A(t)/c (e = -1,
// c absorbed). All time integrals entering semiclassical actions --
// int alpha, int |alpha|^2 -- are exact trigonometric series, so they can be
// evaluated at complex times without quadrature.
//
// Elliptical fields put amplitude E0/sqrt(1+eps^2) on axis1 and
// eps*E0/sqrt(1+eps^2) on axis2 with a pi/2 carrier-phase lag, keeping total
// intensity fixed as eps varies.
class LaserPulse {
 public:
  explicit LaserPulse(const PulseParams& p);

  const PulseParams& params() const { return prm_; }
  double omega0() const { return prm_.omega0; }
  double e0() const { return prm_.e0_au; }
  double duration() const { return t_final_; }
  bool enveloped() const { return prm_.envelope != Envelope::flat; }
  const Vec3& axis1() const { return ax1_; }
  const Vec3& axis2() const { return ax2_; }

  // Field and vector potential at real time; domain-checked for enveloped
  // pulses. vector_potential returns A(t) = -int_0^t E dt' = -alpha(t).
  Vec3 electric_field(double t) const;
  Vec3 vector_potential(double t) const;

  // Slowly varying field-amplitude scale: the major-axis amplitude
  // E0 f(t)/sqrt(1+eps^2), the carrier stripped. Quasi-static rates use
  // this as the local peak field.
  double field_envelope(double t) const;

  // Drift momentum alpha(t) and its integrals; complex-time capable.
  template <class T>
  V3<T> drift(T t) const {
    return comp_vec(a1_.eval(t), a2_.eval(t));
  }
  template <class T>
  V3<T> drift_integral(T t) const {
    return comp_vec(ia1_.eval(t), ia2_.eval(t));
  }
  template <class T>
  T drift_sq_integral(T t) const {
    return isq_.eval(t);
  }
  template <class T>
  V3<T> field(T t) const {
    return comp_vec(e1_.eval(t), e2_.eval(t));
  }

  // Scalar projections on axis1, for one-dimensional models.
  template <class T>
  T drift1(T t) const {
    return a1_.eval(t);
  }
  template <class T>
  T drift1_integral(T t) const {
    return ia1_.eval(t);
  }
  template <class T>
  T drift1_sq_integral(T t) const {
    return isq1_.eval(t);
  }
  template <class T>
  T field1(T t) const {
    return e1_.eval(t);
  }

  double up_au() const;

 private:
  template <class T>
  V3<T> comp_vec(T s1, T s2) const {
    return V3<T>(s1 * T(ax1_.x) + s2 * T(ax2_.x),
                 s1 * T(ax1_.y) + s2 * T(ax2_.y),
                 s1 * T(ax1_.z) + s2 * T(ax2_.z));
  }
  void check_domain(double t) const;

  PulseParams prm_;
  double t_final_ = 0.0;
  Vec3 ax1_, ax2_;
  TrigSeries a1_, a2_;    // drift components
  TrigSeries e1_, e2_;    // field components (exact derivatives)
  TrigSeries ia1_, ia2_;  // int_0^t drift components
  TrigSeries isq_;        // int_0^t (a1^2 + a2^2)
  TrigSeries isq1_;       // int_0^t a1^2
};

double ponderomotive_energy_au(const LaserPulse& pulse);
// Closed-form eV variant from laboratory parameters.
double ponderomotive_energy_ev(double intensity_wcm2, double lambda_nm);
double keldysh_parameter(const LaserPulse& pulse, double ip_au);

}  // namespace sfa
