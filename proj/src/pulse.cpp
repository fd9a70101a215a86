#include "sfa/pulse.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sfa/constants.hpp"

namespace sfa {

namespace {

constexpr double kPi = std::numbers::pi;

TrigSeries sum(const TrigSeries& f, const TrigSeries& g, double freq_eps) {
  TrigSeries r(f.constant() + g.constant(), f.slope() + g.slope(), {});
  for (const auto& t : f.terms()) r.add_term(t.amp, t.freq, t.phase, freq_eps);
  for (const auto& t : g.terms()) r.add_term(t.amp, t.freq, t.phase, freq_eps);
  return r;
}

// Fixes the antiderivative's constant so that F(0) = 0.
TrigSeries antiderivative_from_zero(const TrigSeries& f) {
  TrigSeries a = f.antiderivative();
  return TrigSeries(a.constant() - a.eval(0.0), a.slope(), a.terms());
}

}  // namespace

Envelope envelope_from_string(const std::string& name) {
  if (name == "flat") return Envelope::flat;
  if (name == "sin2_on_vector_potential")
    return Envelope::sin2_on_vector_potential;
  if (name == "sin2_on_field") return Envelope::sin2_on_field;
  throw std::domain_error("unknown envelope kind: " + name);
}

std::string to_string(Envelope e) {
  switch (e) {
    case Envelope::flat:
      return "flat";
    case Envelope::sin2_on_vector_potential:
      return "sin2_on_vector_potential";
    case Envelope::sin2_on_field:
      return "sin2_on_field";
  }
  return "?";
}

LaserPulse::LaserPulse(const PulseParams& p) : prm_(p) {
  if (!(p.omega0 > 0.0)) throw std::domain_error("pulse: omega0 must be > 0");
  if (p.e0_au < 0.0) throw std::domain_error("pulse: e0 must be >= 0");
  if (!(p.n_cycles >= 1.0))
    throw std::domain_error("pulse: n_cycles must be >= 1");
  if (p.ellipticity < 0.0 || p.ellipticity > 1.0)
    throw std::domain_error("pulse: ellipticity must be in [0,1]");

  t_final_ = 2.0 * kPi * p.n_cycles / p.omega0;

  // Orthonormal polarization frame.
  double n1 = norm(p.axis1);
  if (n1 < 1e-12) throw std::domain_error("pulse: axis1 is degenerate");
  ax1_ = (1.0 / n1) * p.axis1;
  Vec3 a2 = p.axis2 - dot(ax1_, p.axis2) * ax1_;
  double n2 = norm(a2);
  if (p.ellipticity > 0.0 && n2 < 1e-12)
    throw std::domain_error("pulse: axis2 is parallel to axis1");
  ax2_ = (n2 < 1e-12) ? Vec3{0.0, 1.0, 0.0} : (1.0 / n2) * a2;

  const double scale = 1.0 / std::sqrt(1.0 + p.ellipticity * p.ellipticity);
  const double amp1 = p.e0_au * scale;
  const double amp2 = p.e0_au * p.ellipticity * scale;
  const double w = p.omega0;
  const double feps = 1e-9 * w;

  auto build_drift = [&](double amp, double phi) -> TrigSeries {
    TrigSeries alpha;
    switch (prm_.envelope) {
      case Envelope::flat:
        // E = amp sin(wt+phi)  =>  alpha = -(amp/w) cos(wt+phi), zero mean.
        alpha.add_term(-amp / w, w, phi, feps);
        return alpha;
      case Envelope::sin2_on_vector_potential:
        // alpha = -(amp/w) sin^2(wt/2Nc) cos(wt+phi)
        //       = -(amp/2w) cos(wt+phi)
        //         + (amp/4w)[cos(w(1-1/Nc)t+phi) + cos(w(1+1/Nc)t+phi)]
        alpha.add_term(-amp / (2.0 * w), w, phi, feps);
        alpha.add_term(amp / (4.0 * w), w * (1.0 - 1.0 / prm_.n_cycles), phi,
                       feps);
        alpha.add_term(amp / (4.0 * w), w * (1.0 + 1.0 / prm_.n_cycles), phi,
                       feps);
        return alpha;
      case Envelope::sin2_on_field: {
        // E = amp sin^2(wt/2Nc) sin(wt+phi); alpha = int_0^t E.
        TrigSeries efield;
        efield.add_term(amp / 2.0, w, phi - kPi / 2.0, feps);
        efield.add_term(-amp / 4.0, w * (1.0 - 1.0 / prm_.n_cycles),
                        phi - kPi / 2.0, feps);
        efield.add_term(-amp / 4.0, w * (1.0 + 1.0 / prm_.n_cycles),
                        phi - kPi / 2.0, feps);
        if (std::abs(efield.constant()) > 1e-15 * amp)
          throw std::domain_error(
              "pulse: single-cycle sin2_on_field with this CEP has a DC field "
              "component; use sin2_on_vector_potential");
        // Drop the sub-roundoff DC residue so downstream antiderivatives
        // stay slope-free.
        return antiderivative_from_zero(
            TrigSeries(0.0, 0.0, efield.terms()));
      }
    }
    throw std::logic_error("pulse: unhandled envelope");
  };

  a1_ = build_drift(amp1, p.cep);
  a2_ = build_drift(amp2, p.cep - kPi / 2.0);  // pi/2 carrier-phase lag
  e1_ = a1_.derivative();
  e2_ = a2_.derivative();
  ia1_ = antiderivative_from_zero(a1_);
  ia2_ = antiderivative_from_zero(a2_);
  isq1_ = antiderivative_from_zero(TrigSeries::product(a1_, a1_, feps));
  TrigSeries isq2 =
      antiderivative_from_zero(TrigSeries::product(a2_, a2_, feps));
  isq_ = sum(isq1_, isq2, feps);
}

void LaserPulse::check_domain(double t) const {
  if (!enveloped()) return;
  const double slack = 1e-9 * t_final_;
  if (t < -slack || t > t_final_ + slack)
    throw std::domain_error("pulse: t outside [0, t_final]");
}

Vec3 LaserPulse::electric_field(double t) const {
  check_domain(t);
  return field(t);
}

Vec3 LaserPulse::vector_potential(double t) const {
  check_domain(t);
  return -1.0 * drift(t);
}

double LaserPulse::field_envelope(double t) const {
  check_domain(t);
  const double eps = prm_.ellipticity;
  const double amp = prm_.e0_au / std::sqrt(1.0 + eps * eps);
  if (prm_.envelope == Envelope::flat) return amp;
  const double s = std::sin(prm_.omega0 * t / (2.0 * prm_.n_cycles));
  return amp * s * s;
}

double LaserPulse::up_au() const {
  const double e0 = prm_.e0_au;
  return e0 * e0 / (4.0 * prm_.omega0 * prm_.omega0);
}

double ponderomotive_energy_au(const LaserPulse& pulse) {
  return pulse.up_au();
}

double ponderomotive_energy_ev(double intensity_wcm2, double lambda_nm) {
  return up_ev_constant * intensity_wcm2 * lambda_nm * lambda_nm;
}

double keldysh_parameter(const LaserPulse& pulse, double ip_au) {
  const double up = pulse.up_au();
  if (!(up > 0.0)) throw std::domain_error("keldysh: Up must be > 0");
  if (!(ip_au > 0.0)) throw std::domain_error("keldysh: Ip must be > 0");
  return std::sqrt(ip_au / (2.0 * up));
}

}  // namespace sfa
