#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "sfa/depletion.hpp"
#include "sfa/pulse.hpp"
#include "sfa/separable_target.hpp"
#include "sfa/vec3.hpp"

namespace sfa {

// Semiclassical action S(p, t, t') = int_{t'}^{t} [ (p - alpha)^2/2 + Ip ] dtau
// for a drifting continuum electron. The pulse carries exact trigonometric
// antiderivatives of alpha and alpha^2 for every supported envelope, so the
// action is evaluated in closed form,
//   S = (p^2/2 + Ip)(t - t') - p.(Ia(t) - Ia(t')) + (Is(t) - Is(t'))/2,
// with Ia = int alpha, Is = int alpha^2. Both factors continue analytically,
// hence the complex overload accepts complex momenta and times. For real
// arguments S is real and additive: S(p,t,t') = S(p,t,s) + S(p,s,t').
class Action {
 public:
  Action(const LaserPulse& pulse, double ip);

  double ip() const { return ip_; }
  const LaserPulse& pulse() const { return *pulse_; }

  double operator()(const Vec3& p, double t, double t_prime) const;
  std::complex<double> operator()(const CVec3& p, std::complex<double> t,
                                  std::complex<double> t_prime) const;

 private:
  const LaserPulse* pulse_;
  double ip_;
};

enum class AmplitudeKind { direct_b0, rescattered_b1, total };
enum class GridAxes { polar, cartesian };

// Transition amplitudes sampled on a rectangular momentum grid in the
// polarization plane. Polar axes hold (|p|, theta) with direction
// cos(theta) axis1 + sin(theta) axis2; cartesian axes hold the two in-plane
// components directly. Momenta are kinetic (detector) momenta: amplitudes
// are evaluated at canonical p = p_kin + alpha(t_end), which coincides with
// p_kin whenever the vector potential closes to zero at the pulse end.
// Values are stored row-major with the second axis fastest.
struct AmplitudeGrid {
  GridAxes axes = GridAxes::polar;
  std::vector<double> axis_a;  // |p| (polar) or axis1 component (cartesian)
  std::vector<double> axis_b;  // theta (polar) or axis2 component (cartesian)
  std::vector<std::complex<double>> values;
  AmplitudeKind kind = AmplitudeKind::direct_b0;

  std::size_t index(std::size_t ia, std::size_t ib) const {
    return ia * axis_b.size() + ib;
  }
  // Kinetic momentum vector of a node, before the alpha(t_end) shift.
  Vec3 momentum(const LaserPulse& pulse, std::size_t ia, std::size_t ib) const;
  // Sizes consistent, axes strictly increasing (cartesian) or nonempty
  // (polar), every value finite. Throws std::domain_error.
  void validate() const;
};

// Time-domain expectation value series, e.g. the radiating dipole <r>(t).
struct DipoleSeries {
  std::vector<double> times;
  std::vector<Vec3> values;
  // Matching sizes, strictly increasing times, finite values.
  void validate() const;
};

enum class TimeQuadrature {
  dense_simpson,      // composite Simpson on the phase-resolved grid
  filon_linear_phase  // per-panel linear phase, exact oscillatory weights
};

enum class IntermediateMode {
  spa_over_p_prime,  // stationary phase about p_st with Gaussian spreading
  grid               // explicit radial-shell quadrature about p_st
};

struct SingleAtomOptions {
  TimeQuadrature quadrature = TimeQuadrature::dense_simpson;

  // Node density: points per shortest phase period 2 pi / max|dS/dt'|. The
  // default keeps the phase advance per step near 2 pi / 40; anything below
  // 4 pi would allow steps past 0.5 rad and is rejected.
  double points_per_period = 40.0;
  // Density of the inner t'' integral in the rescattering amplitude;
  // 0 inherits points_per_period.
  double inner_points_per_period = 0.0;

  // Hard cap on quadrature nodes per time integral. Exceeding it raises
  // convergence_error carrying the phase-per-step the cap would force.
  std::size_t max_nodes = std::size_t(1) << 22;

  // Regulator delta in the spreading factor (2 pi / (delta + i tau))^{3/2}
  // of stationary-phase momentum integrals.
  double spreading_delta = 0.05;

  // Multiplies the rescattering matrix element g; 0 switches rescattering
  // off entirely (b1 = 0 without touching the target).
  double coupling_scale = 1.0;

  // Restrict the excursion time t' - t'' of the rescattering inner integral
  // to this many laser cycles; 0 keeps the full range.
  double inner_window_cycles = 0.0;

  IntermediateMode intermediate = IntermediateMode::spa_over_p_prime;
  // Explicit-grid resolution: Boole panels in cos(theta), trapezoid points
  // in the azimuth, minimum radial Boole panels (auto-densified against the
  // tau q^2 / 2 chirp). Intended for compact form factors; the radial span
  // follows the target's momentum cutoff.
  int grid_angular_panels = 4;
  int grid_azimuthal_points = 6;
  int grid_radial_panels = 32;

  // Worker threads for momentum/time maps; 0 uses the hardware count.
  // Results are reduced in fixed index order, so they do not depend on the
  // worker count.
  int n_workers = 0;

  // All constraints above; collects every violation. Throws config_error.
  void validate() const;
};

// Direct (no-rescattering) ionization amplitude
//   b0(p, t) = i int_0^t dt' E(t').d(p - alpha(t')) a(t') e^{-i S(p,t,t')}.
std::complex<double> direct_amplitude(const SeparableTarget& target,
                                      const LaserPulse& pulse,
                                      const AmplitudeTrack& a, const Vec3& p,
                                      double t_end,
                                      const SingleAtomOptions& opt = {});

// Single-rescattering amplitude
//   b1(p, t) = - int_0^t dt' e^{-i S(p,t,t')}
//              int_0^{t'} dt'' int d^3p' [E(t').g(p - alpha', p' - alpha')]
//              [E(t'').d(p' - alpha'')] a(t'') e^{-i S(p',t',t'')}.
// The p' integral runs by stationary phase about p_st = (Ia(t')-Ia(t''))/tau
// (the action is exactly quadratic about it) or on an explicit shell grid.
std::complex<double> rescattering_amplitude(const SeparableTarget& target,
                                            const LaserPulse& pulse,
                                            const AmplitudeTrack& a,
                                            const Vec3& p, double t_end,
                                            const SingleAtomOptions& opt = {});

// Batched evaluation over a momentum grid. For rescattered amplitudes the
// momentum-independent inner factors are shared across the whole batch, so
// this is far cheaper than per-point calls.
AmplitudeGrid amplitude_grid(const SeparableTarget& target,
                             const LaserPulse& pulse, const AmplitudeTrack& a,
                             AmplitudeKind kind, GridAxes axes,
                             std::vector<double> axis_a,
                             std::vector<double> axis_b, double t_end,
                             const SingleAtomOptions& opt = {});

// |b0 + b1|^2 split into its exact four contributions,
//   total = |b0|^2 + |b1|^2 + (b0 conj(b1) + c.c.),
// on the common momentum grid of the two inputs. Mismatched axes or kinds
// throw std::domain_error.
struct AtiSpectrum {
  GridAxes axes = GridAxes::polar;
  std::vector<double> axis_a;
  std::vector<double> axis_b;
  std::vector<double> direct_sq;        // |b0|^2
  std::vector<double> rescattered_sq;   // |b1|^2
  std::vector<double> cross;            // 2 Re[b0 conj(b1)]
  std::vector<double> total;

  std::size_t index(std::size_t ia, std::size_t ib) const {
    return ia * axis_b.size() + ib;
  }
};
AtiSpectrum ati_spectrum(const AmplitudeGrid& b0, const AmplitudeGrid& b1);

// Angle-integrated energy distribution dP/dE = p int |b|^2 dOmega at
// E = p^2/2, assuming azimuthal symmetry about the polarization plane:
// the theta axis is treated as the polar angle and integrated with
// trapezoidal weights over its covered range. Requires a polar grid with
// at least two angles.
struct EnergySpectrum {
  std::vector<double> energy;  // p^2 / 2
  std::vector<double> dp_de;
};
EnergySpectrum energy_spectrum(const AtiSpectrum& spectrum);

// Time-dependent dipole expectation value driving harmonic emission,
//   <r>(t) = Re[ i int_0^t dt' (2 pi / (delta + i tau))^{3/2}
//            conj(a(t)) conj(d(p_st - alpha(t))) [E(t').d(p_st - alpha(t'))]
//            a(t') e^{-i S(p_st, t, t')} ],
// with the momentum integral taken by stationary phase at each (t, t').
DipoleSeries hhg_dipole(const SeparableTarget& target, const LaserPulse& pulse,
                        const AmplitudeTrack& a,
                        const std::vector<double>& times,
                        const SingleAtomOptions& opt = {});

enum class SpectrumWindow { hann, none };

// Discrete spectrum of a dipole series on a uniform time grid:
//   r~(Omega_k) = sum_j w_j r(t_j) e^{+i Omega_k t_j} dt,
// reported against harmonic order Omega_k / omega0 with
// Omega_k = 2 pi k / (N dt). Intensity sums |r~_i|^2 over the three
// components; the phase is arg r~ of the component with the largest
// integrated power. Non-uniform grids throw std::domain_error.
struct HarmonicSpectrum {
  std::vector<double> order;
  std::vector<double> intensity;
  std::vector<double> phase;
};
HarmonicSpectrum harmonic_spectrum(const DipoleSeries& series, double omega0,
                                   SpectrumWindow window = SpectrumWindow::hann);

}  // namespace sfa
