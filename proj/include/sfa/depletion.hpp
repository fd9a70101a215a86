#pragma once

#include <complex>
#include <string>
#include <vector>

#include "sfa/pulse.hpp"
#include "sfa/separable_target.hpp"

namespace sfa {

// Quasi-static tunneling rate parameters. The effective quantum numbers
// follow the usual convention n* = Z / sqrt(2 Ip), l* = n* - 1.
struct AdkParams {
  double ip = 0.5;  // ionization potential (a.u.)
  double z = 1.0;   // residual core charge
  int l = 0;        // orbital quantum number
  int m = 0;        // magnetic quantum number

  double n_star() const { return z / std::sqrt(2.0 * ip); }
  double l_star() const { return n_star() - 1.0; }
  // |C_{n* l*}|^2 = 2^{2n*} / (n* Gamma(n*+l*+1) Gamma(n*-l*)).
  double c_sq() const;
  // f_{lm} = (2l+1)(l+|m|)! / (2^{|m|} |m|! (l-|m|)!).
  double f_lm() const;
  void validate() const;
};

// Static tunneling rate at field strength F > 0; continuous extension by 0
// at F <= 0 (the exponential dominates every power). Evaluated in log space
// so extreme prefactor/exponential cancellations cannot overflow.
double adk_rate(const AdkParams& prm, double field);

// Ground-state amplitude sampled on an increasing time grid, with linear
// interpolation between nodes. a(0) = 1; rate-based strategies keep |a| <= 1
// and non-increasing exactly, while the integro-differential strategies can
// carry a transient ~1e-4 excess above one from the counter-rotating part of
// the kernel, hence the adjustable magnitude slack.
struct AmplitudeTrack {
  std::vector<double> times;
  std::vector<std::complex<double>> a;

  std::complex<double> at(double t) const;
  void validate(double magnitude_slack = 1e-9) const;
};

enum class AdkField {
  envelope,       // F(t) = pulse envelope amplitude
  instantaneous,  // F(t) = |E(t)|
};

// W is a population rate; downstream formulas multiply amplitudes, so the
// default track carries exp(-1/2 int W). The population convention squares
// it.
enum class AdkConvention { amplitude, population };

AmplitudeTrack adk_amplitude(const LaserPulse& pulse, const AdkParams& prm,
                             const std::vector<double>& grid,
                             AdkField field_mode = AdkField::envelope,
                             AdkConvention convention = AdkConvention::amplitude);

enum class KernelQuadrature { saddle_point, grid };

struct DepletionKernelOptions {
  KernelQuadrature quadrature = KernelQuadrature::saddle_point;
  // The kernel as printed has no conjugate on the t-side dipole; the
  // conjugated variant applies it together with the sign the second-order
  // prefactor supplies, so for real orbitals the two coincide exactly.
  bool conjugate_first_dipole = false;
  // Regularizer in the wave-packet spreading factor (2 pi/(delta+i tau))^3/2.
  double spreading_delta = 0.05;
  // Grid-quadrature resolution: radial Boole panels (auto-densified against
  // the tau q^2/2 phase), Boole panels in cos(theta), trapezoid points in
  // the azimuth.
  int radial_panels = 64;
  int angular_panels = 12;
  int azimuthal_points = 12;
};

// Second-order ionization kernel gamma(t, t') of the ground-state amplitude
// equation da/dt = int_0^t gamma(t,t') a(t') dt': the 3D momentum integral
// of E(t).d(p-alpha(t)) E(t').d(p-alpha(t')) exp(-i S(p,t,t')). The action
// is exactly quadratic in p, so the saddle-point mode is exact up to the
// dipole prefactors frozen at the stationary momentum; grid mode integrates
// the prefactors numerically in the frame of that Gaussian.
std::complex<double> sfa_depletion_kernel(const SeparableTarget& target,
                                          const LaserPulse& pulse, double t,
                                          double t_prime,
                                          const DepletionKernelOptions& opt = {});

enum class DepletionMode { markov, full_integrodiff };

// Ground-state amplitude from the SFA kernel on the given grid. Markov mode
// replaces a(t') -> a(t) and exponentiates the accumulated rate; full mode
// marches the Volterra equation with trapezoidal product quadrature
// (second order in the step).
AmplitudeTrack sfa_depletion(const SeparableTarget& target,
                             const LaserPulse& pulse, DepletionMode mode,
                             const std::vector<double>& grid,
                             const DepletionKernelOptions& opt = {});

AmplitudeTrack unit_amplitude(const std::vector<double>& grid);

// CSV with columns t_au, re_a, im_a ('#' comments allowed). Parse or
// invariant failures throw io_error.
AmplitudeTrack load_amplitude_table(const std::string& path);

// Dispatch for the config key
//   depletion = unit | adk_envelope | adk_instantaneous | sfa_markov |
//               sfa_full | table:<path>
struct DepletionChoice {
  enum class Kind {
    unit,
    adk_envelope,
    adk_instantaneous,
    sfa_markov,
    sfa_full,
    table,
  };
  Kind kind = Kind::unit;
  std::string table_path;
};

DepletionChoice parse_depletion_strategy(const std::string& text);

// Runs the chosen strategy on the grid. adk may be null unless an ADK
// strategy is chosen; target may be null unless an SFA strategy is chosen.
AmplitudeTrack compute_amplitude(const DepletionChoice& choice,
                                 const LaserPulse& pulse,
                                 const std::vector<double>& grid,
                                 const AdkParams* adk,
                                 const SeparableTarget* target,
                                 const DepletionKernelOptions& opt = {});

}  // namespace sfa
