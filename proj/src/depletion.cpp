#include "sfa/depletion.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "sfa/errors.hpp"

namespace sfa {

namespace {

using C = std::complex<double>;
constexpr double kPi = std::numbers::pi;
const C kI(0.0, 1.0);

double factorial(int n) {
  double r = 1.0;
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

void check_grid(const std::vector<double>& grid, double t_final) {
  if (grid.size() < 2)
    throw std::domain_error("amplitude grid needs at least two nodes");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw std::domain_error("amplitude grid must be strictly increasing");
  const double slack = 1e-9 * std::max(1.0, t_final);
  if (std::abs(grid.front()) > slack)
    throw std::domain_error("amplitude grid must start at t = 0");
  if (grid.back() > t_final + slack)
    throw std::domain_error("amplitude grid extends past the pulse end");
}

C cdot(const Vec3& e, const CVec3& d) {
  return e.x * d.x + e.y * d.y + e.z * d.z;
}

}  // namespace

double AdkParams::c_sq() const {
  const double ns = n_star();
  const double ls = l_star();
  return std::pow(2.0, 2.0 * ns) /
         (ns * std::tgamma(ns + ls + 1.0) * std::tgamma(ns - ls));
}

double AdkParams::f_lm() const {
  const int am = std::abs(m);
  return (2.0 * l + 1.0) * factorial(l + am) /
         (std::pow(2.0, am) * factorial(am) * factorial(l - am));
}

void AdkParams::validate() const {
  if (!(ip > 0.0)) throw std::domain_error("adk: ip must be > 0");
  if (!(z > 0.0)) throw std::domain_error("adk: core charge must be > 0");
  if (l < 0) throw std::domain_error("adk: l must be >= 0");
  if (l < std::abs(m)) throw std::domain_error("adk: l must be >= |m|");
  if (!(c_sq() > 0.0) || !std::isfinite(c_sq()))
    throw std::domain_error("adk: C^2 is not positive and finite");
  if (!(f_lm() > 0.0)) throw std::domain_error("adk: f_lm is not positive");
}

double adk_rate(const AdkParams& prm, double field) {
  prm.validate();
  if (!(field > 0.0)) return 0.0;
  const double kappa3 = 2.0 * std::pow(2.0 * prm.ip, 1.5);  // 2 (2 Ip)^{3/2}
  const double expo = 2.0 * prm.n_star() - std::abs(prm.m) - 1.5;
  const double log_w = std::log(prm.c_sq()) + 0.5 * std::log(6.0 / kPi) +
                       std::log(prm.f_lm()) + std::log(prm.ip) +
                       expo * std::log(kappa3 / field) -
                       kappa3 / (3.0 * field);
  return std::exp(log_w);
}

std::complex<double> AmplitudeTrack::at(double t) const {
  if (times.empty()) throw std::domain_error("amplitude track is empty");
  if (t <= times.front()) return a.front();
  if (t >= times.back()) return a.back();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - times.begin());
  const double w = (t - times[i - 1]) / (times[i] - times[i - 1]);
  return a[i - 1] + w * (a[i] - a[i - 1]);
}

void AmplitudeTrack::validate(double magnitude_slack) const {
  if (times.size() < 2 || times.size() != a.size())
    throw std::domain_error("amplitude track: need matching grids, >= 2 nodes");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw std::domain_error("amplitude track: times must increase");
  if (std::abs(a.front() - 1.0) > 1e-9)
    throw std::domain_error("amplitude track: a(0) must be 1");
  for (const auto& v : a)
    if (std::abs(v) > 1.0 + magnitude_slack)
      throw std::domain_error("amplitude track: |a| must stay <= 1");
}

AmplitudeTrack adk_amplitude(const LaserPulse& pulse, const AdkParams& prm,
                             const std::vector<double>& grid,
                             AdkField field_mode, AdkConvention convention) {
  prm.validate();
  check_grid(grid, pulse.duration());
  std::vector<double> w(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double f = field_mode == AdkField::envelope
                         ? pulse.field_envelope(grid[i])
                         : norm(pulse.electric_field(grid[i]));
    w[i] = adk_rate(prm, f);
  }
  AmplitudeTrack track;
  track.times = grid;
  track.a.resize(grid.size());
  const double half = convention == AdkConvention::amplitude ? 0.5 : 1.0;
  double acc = 0.0;
  track.a[0] = 1.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    acc += 0.5 * (grid[i] - grid[i - 1]) * (w[i - 1] + w[i]);
    track.a[i] = std::exp(-half * acc);
  }
  return track;
}

std::complex<double> sfa_depletion_kernel(const SeparableTarget& target,
                                          const LaserPulse& pulse, double t,
                                          double t_prime,
                                          const DepletionKernelOptions& opt) {
  if (t_prime < -1e-12 || t_prime > t + 1e-12 ||
      t > pulse.duration() * (1.0 + 1e-12) + 1e-12)
    throw std::domain_error("depletion kernel: need 0 <= t' <= t <= t_final");
  const double tau = std::max(0.0, t - t_prime);
  const Vec3 e_t = pulse.field(t);
  const Vec3 e_tp = pulse.field(t_prime);
  const Vec3 al_t = pulse.drift(t);
  const Vec3 al_tp = pulse.drift(t_prime);
  const Vec3 ia = pulse.drift_integral(t) - pulse.drift_integral(t_prime);
  const double ia2 =
      pulse.drift_sq_integral(t) - pulse.drift_sq_integral(t_prime);

  // Stationary momentum of the quadratic action; tau -> 0 limit is alpha(t).
  const Vec3 ps = tau > 1e-12 ? (1.0 / tau) * ia : al_t;
  const double action =
      tau > 1e-12
          ? target.ip() * tau + 0.5 * ia2 - 0.5 * dot(ia, ia) / tau
          : 0.0;
  const C phase = std::exp(-kI * action);

  auto pair_value = [&](const Vec3& p) -> C {
    const C d_t = cdot(e_t, target.dipole(p - al_t));
    const C d_tp = cdot(e_tp, target.dipole(p - al_tp));
    if (opt.conjugate_first_dipole) return -std::conj(d_t) * d_tp;
    return d_t * d_tp;
  };

  if (opt.quadrature == KernelQuadrature::saddle_point) {
    const C spread = std::pow(2.0 * kPi / (opt.spreading_delta + kI * tau), 1.5);
    return spread * pair_value(ps) * phase;
  }

  // Either field zero kills both dipole prefactors exactly; skip the grid.
  if (norm(e_t) * norm(e_tp) == 0.0) return C(0.0);

  // Grid mode: in the frame p = ps + q n^ the action is S(ps) + tau q^2/2
  // independently of direction, so only a radial Fresnel factor remains.
  const int n_u = std::max(2, opt.angular_panels);
  const int n_phi = std::max(3, opt.azimuthal_points);
  const double dphi = 2.0 * kPi / n_phi;
  auto shell = [&](double q, int nu) -> C {
    C acc = 0.0;
    const double hu = 2.0 / (4.0 * nu);
    static const double wb[5] = {7.0, 32.0, 12.0, 32.0, 7.0};
    for (int pu = 0; pu < nu; ++pu) {
      for (int j = 0; j <= 4; ++j) {
        const double u = -1.0 + (4.0 * pu + j) * hu;
        const double s = std::sqrt(std::max(0.0, 1.0 - u * u));
        C ring = 0.0;
        for (int k = 0; k < n_phi; ++k) {
          const Vec3 n{s * std::cos(k * dphi), s * std::sin(k * dphi), u};
          ring += pair_value(ps + q * n);
        }
        acc += (2.0 * hu / 45.0) * wb[j] * ring * dphi;
      }
    }
    return acc;
  };

  // Radial extent: march outward until the angular average of the dipole
  // pair is negligible against its running peak. The hard cap keeps the
  // slow algebraic Lorentzian tail from inflating the Fresnel grid.
  const double quiver_sep = 0.5 * norm(al_t - al_tp);
  const double hard_cap = target.form_factor().momentum_cutoff() + quiver_sep;
  const double covered = quiver_sep + 2.0;
  double rmax = covered;
  {
    double peak = 0.0;
    double q = 0.5;
    while (q < hard_cap) {
      const double probe = std::abs(shell(q, 2)) * q * q;
      peak = std::max(peak, probe);
      if (q >= covered && probe < 1e-8 * peak) break;
      q *= 1.3;
    }
    rmax = std::clamp(q, covered, hard_cap);
  }

  // Six Boole nodes per local Fresnel period at the outer edge keep the
  // chirp exp(-i tau q^2/2) resolved: panels >= 6 tau rmax^2 / (8 pi).
  const int n_r =
      std::max(opt.radial_panels,
               static_cast<int>(std::ceil(0.24 * tau * rmax * rmax)) + 2);

  C radial = 0.0;
  const double hr = rmax / (4.0 * n_r);
  static const double wb[5] = {7.0, 32.0, 12.0, 32.0, 7.0};
  for (int pr = 0; pr < n_r; ++pr) {
    for (int j = 0; j <= 4; ++j) {
      const double q = (4.0 * pr + j) * hr;
      const C fres = std::exp(-kI * (0.5 * tau * q * q));
      radial += (2.0 * hr / 45.0) * wb[j] * (q * q) * fres * shell(q, n_u);
    }
  }
  return radial * phase;
}

AmplitudeTrack sfa_depletion(const SeparableTarget& target,
                             const LaserPulse& pulse, DepletionMode mode,
                             const std::vector<double>& grid,
                             const DepletionKernelOptions& opt) {
  check_grid(grid, pulse.duration());
  const std::size_t n = grid.size();
  AmplitudeTrack track;
  track.times = grid;
  track.a.assign(n, 1.0);

  // Row of kernel values gamma(t_n, t_j), j = 0..n.
  std::vector<C> row(n);
  auto fill_row = [&](std::size_t nn) {
    for (std::size_t j = 0; j <= nn; ++j)
      row[j] = sfa_depletion_kernel(target, pulse, grid[nn], grid[j], opt);
  };
  auto trapezoid_row = [&](std::size_t nn, const std::vector<C>& vals) {
    C acc = 0.0;
    for (std::size_t j = 0; j + 1 <= nn; ++j)
      acc += 0.5 * (grid[j + 1] - grid[j]) * (vals[j] + vals[j + 1]);
    return acc;
  };

  if (mode == DepletionMode::markov) {
    // a' = G(t) a with G(t) = int_0^t gamma(t,t') dt'; exponentiate the
    // trapezoid-accumulated G.
    C log_a = 0.0;
    C g_prev = 0.0;  // G(0) = 0
    for (std::size_t nn = 1; nn < n; ++nn) {
      fill_row(nn);
      const C g = trapezoid_row(nn, row);
      log_a += 0.5 * (grid[nn] - grid[nn - 1]) * (g_prev + g);
      track.a[nn] = std::exp(log_a);
      g_prev = g;
    }
    return track;
  }

  // Volterra march: R(t) = int_0^t gamma(t,t') a(t') dt' enters the step
  // update a_n = a_{n-1} + h/2 (R_{n-1} + R_n); the t' = t_n corner of R_n
  // multiplies the unknown a_n, making each step a scalar linear solve.
  std::vector<C> weighted(n);
  C r_prev = 0.0;  // R(0) = 0
  for (std::size_t nn = 1; nn < n; ++nn) {
    fill_row(nn);
    for (std::size_t j = 0; j < nn; ++j) weighted[j] = row[j] * track.a[j];
    weighted[nn] = 0.0;
    const C partial = trapezoid_row(nn, weighted);
    const double h = grid[nn] - grid[nn - 1];
    const double w_corner = 0.5 * (grid[nn] - grid[nn - 1]);
    const C denom = 1.0 - 0.5 * h * w_corner * row[nn];
    const C a_n =
        (track.a[nn - 1] + 0.5 * h * (r_prev + partial)) / denom;
    track.a[nn] = a_n;
    r_prev = partial + w_corner * row[nn] * a_n;
  }
  return track;
}

AmplitudeTrack unit_amplitude(const std::vector<double>& grid) {
  if (grid.size() < 2)
    throw std::domain_error("amplitude grid needs at least two nodes");
  AmplitudeTrack track;
  track.times = grid;
  track.a.assign(grid.size(), 1.0);
  return track;
}

AmplitudeTrack load_amplitude_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("amplitude table: cannot open " + path);
  AmplitudeTrack track;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double t, re, im;
    if (!(ss >> t >> re >> im))
      throw io_error("amplitude table: " + path + ":" +
                     std::to_string(line_no) +
                     ": expected 't_au, re_a, im_a'");
    std::string extra;
    if (ss >> extra)
      throw io_error("amplitude table: " + path + ":" +
                     std::to_string(line_no) + ": trailing fields");
    track.times.push_back(t);
    track.a.emplace_back(re, im);
  }
  try {
    // The looser magnitude gate admits tables saved from the Volterra
    // modes, whose |a| can carry a transient ~1e-4 excess above one.
    track.validate(1e-3);
  } catch (const std::domain_error& e) {
    throw io_error("amplitude table: " + path + ": " + e.what());
  }
  return track;
}

DepletionChoice parse_depletion_strategy(const std::string& text) {
  DepletionChoice c;
  if (text == "unit") {
    c.kind = DepletionChoice::Kind::unit;
  } else if (text == "adk_envelope") {
    c.kind = DepletionChoice::Kind::adk_envelope;
  } else if (text == "adk_instantaneous") {
    c.kind = DepletionChoice::Kind::adk_instantaneous;
  } else if (text == "sfa_markov") {
    c.kind = DepletionChoice::Kind::sfa_markov;
  } else if (text == "sfa_full") {
    c.kind = DepletionChoice::Kind::sfa_full;
  } else if (text.rfind("table:", 0) == 0) {
    c.kind = DepletionChoice::Kind::table;
    c.table_path = text.substr(6);
    if (c.table_path.empty())
      throw config_error({"depletion: table strategy needs a path, "
                          "as in 'table:amplitudes.csv'"});
  } else {
    throw config_error(
        {"depletion: unknown strategy '" + text +
         "'; expected unit, adk_envelope, adk_instantaneous, sfa_markov, "
         "sfa_full, or table:<path>"});
  }
  return c;
}

AmplitudeTrack compute_amplitude(const DepletionChoice& choice,
                                 const LaserPulse& pulse,
                                 const std::vector<double>& grid,
                                 const AdkParams* adk,
                                 const SeparableTarget* target,
                                 const DepletionKernelOptions& opt) {
  using Kind = DepletionChoice::Kind;
  switch (choice.kind) {
    case Kind::unit:
      return unit_amplitude(grid);
    case Kind::adk_envelope:
    case Kind::adk_instantaneous:
      if (!adk)
        throw config_error({"depletion: ADK strategies need ADK parameters "
                            "(ip, core charge, l, m)"});
      return adk_amplitude(pulse, *adk, grid,
                           choice.kind == Kind::adk_envelope
                               ? AdkField::envelope
                               : AdkField::instantaneous);
    case Kind::sfa_markov:
    case Kind::sfa_full:
      if (!target)
        throw config_error(
            {"depletion: SFA strategies need a bound-state target"});
      return sfa_depletion(*target, pulse,
                           choice.kind == Kind::sfa_markov
                               ? DepletionMode::markov
                               : DepletionMode::full_integrodiff,
                           grid, opt);
    case Kind::table:
      return load_amplitude_table(choice.table_path);
  }
  throw std::logic_error("depletion: unhandled strategy");
}

}  // namespace sfa
