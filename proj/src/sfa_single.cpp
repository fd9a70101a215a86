#include "sfa/sfa_single.hpp"

#include <fftw3.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "sfa/errors.hpp"

namespace sfa {
namespace {

using C = std::complex<double>;
constexpr double kPi = 3.14159265358979323846;
constexpr C kI{0.0, 1.0};

double sq(double x) { return x * x; }

// Index-sharded parallel map. Each index writes its own slot, and callers
// reduce in fixed index order afterwards, so results are identical for any
// worker count. The first exception thrown by a body is rethrown here.
void parallel_for(std::size_t n, int workers_opt,
                  const std::function<void(std::size_t)>& body) {
  int workers = workers_opt > 0
                    ? workers_opt
                    : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min<int>(workers, static_cast<int>(n)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto run = [&] {
    try {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        if (failed.load(std::memory_order_relaxed)) return;
        body(i);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!failed.exchange(true)) first_error = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

// Upper bound on |alpha(t)|. The exact drift stays below e0/omega0 for
// envelopes on the vector potential; envelopes on the field pick up
// sideband denominators omega0 (1 +- 1/Nc), bounded by the safety factor.
double drift_bound(const LaserPulse& pulse) {
  return 1.25 * pulse.e0() / pulse.omega0();
}

// Even Simpson interval count resolving a phase that advances at most
// `rate` per unit time over `span`, at `ppp` nodes per phase period.
std::size_t node_count(double span, double rate, double ppp,
                       std::size_t max_nodes, const char* what) {
  const double periods = span * rate / (2.0 * kPi);
  double req = std::ceil(periods * ppp);
  req = std::max(req, 8.0);
  if (req + 1.0 > static_cast<double>(max_nodes)) {
    const double cap_step_phase =
        span * rate / static_cast<double>(max_nodes - 1);
    throw convergence_error(
        std::string(what) + ": resolving the action phase needs " +
        std::to_string(static_cast<long long>(req) + 1) +
        " nodes, above the cap of " + std::to_string(max_nodes) +
        "; the phase step at the cap would be " +
        std::to_string(cap_step_phase) +
        " rad where the resolution limit is 0.5 rad");
  }
  std::size_t n = static_cast<std::size_t>(req);
  n += n & 1u;
  return n;
}

double simpson_weight(std::size_t j, std::size_t n) {
  if (j == 0 || j == n) return 1.0;
  return (j & 1u) ? 4.0 : 2.0;
}

void check_t_end(const LaserPulse& pulse, double t_end) {
  if (!(t_end >= 0.0) || t_end > pulse.duration() * (1.0 + 1e-12))
    throw std::domain_error("amplitude: t_end must lie within the pulse");
}

// Composite Boole weights for n panels (4n intervals) on [a, b].
std::vector<double> boole_weights(double a, double b, int panels) {
  const int n = 4 * panels;
  const double h = (b - a) / n;
  std::vector<double> w(n + 1, 0.0);
  static const double coeff[5] = {7.0, 32.0, 12.0, 32.0, 7.0};
  for (int panel = 0; panel < panels; ++panel)
    for (int k = 0; k < 5; ++k) w[4 * panel + k] += (2.0 * h / 45.0) * coeff[k];
  return w;
}

struct ActionParts {
  // Cached antiderivative values at the fixed endpoint t of S(p, t, .).
  Vec3 ia_end;
  double is_end = 0.0;
  double c0 = 0.0;  // p^2/2 + Ip

  ActionParts(const LaserPulse& pulse, const Vec3& p, double ip, double t) {
    ia_end = pulse.drift_integral(t);
    is_end = pulse.drift_sq_integral(t);
    c0 = 0.5 * dot(p, p) + ip;
  }
};

// S(p_st, t_a, t_b) for the stationary momentum p_st = dIa / tau collapses
// to Ip tau - |p_st|^2 tau / 2 + dIs / 2 because p_st . dIa = |p_st|^2 tau.
double stationary_action(double ip, const Vec3& p_st, double tau,
                         double d_is) {
  return ip * tau - 0.5 * dot(p_st, p_st) * tau + 0.5 * d_is;
}

Vec3 nudged(Vec3 v) {
  if (dot(v, v) < 1e-20) v.x += 1e-10;
  return v;
}

// Direct amplitude by composite Simpson on the phase-resolved grid.
C b0_dense(const SeparableTarget& target, const LaserPulse& pulse,
           const AmplitudeTrack& a, const Vec3& p, double t_end,
           const SingleAtomOptions& opt) {
  const double rate =
      0.5 * sq(norm(p) + drift_bound(pulse)) + target.ip();
  const std::size_t n = node_count(t_end, rate, opt.points_per_period,
                                   opt.max_nodes, "direct amplitude");
  const double h = t_end / static_cast<double>(n);
  const ActionParts act(pulse, p, target.ip(), t_end);
  C sum{0.0, 0.0};
  for (std::size_t j = 0; j <= n; ++j) {
    const double t = (j == n) ? t_end : h * static_cast<double>(j);
    const Vec3 e_t = pulse.electric_field(t);
    const Vec3 v = p - pulse.drift(t);
    const double s = act.c0 * (t_end - t) -
                     dot(p, act.ia_end - pulse.drift_integral(t)) +
                     0.5 * (act.is_end - pulse.drift_sq_integral(t));
    const C f = dot(to_complex(e_t), target.dipole(v)) * a.at(t) *
                std::polar(1.0, -s);
    sum += simpson_weight(j, n) * f;
  }
  return kI * sum * (h / 3.0);
}

// Direct amplitude with per-panel linear phase: the slow factor is
// interpolated linearly while exp(-i S) integrates exactly, which tolerates
// much coarser grids. The phase is monotone in t' (dS/dt' = -(kinetic+Ip)),
// so linearization never straddles a turning point.
C b0_filon(const SeparableTarget& target, const LaserPulse& pulse,
           const AmplitudeTrack& a, const Vec3& p, double t_end,
           const SingleAtomOptions& opt) {
  const double rate =
      0.5 * sq(norm(p) + drift_bound(pulse)) + target.ip();
  const std::size_t n = node_count(t_end, rate, opt.points_per_period,
                                   opt.max_nodes, "direct amplitude");
  const double h = t_end / static_cast<double>(n);
  const ActionParts act(pulse, p, target.ip(), t_end);
  std::vector<double> phase(n + 1);
  std::vector<C> slow(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    const double t = (j == n) ? t_end : h * static_cast<double>(j);
    phase[j] = act.c0 * (t_end - t) -
               dot(p, act.ia_end - pulse.drift_integral(t)) +
               0.5 * (act.is_end - pulse.drift_sq_integral(t));
    slow[j] = dot(to_complex(pulse.electric_field(t)),
                  target.dipole(p - pulse.drift(t))) *
              a.at(t);
  }
  // int_0^h (g0 + (g1-g0) s/h) e^{-i(phi0 + u s/h)} ds
  //   = h e^{-i phi0} [g0 (A - B) + g1 B],
  // A = (1 - e^{-iu})/(iu), B = (A - e^{-iu})/(iu).
  C sum{0.0, 0.0};
  for (std::size_t j = 0; j < n; ++j) {
    const double u = phase[j + 1] - phase[j];
    C va, vb;
    if (std::abs(u) < 1e-3) {
      const C iu{0.0, u};
      va = 1.0 - iu / 2.0 - u * u / 6.0 + iu * u * u / 24.0;
      vb = 0.5 - iu / 3.0 - u * u / 8.0 + iu * u * u / 30.0;
    } else {
      const C iu{0.0, u};
      const C eu = std::polar(1.0, -u);
      va = (1.0 - eu) / iu;
      vb = (va - eu) / iu;
    }
    sum += h * std::polar(1.0, -phase[j]) *
           (slow[j] * (va - vb) + slow[j + 1] * vb);
  }
  return kI * sum;
}

// One inner node of the rescattering integrand that does not depend on the
// final momentum: spreading factor, recollision dipole, bound amplitude,
// stationary action phase, and the Simpson weight, all folded together.
struct InnerNode {
  Vec3 v2;  // p_st - alpha(t'), the intermediate drift momentum at t'
  C slow{0.0, 0.0};
};

struct OuterRow {
  double t_prime = 0.0;
  double outer_weight = 0.0;  // Simpson weight times h/3 of the outer grid
  Vec3 e_t1;
  Vec3 alpha_t1;
  Vec3 ia_t1;
  double is_t1 = 0.0;
  std::vector<InnerNode> inner;
};

// Shared per-row inner data for the stationary-phase intermediate mode.
void build_row_inner(const SeparableTarget& target, const LaserPulse& pulse,
                     const AmplitudeTrack& a, const SingleAtomOptions& opt,
                     double inner_rate, double window, OuterRow& row) {
  const double t1 = row.t_prime;
  const double lo = (window > 0.0) ? std::max(0.0, t1 - window) : 0.0;
  const double span = t1 - lo;
  if (!(span > 0.0)) return;
  const double ppp = opt.inner_points_per_period > 0.0
                         ? opt.inner_points_per_period
                         : opt.points_per_period;
  const std::size_t n = node_count(span, inner_rate, ppp, opt.max_nodes,
                                   "rescattering inner integral");
  const double h = span / static_cast<double>(n);
  row.inner.resize(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const double t2 = (k == n) ? t1 : lo + h * static_cast<double>(k);
    const double tau = t1 - t2;
    Vec3 p_st;
    if (tau > 1e-12) {
      p_st = (1.0 / tau) * (row.ia_t1 - pulse.drift_integral(t2));
    } else {
      p_st = row.alpha_t1;
    }
    const C spread = std::pow(2.0 * kPi / C(opt.spreading_delta, tau), 1.5);
    const Vec3 e_t2 = pulse.electric_field(t2);
    const CVec3 d2 = target.dipole(nudged(p_st - pulse.drift(t2)));
    const double s_in = stationary_action(
        target.ip(), p_st, tau, row.is_t1 - pulse.drift_sq_integral(t2));
    InnerNode& node = row.inner[k];
    node.v2 = nudged(p_st - row.alpha_t1);
    node.slow = simpson_weight(k, n) * (h / 3.0) * spread *
                dot(to_complex(e_t2), d2) * a.at(t2) * std::polar(1.0, -s_in);
  }
}

// Rescattered amplitudes for a batch of momenta. The inner t'' data above
// is momentum independent, so rows are built once (in blocks, to bound
// memory) and every momentum scans them; accumulation order over rows is
// fixed, keeping results identical for any worker count.
void b1_spa_batch(const SeparableTarget& target, const LaserPulse& pulse,
                  const AmplitudeTrack& a, const std::vector<Vec3>& ps,
                  double t_end, const SingleAtomOptions& opt,
                  std::vector<C>& out) {
  out.assign(ps.size(), C{0.0, 0.0});
  if (ps.empty() || !(t_end > 0.0) || opt.coupling_scale == 0.0) return;

  double p_max = 0.0;
  for (const Vec3& p : ps) p_max = std::max(p_max, norm(p));
  const double a_max = drift_bound(pulse);
  // The outer integrand carries both the final-state phase and the
  // oscillation of the inner integral; their rates add in the bound.
  const double outer_rate =
      0.5 * sq(p_max + a_max) + 0.5 * sq(2.0 * a_max) + 2.0 * target.ip();
  const double inner_rate = 0.5 * sq(2.0 * a_max) + target.ip();
  const std::size_t n_out = node_count(
      t_end, outer_rate, opt.points_per_period, opt.max_nodes,
      "rescattering outer integral");
  const double h_out = t_end / static_cast<double>(n_out);
  const double window =
      opt.inner_window_cycles > 0.0
          ? opt.inner_window_cycles * 2.0 * kPi / pulse.omega0()
          : 0.0;

  std::vector<ActionParts> acts;
  acts.reserve(ps.size());
  for (const Vec3& p : ps)
    acts.emplace_back(pulse, p, target.ip(), t_end);

  const std::size_t block = 64;
  std::vector<OuterRow> rows;
  for (std::size_t j0 = 1; j0 <= n_out; j0 += block) {
    const std::size_t j1 = std::min(n_out, j0 + block - 1);
    rows.assign(j1 - j0 + 1, OuterRow{});
    for (std::size_t j = j0; j <= j1; ++j) {
      OuterRow& row = rows[j - j0];
      row.t_prime = (j == n_out) ? t_end : h_out * static_cast<double>(j);
      row.outer_weight = simpson_weight(j, n_out) * (h_out / 3.0);
      row.e_t1 = pulse.electric_field(row.t_prime);
      row.alpha_t1 = pulse.drift(row.t_prime);
      row.ia_t1 = pulse.drift_integral(row.t_prime);
      row.is_t1 = pulse.drift_sq_integral(row.t_prime);
      build_row_inner(target, pulse, a, opt, inner_rate, window, row);
    }
    parallel_for(ps.size(), opt.n_workers, [&](std::size_t ip) {
      const Vec3& p = ps[ip];
      const ActionParts& act = acts[ip];
      C acc{0.0, 0.0};
      for (const OuterRow& row : rows) {
        if (row.inner.empty()) continue;
        const Vec3 v1 = nudged(p - row.alpha_t1);
        const CVec3 e1 = to_complex(row.e_t1);
        C inner_sum{0.0, 0.0};
        for (const InnerNode& node : row.inner)
          inner_sum += dot(e1, target.rescattering(v1, node.v2)) * node.slow;
        const double s_out =
            act.c0 * (t_end - row.t_prime) - dot(p, act.ia_end - row.ia_t1) +
            0.5 * (act.is_end - row.is_t1);
        acc += row.outer_weight * std::polar(1.0, -s_out) * inner_sum;
      }
      out[ip] += acc;
    });
  }
  for (C& v : out) v *= -opt.coupling_scale;
}

// Explicit intermediate-momentum quadrature in the frame p' = p_st + q n:
// the action is exactly S(p_st) + tau q^2/2 there, so the only radial
// oscillation is the Fresnel chirp and the angular integrand is smooth.
C pprime_shell_integral(const SeparableTarget& target, const Vec3& v1,
                        const CVec3& e1, const CVec3& e2, const Vec3& p_st,
                        const Vec3& alpha_t1, const Vec3& alpha_t2, double tau,
                        const SingleAtomOptions& opt) {
  const Vec3 off1 = p_st - alpha_t1;
  const Vec3 off2 = p_st - alpha_t2;
  const double covered = std::max(norm(off1), norm(off2)) + 2.0;
  const double rmax =
      std::min(covered + 4.0,
               target.form_factor().momentum_cutoff() + covered);

  const int n_u = std::max(1, opt.grid_angular_panels);
  const int n_phi = std::max(3, opt.grid_azimuthal_points);
  const std::vector<double> wu = boole_weights(-1.0, 1.0, n_u);
  const double dphi = 2.0 * kPi / n_phi;

  auto shell = [&](double q) -> C {
    C acc{0.0, 0.0};
    for (std::size_t iu = 0; iu < wu.size(); ++iu) {
      const double u = -1.0 + 2.0 * static_cast<double>(iu) /
                                  static_cast<double>(wu.size() - 1);
      const double su = std::sqrt(std::max(0.0, 1.0 - u * u));
      C ring{0.0, 0.0};
      for (int m = 0; m < n_phi; ++m) {
        const double phi = dphi * m;
        const Vec3 n{su * std::cos(phi), su * std::sin(phi), u};
        const Vec3 pp = p_st + q * n;
        const C g = dot(e1, target.rescattering(v1, nudged(pp - alpha_t1)));
        const C d = dot(e2, target.dipole(pp - alpha_t2));
        ring += g * d;
      }
      acc += wu[iu] * dphi * ring;
    }
    return acc;
  };

  // Radial Boole panels densified against the tau q^2/2 chirp: at least
  // 6 nodes per local Fresnel period at the outer edge.
  const int n_r =
      std::max(opt.grid_radial_panels,
               static_cast<int>(std::ceil(0.24 * tau * rmax * rmax)) + 2);
  const std::vector<double> wr = boole_weights(0.0, rmax, n_r);
  const double hr = rmax / static_cast<double>(wr.size() - 1);
  C acc{0.0, 0.0};
  for (std::size_t ir = 1; ir < wr.size(); ++ir) {
    const double q = hr * static_cast<double>(ir);
    acc += wr[ir] * q * q * std::polar(1.0, -0.5 * tau * q * q) * shell(q);
  }
  return acc;
}

C b1_grid_single(const SeparableTarget& target, const LaserPulse& pulse,
                 const AmplitudeTrack& a, const Vec3& p, double t_end,
                 const SingleAtomOptions& opt) {
  if (!(t_end > 0.0) || opt.coupling_scale == 0.0) return C{0.0, 0.0};
  const double a_max = drift_bound(pulse);
  const double outer_rate =
      0.5 * sq(norm(p) + a_max) + 0.5 * sq(2.0 * a_max) + 2.0 * target.ip();
  const double inner_rate = 0.5 * sq(2.0 * a_max) + target.ip();
  const std::size_t n_out = node_count(
      t_end, outer_rate, opt.points_per_period, opt.max_nodes,
      "rescattering outer integral");
  const double h_out = t_end / static_cast<double>(n_out);
  const double ppi = opt.inner_points_per_period > 0.0
                         ? opt.inner_points_per_period
                         : opt.points_per_period;
  const double window =
      opt.inner_window_cycles > 0.0
          ? opt.inner_window_cycles * 2.0 * kPi / pulse.omega0()
          : 0.0;
  const ActionParts act(pulse, p, target.ip(), t_end);

  C acc{0.0, 0.0};
  for (std::size_t j = 1; j <= n_out; ++j) {
    const double t1 = (j == n_out) ? t_end : h_out * static_cast<double>(j);
    const double lo = (window > 0.0) ? std::max(0.0, t1 - window) : 0.0;
    const double span = t1 - lo;
    if (!(span > 0.0)) continue;
    const Vec3 alpha_t1 = pulse.drift(t1);
    const Vec3 ia_t1 = pulse.drift_integral(t1);
    const double is_t1 = pulse.drift_sq_integral(t1);
    const CVec3 e1 = to_complex(pulse.electric_field(t1));
    const Vec3 v1 = nudged(p - alpha_t1);
    const std::size_t n_in = node_count(span, inner_rate, ppi, opt.max_nodes,
                                        "rescattering inner integral");
    const double h_in = span / static_cast<double>(n_in);
    C inner_sum{0.0, 0.0};
    for (std::size_t k = 0; k <= n_in; ++k) {
      const double t2 = (k == n_in) ? t1 : lo + h_in * static_cast<double>(k);
      const double tau = t1 - t2;
      Vec3 p_st;
      if (tau > 1e-12) {
        p_st = (1.0 / tau) * (ia_t1 - pulse.drift_integral(t2));
      } else {
        p_st = alpha_t1;
      }
      const Vec3 alpha_t2 = pulse.drift(t2);
      const CVec3 e2 = to_complex(pulse.electric_field(t2));
      const double s_in = stationary_action(
          target.ip(), p_st, tau, is_t1 - pulse.drift_sq_integral(t2));
      const C pair = pprime_shell_integral(target, v1, e1, e2, p_st, alpha_t1,
                                           alpha_t2, tau, opt);
      inner_sum += simpson_weight(k, n_in) * (h_in / 3.0) * pair * a.at(t2) *
                   std::polar(1.0, -s_in);
    }
    const double s_out = act.c0 * (t_end - t1) - dot(p, act.ia_end - ia_t1) +
                         0.5 * (act.is_end - is_t1);
    acc += simpson_weight(j, n_out) * (h_out / 3.0) *
           std::polar(1.0, -s_out) * inner_sum;
  }
  return -opt.coupling_scale * acc;
}

std::mutex fftw_plan_mutex;

}  // namespace

Action::Action(const LaserPulse& pulse, double ip)
    : pulse_(&pulse), ip_(ip) {
  if (!(ip > 0.0) || !std::isfinite(ip))
    throw std::domain_error("action: Ip must be positive and finite");
}

double Action::operator()(const Vec3& p, double t, double t_prime) const {
  const Vec3 d_ia =
      pulse_->drift_integral(t) - pulse_->drift_integral(t_prime);
  const double d_is =
      pulse_->drift_sq_integral(t) - pulse_->drift_sq_integral(t_prime);
  return (0.5 * dot(p, p) + ip_) * (t - t_prime) - dot(p, d_ia) + 0.5 * d_is;
}

std::complex<double> Action::operator()(const CVec3& p, std::complex<double> t,
                                        std::complex<double> t_prime) const {
  const CVec3 d_ia =
      pulse_->drift_integral(t) - pulse_->drift_integral(t_prime);
  const C d_is =
      pulse_->drift_sq_integral(t) - pulse_->drift_sq_integral(t_prime);
  return (0.5 * dot(p, p) + ip_) * (t - t_prime) - dot(p, d_ia) + 0.5 * d_is;
}

Vec3 AmplitudeGrid::momentum(const LaserPulse& pulse, std::size_t ia,
                             std::size_t ib) const {
  if (ia >= axis_a.size() || ib >= axis_b.size())
    throw std::domain_error("amplitude grid: node index out of range");
  if (axes == GridAxes::polar) {
    const double pm = axis_a[ia];
    const double th = axis_b[ib];
    return pm * std::cos(th) * pulse.axis1() +
           pm * std::sin(th) * pulse.axis2();
  }
  return axis_a[ia] * pulse.axis1() + axis_b[ib] * pulse.axis2();
}

void AmplitudeGrid::validate() const {
  if (axis_a.empty() || axis_b.empty())
    throw std::domain_error("amplitude grid: axes must be nonempty");
  if (values.size() != axis_a.size() * axis_b.size())
    throw std::domain_error(
        "amplitude grid: value count must equal the axis product");
  for (double v : axis_a)
    if (!std::isfinite(v))
      throw std::domain_error("amplitude grid: axis values must be finite");
  for (double v : axis_b)
    if (!std::isfinite(v))
      throw std::domain_error("amplitude grid: axis values must be finite");
  for (std::size_t i = 1; i < axis_a.size(); ++i)
    if (!(axis_a[i] > axis_a[i - 1]))
      throw std::domain_error("amplitude grid: axes must strictly increase");
  for (std::size_t i = 1; i < axis_b.size(); ++i)
    if (!(axis_b[i] > axis_b[i - 1]))
      throw std::domain_error("amplitude grid: axes must strictly increase");
  for (const C& v : values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw std::domain_error("amplitude grid: values must be finite");
}

void DipoleSeries::validate() const {
  if (times.empty() || times.size() != values.size())
    throw std::domain_error("dipole series: need matching nonempty arrays");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw std::domain_error("dipole series: times must strictly increase");
  for (const Vec3& v : values)
    if (!std::isfinite(v.x) || !std::isfinite(v.y) || !std::isfinite(v.z))
      throw std::domain_error("dipole series: values must be finite");
}

void SingleAtomOptions::validate() const {
  std::vector<std::string> problems;
  const double min_ppp = 4.0 * kPi;
  if (!(points_per_period >= min_ppp))
    problems.push_back(
        "points_per_period must be >= 4*pi = 12.566 so the phase advance "
        "per step stays below 0.5 rad");
  if (inner_points_per_period != 0.0 && !(inner_points_per_period >= min_ppp))
    problems.push_back(
        "inner_points_per_period must be 0 (inherit) or >= 4*pi = 12.566");
  if (max_nodes < 16) problems.push_back("max_nodes must be >= 16");
  if (!(spreading_delta > 0.0))
    problems.push_back("spreading_delta must be > 0");
  if (!(coupling_scale >= 0.0) || !std::isfinite(coupling_scale))
    problems.push_back("coupling_scale must be finite and >= 0");
  if (!(inner_window_cycles >= 0.0))
    problems.push_back("inner_window_cycles must be >= 0");
  if (grid_angular_panels < 1)
    problems.push_back("grid_angular_panels must be >= 1");
  if (grid_azimuthal_points < 3)
    problems.push_back("grid_azimuthal_points must be >= 3");
  if (grid_radial_panels < 4)
    problems.push_back("grid_radial_panels must be >= 4");
  if (n_workers < 0) problems.push_back("n_workers must be >= 0");
  if (!problems.empty()) throw config_error(std::move(problems));
}

std::complex<double> direct_amplitude(const SeparableTarget& target,
                                      const LaserPulse& pulse,
                                      const AmplitudeTrack& a, const Vec3& p,
                                      double t_end,
                                      const SingleAtomOptions& opt) {
  opt.validate();
  check_t_end(pulse, t_end);
  if (!(t_end > 0.0)) return C{0.0, 0.0};
  if (opt.quadrature == TimeQuadrature::filon_linear_phase)
    return b0_filon(target, pulse, a, p, t_end, opt);
  return b0_dense(target, pulse, a, p, t_end, opt);
}

std::complex<double> rescattering_amplitude(const SeparableTarget& target,
                                            const LaserPulse& pulse,
                                            const AmplitudeTrack& a,
                                            const Vec3& p, double t_end,
                                            const SingleAtomOptions& opt) {
  opt.validate();
  check_t_end(pulse, t_end);
  if (opt.intermediate == IntermediateMode::grid)
    return b1_grid_single(target, pulse, a, p, t_end, opt);
  std::vector<C> out;
  b1_spa_batch(target, pulse, a, {p}, t_end, opt, out);
  return out[0];
}

AmplitudeGrid amplitude_grid(const SeparableTarget& target,
                             const LaserPulse& pulse, const AmplitudeTrack& a,
                             AmplitudeKind kind, GridAxes axes,
                             std::vector<double> axis_a,
                             std::vector<double> axis_b, double t_end,
                             const SingleAtomOptions& opt) {
  opt.validate();
  check_t_end(pulse, t_end);
  AmplitudeGrid grid;
  grid.axes = axes;
  grid.axis_a = std::move(axis_a);
  grid.axis_b = std::move(axis_b);
  grid.kind = kind;
  grid.values.assign(grid.axis_a.size() * grid.axis_b.size(), C{0.0, 0.0});
  grid.validate();

  // Detector momenta are shifted by the residual drift at t_end to the
  // canonical momenta the amplitudes are defined over.
  const Vec3 drift_end = pulse.drift(t_end);
  std::vector<Vec3> ps(grid.values.size());
  for (std::size_t ia = 0; ia < grid.axis_a.size(); ++ia)
    for (std::size_t ib = 0; ib < grid.axis_b.size(); ++ib)
      ps[grid.index(ia, ib)] = grid.momentum(pulse, ia, ib) + drift_end;

  const bool want_b0 =
      kind == AmplitudeKind::direct_b0 || kind == AmplitudeKind::total;
  const bool want_b1 =
      kind == AmplitudeKind::rescattered_b1 || kind == AmplitudeKind::total;

  if (want_b1) {
    if (opt.intermediate == IntermediateMode::grid) {
      parallel_for(ps.size(), opt.n_workers, [&](std::size_t i) {
        grid.values[i] = b1_grid_single(target, pulse, a, ps[i], t_end, opt);
      });
    } else {
      std::vector<C> b1;
      b1_spa_batch(target, pulse, a, ps, t_end, opt, b1);
      grid.values = std::move(b1);
    }
  }
  if (want_b0) {
    std::vector<C> b0(ps.size());
    parallel_for(ps.size(), opt.n_workers, [&](std::size_t i) {
      b0[i] = direct_amplitude(target, pulse, a, ps[i], t_end, opt);
    });
    for (std::size_t i = 0; i < ps.size(); ++i) grid.values[i] += b0[i];
  }
  return grid;
}

AtiSpectrum ati_spectrum(const AmplitudeGrid& b0, const AmplitudeGrid& b1) {
  b0.validate();
  b1.validate();
  if (b0.kind != AmplitudeKind::direct_b0 ||
      b1.kind != AmplitudeKind::rescattered_b1)
    throw std::domain_error(
        "ati spectrum: inputs must be a direct_b0 and a rescattered_b1 grid");
  if (b0.axes != b1.axes || b0.axis_a != b1.axis_a || b0.axis_b != b1.axis_b)
    throw std::domain_error(
        "ati spectrum: the two amplitude grids must share identical axes");
  AtiSpectrum s;
  s.axes = b0.axes;
  s.axis_a = b0.axis_a;
  s.axis_b = b0.axis_b;
  const std::size_t n = b0.values.size();
  s.direct_sq.resize(n);
  s.rescattered_sq.resize(n);
  s.cross.resize(n);
  s.total.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const C v0 = b0.values[i];
    const C v1 = b1.values[i];
    s.direct_sq[i] = std::norm(v0);
    s.rescattered_sq[i] = std::norm(v1);
    s.cross[i] = 2.0 * (v0 * std::conj(v1)).real();
    s.total[i] = s.direct_sq[i] + s.rescattered_sq[i] + s.cross[i];
  }
  return s;
}

EnergySpectrum energy_spectrum(const AtiSpectrum& spectrum) {
  if (spectrum.axes != GridAxes::polar)
    throw std::domain_error(
        "energy spectrum: angular integration requires a polar grid");
  const std::size_t n_p = spectrum.axis_a.size();
  const std::size_t n_t = spectrum.axis_b.size();
  if (n_t < 2)
    throw std::domain_error(
        "energy spectrum: need at least two polar angles to integrate");
  EnergySpectrum out;
  out.energy.resize(n_p);
  out.dp_de.resize(n_p);
  for (std::size_t ia = 0; ia < n_p; ++ia) {
    const double p = spectrum.axis_a[ia];
    double integral = 0.0;
    for (std::size_t ib = 0; ib + 1 < n_t; ++ib) {
      const double th0 = spectrum.axis_b[ib];
      const double th1 = spectrum.axis_b[ib + 1];
      const double f0 = spectrum.total[spectrum.index(ia, ib)] * std::sin(th0);
      const double f1 =
          spectrum.total[spectrum.index(ia, ib + 1)] * std::sin(th1);
      integral += 0.5 * (th1 - th0) * (f0 + f1);
    }
    out.energy[ia] = 0.5 * p * p;
    out.dp_de[ia] = 2.0 * kPi * p * integral;
  }
  return out;
}

DipoleSeries hhg_dipole(const SeparableTarget& target, const LaserPulse& pulse,
                        const AmplitudeTrack& a,
                        const std::vector<double>& times,
                        const SingleAtomOptions& opt) {
  opt.validate();
  if (times.empty())
    throw std::domain_error("hhg dipole: time grid must be nonempty");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (i > 0 && !(times[i] > times[i - 1]))
      throw std::domain_error("hhg dipole: times must strictly increase");
  }
  check_t_end(pulse, times.back());
  if (!(times.front() >= 0.0))
    throw std::domain_error("hhg dipole: times must start at or after 0");

  const double a_max = drift_bound(pulse);
  const double inner_rate = 0.5 * sq(2.0 * a_max) + target.ip();
  const double ppi = opt.inner_points_per_period > 0.0
                         ? opt.inner_points_per_period
                         : opt.points_per_period;

  DipoleSeries series;
  series.times = times;
  series.values.assign(times.size(), Vec3{});
  parallel_for(times.size(), opt.n_workers, [&](std::size_t i) {
    const double t = times[i];
    if (!(t > 0.0)) return;
    const std::size_t n =
        node_count(t, inner_rate, ppi, opt.max_nodes, "hhg dipole integral");
    const double h = t / static_cast<double>(n);
    const Vec3 alpha_t = pulse.drift(t);
    const Vec3 ia_t = pulse.drift_integral(t);
    const double is_t = pulse.drift_sq_integral(t);
    const C conj_a_t = std::conj(a.at(t));
    CVec3 acc{};
    for (std::size_t j = 0; j <= n; ++j) {
      const double t1 = (j == n) ? t : h * static_cast<double>(j);
      const double tau = t - t1;
      Vec3 p_st;
      if (tau > 1e-12) {
        p_st = (1.0 / tau) * (ia_t - pulse.drift_integral(t1));
      } else {
        p_st = alpha_t;
      }
      const C spread = std::pow(2.0 * kPi / C(opt.spreading_delta, tau), 1.5);
      const CVec3 d_rec = conj(target.dipole(p_st - alpha_t));
      const C born = dot(to_complex(pulse.electric_field(t1)),
                         target.dipole(p_st - pulse.drift(t1)));
      const double s_in = stationary_action(
          target.ip(), p_st, tau, is_t - pulse.drift_sq_integral(t1));
      const C scalar = simpson_weight(j, n) * spread * born * a.at(t1) *
                       std::polar(1.0, -s_in);
      acc += scalar * d_rec;
    }
    const CVec3 total = (kI * (h / 3.0) * conj_a_t) * acc;
    series.values[i] = real_part(total);
  });
  return series;
}

HarmonicSpectrum harmonic_spectrum(const DipoleSeries& series, double omega0,
                                   SpectrumWindow window) {
  series.validate();
  if (!(omega0 > 0.0))
    throw std::domain_error("harmonic spectrum: omega0 must be positive");
  const std::size_t n = series.times.size();
  if (n < 8)
    throw std::domain_error("harmonic spectrum: need at least 8 samples");
  const double dt = series.times[1] - series.times[0];
  for (std::size_t i = 1; i < n; ++i) {
    const double step = series.times[i] - series.times[i - 1];
    if (std::abs(step - dt) > 1e-9 * dt)
      throw std::domain_error(
          "harmonic spectrum: the dipole series must be on a uniform grid");
  }

  std::vector<double> w(n, 1.0);
  if (window == SpectrumWindow::hann)
    for (std::size_t j = 0; j < n; ++j)
      w[j] = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(j) /
                                   static_cast<double>(n - 1)));

  const std::size_t n_bins = n / 2 + 1;
  double* in = fftw_alloc_real(n);
  fftw_complex* raw = fftw_alloc_complex(n_bins);
  fftw_plan plan = nullptr;
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex);
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, raw, FFTW_ESTIMATE);
  }

  std::vector<std::vector<C>> comp(3, std::vector<C>(n_bins));
  for (int c = 0; c < 3; ++c) {
    for (std::size_t j = 0; j < n; ++j) {
      const Vec3& v = series.values[j];
      in[j] = w[j] * (c == 0 ? v.x : (c == 1 ? v.y : v.z));
    }
    fftw_execute(plan);
    // The transform is Sum_j x_j e^{-2 pi i jk/N}; the reported spectrum
    // uses e^{+i Omega t}, which for real input is the conjugate, shifted
    // by the phase of the grid origin.
    for (std::size_t k = 0; k < n_bins; ++k) {
      const double omega_k =
          2.0 * kPi * static_cast<double>(k) / (static_cast<double>(n) * dt);
      const C fwd{raw[k][0], raw[k][1]};
      comp[c][k] = dt * std::conj(fwd) * std::polar(1.0, omega_k * series.times[0]);
    }
  }
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex);
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(raw);

  double power[3] = {0.0, 0.0, 0.0};
  for (int c = 0; c < 3; ++c)
    for (std::size_t k = 0; k < n_bins; ++k) power[c] += std::norm(comp[c][k]);
  int lead = 0;
  if (power[1] > power[lead]) lead = 1;
  if (power[2] > power[lead]) lead = 2;

  HarmonicSpectrum out;
  out.order.resize(n_bins);
  out.intensity.resize(n_bins);
  out.phase.resize(n_bins);
  for (std::size_t k = 0; k < n_bins; ++k) {
    const double omega_k =
        2.0 * kPi * static_cast<double>(k) / (static_cast<double>(n) * dt);
    out.order[k] = omega_k / omega0;
    out.intensity[k] = std::norm(comp[0][k]) + std::norm(comp[1][k]) +
                       std::norm(comp[2][k]);
    out.phase[k] = std::arg(comp[lead][k]);
  }
  return out;
}

}  // namespace sfa
