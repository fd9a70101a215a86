// Unit and property tests for the single-atom amplitude and spectrum layer:
// closed-form action, direct and rescattered ionization amplitudes, photo-
// electron spectra, and the harmonic dipole pipeline.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <string>
#include <vector>

#include "sfa/constants.hpp"
#include "sfa/depletion.hpp"
#include "sfa/errors.hpp"
#include "sfa/pulse.hpp"
#include "sfa/quadrature.hpp"
#include "sfa/separable_target.hpp"
#include "sfa/sfa_single.hpp"

namespace {

using namespace sfa;
using C = std::complex<double>;

LaserPulse make_pulse(double e0, double n_cycles, double lambda_nm = 800.0,
                      Envelope env = Envelope::sin2_on_vector_potential,
                      double ellipticity = 0.0) {
  PulseParams prm;
  prm.e0_au = e0;
  prm.omega0 = omega_au_from_lambda_nm(lambda_nm);
  prm.n_cycles = n_cycles;
  prm.envelope = env;
  prm.ellipticity = ellipticity;
  prm.axis1 = {0.0, 0.0, 1.0};
  prm.axis2 = {1.0, 0.0, 0.0};
  return LaserPulse(prm);
}

SeparableTarget gaussian_target(double ip, double width = 1.0) {
  FormFactor ff;
  ff.profile = FormFactor::Profile::gaussian;
  ff.width = width;
  return SeparableTarget::with_ip(ff, ip);
}

AmplitudeTrack unit_track(const LaserPulse& pulse) {
  return unit_amplitude({0.0, 0.5 * pulse.duration(), pulse.duration()});
}

double grid_max(const std::vector<C>& vals) {
  double m = 0.0;
  for (const C& v : vals) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

TEST_CASE("action: field-free limit, additivity, quadrature oracle") {
  std::mt19937 rng(71001);
  std::uniform_real_distribution<double> up(-2.0, 2.0);

  SUBCASE("zero field reduces to the free phase") {
    LaserPulse off = make_pulse(0.0, 4.0);
    Action s(off, 0.7);
    for (int i = 0; i < 20; ++i) {
      const Vec3 p{up(rng), up(rng), up(rng)};
      const double t = 0.6 * off.duration();
      const double tp = 0.1 * off.duration();
      const double expect = (0.5 * dot(p, p) + 0.7) * (t - tp);
      CHECK(s(p, t, tp) == doctest::Approx(expect).epsilon(1e-13));
    }
  }

  LaserPulse pulse = make_pulse(0.06, 4.0);
  Action s(pulse, 0.5);

  SUBCASE("splitting the interval is exact") {
    std::uniform_real_distribution<double> ut(0.0, pulse.duration());
    for (int i = 0; i < 200; ++i) {
      const Vec3 p{up(rng), up(rng), up(rng)};
      double a = ut(rng), b = ut(rng), m = ut(rng);
      const double whole = s(p, b, a);
      const double split = s(p, b, m) + s(p, m, a);
      CHECK(std::abs(whole - split) < 1e-10 * (1.0 + std::abs(whole)));
    }
  }

  SUBCASE("matches adaptive quadrature of the kinetic integrand") {
    std::uniform_real_distribution<double> ut(0.0, pulse.duration());
    for (int i = 0; i < 100; ++i) {
      const Vec3 p{up(rng), up(rng), up(rng)};
      double a = ut(rng), b = ut(rng);
      if (a > b) std::swap(a, b);
      if (b - a < 1e-3) b += 1.0;
      auto f = [&](double t) {
        const Vec3 v = p - pulse.drift(t);
        return 0.5 * dot(v, v) + 0.5;
      };
      const double oracle = adaptive_simpson(f, a, b, 1e-12, 40);
      const double closed = s(p, b, a);
      CHECK(std::abs(closed - oracle) < 1e-9 * (1.0 + std::abs(oracle)));
    }
  }

  SUBCASE("complex overload agrees on the real axis and stays additive") {
    std::uniform_real_distribution<double> ut(0.0, pulse.duration());
    for (int i = 0; i < 50; ++i) {
      const Vec3 p{up(rng), up(rng), up(rng)};
      const double a = ut(rng), b = ut(rng);
      const C sc = s(to_complex(p), C(b, 0.0), C(a, 0.0));
      CHECK(std::abs(sc - s(p, b, a)) < 1e-10 * (1.0 + std::abs(sc)));
      // Complex arguments: additivity is an identity of the antiderivatives.
      const CVec3 pc{C(up(rng), 0.3), C(up(rng), -0.1), C(up(rng), 0.0)};
      const C tb{b, 0.2}, ta{a, -0.1}, tm{0.5 * (a + b), 0.15};
      const C whole = s(pc, tb, ta);
      const C split = s(pc, tb, tm) + s(pc, tm, ta);
      CHECK(std::abs(whole - split) < 1e-10 * (1.0 + std::abs(whole)));
    }
  }

  SUBCASE("rejects nonpositive binding energy") {
    CHECK_THROWS_AS(Action(pulse, 0.0), std::domain_error);
    CHECK_THROWS_AS(Action(pulse, -1.0), std::domain_error);
  }
}

TEST_CASE("direct amplitude: trivial zeros and option validation") {
  SeparableTarget tgt = gaussian_target(0.5);

  SUBCASE("zero field ionizes nothing") {
    LaserPulse off = make_pulse(0.0, 4.0);
    AmplitudeTrack a = unit_track(off);
    const C b0 = direct_amplitude(tgt, off, a, {0.0, 0.0, 0.4},
                                  off.duration());
    CHECK(std::abs(b0) == 0.0);
  }

  LaserPulse pulse = make_pulse(0.05, 4.0);
  AmplitudeTrack a = unit_track(pulse);

  SUBCASE("t_end = 0 gives zero, out-of-range t_end throws") {
    CHECK(std::abs(direct_amplitude(tgt, pulse, a, {0, 0, 0.3}, 0.0)) == 0.0);
    CHECK_THROWS_AS(
        direct_amplitude(tgt, pulse, a, {0, 0, 0.3}, 2.0 * pulse.duration()),
        std::domain_error);
  }

  SUBCASE("a node cap too small for the phase raises a diagnostic") {
    SingleAtomOptions opt;
    opt.max_nodes = 64;
    try {
      direct_amplitude(tgt, pulse, a, {0.0, 0.0, 1.5}, pulse.duration(), opt);
      FAIL("expected convergence_error");
    } catch (const convergence_error& e) {
      CHECK(std::string(e.what()).find("phase step") != std::string::npos);
      CHECK(std::string(e.what()).find("0.5 rad") != std::string::npos);
    }
  }

  SUBCASE("node densities allowing phase steps above 0.5 rad are rejected") {
    SingleAtomOptions opt;
    opt.points_per_period = 10.0;
    CHECK_THROWS_AS(
        direct_amplitude(tgt, pulse, a, {0, 0, 0.3}, pulse.duration(), opt),
        config_error);
    SingleAtomOptions opt2;
    opt2.inner_points_per_period = 6.0;
    CHECK_THROWS_AS(
        direct_amplitude(tgt, pulse, a, {0, 0, 0.3}, pulse.duration(), opt2),
        config_error);
  }
}

TEST_CASE("direct amplitude: grid-doubling stability and Filon agreement") {
  SeparableTarget tgt = gaussian_target(0.5);
  LaserPulse pulse = make_pulse(0.05, 4.0);
  AmplitudeTrack a = unit_track(pulse);
  const double up_au = pulse.up_au();
  const double p_hi = 2.0 * std::sqrt(up_au);

  std::mt19937 rng(71002);
  std::uniform_real_distribution<double> upm(0.05, p_hi);
  std::uniform_real_distribution<double> uth(0.0, 3.14159265358979);

  SingleAtomOptions base;
  SingleAtomOptions fine;
  fine.points_per_period = 80.0;
  SingleAtomOptions filon;
  filon.quadrature = TimeQuadrature::filon_linear_phase;
  SingleAtomOptions filon_coarse;
  filon_coarse.quadrature = TimeQuadrature::filon_linear_phase;
  filon_coarse.points_per_period = 13.0;

  std::vector<C> v_base, v_fine, v_filon, v_coarse;
  for (int i = 0; i < 50; ++i) {
    const double pm = upm(rng), th = uth(rng);
    const Vec3 p{pm * std::sin(th), 0.0, pm * std::cos(th)};
    v_base.push_back(direct_amplitude(tgt, pulse, a, p, pulse.duration(), base));
    v_fine.push_back(direct_amplitude(tgt, pulse, a, p, pulse.duration(), fine));
    v_filon.push_back(
        direct_amplitude(tgt, pulse, a, p, pulse.duration(), filon));
    v_coarse.push_back(
        direct_amplitude(tgt, pulse, a, p, pulse.duration(), filon_coarse));
  }
  // Mixed relative error with a floor well below the populated range, so
  // accidental comb minima do not inflate the ratio.
  const double floor = 1e-3 * grid_max(v_base);
  for (std::size_t i = 0; i < v_base.size(); ++i) {
    const double scale = std::max(std::abs(v_base[i]), floor);
    CHECK(std::abs(v_fine[i] - v_base[i]) / scale < 1e-4);
    CHECK(std::abs(v_filon[i] - v_base[i]) / scale < 1e-4);
    CHECK(std::abs(v_coarse[i] - v_base[i]) / scale < 1e-3);
  }
}

TEST_CASE("direct amplitude: ten-cycle comb spacing and 2Up-4Up falloff") {
  // Ten cycles at 800 nm; the peak ladder E_n = n w - Ip - Up must come out
  // spaced by exactly one photon within two energy bins.
  const double lambda = 800.0;
  const double e0 = field_au_from_intensity(6.0e13);
  LaserPulse pulse = make_pulse(e0, 10.0, lambda);
  SeparableTarget tgt = gaussian_target(0.5);
  AmplitudeTrack a = unit_track(pulse);
  const double w = pulse.omega0();
  const double up_au = pulse.up_au();

  const double de = w / 12.0;  // energy bin
  std::vector<double> energy, prob;
  for (double e = de; e < 4.6 * up_au; e += de) {
    const Vec3 p = std::sqrt(2.0 * e) * pulse.axis1();
    const C b0 = direct_amplitude(tgt, pulse, a, p, pulse.duration());
    energy.push_back(e);
    prob.push_back(std::norm(b0));
  }

  // Peak finding: strict local maxima above 1e-8 of the global peak.
  const double peak_floor =
      1e-8 * *std::max_element(prob.begin(), prob.end());
  std::vector<double> peaks;
  for (std::size_t i = 1; i + 1 < prob.size(); ++i)
    if (prob[i] > prob[i - 1] && prob[i] > prob[i + 1] &&
        prob[i] > peak_floor)
      peaks.push_back(energy[i]);
  REQUIRE(peaks.size() >= 5);
  for (std::size_t i = 1; i < peaks.size(); ++i)
    CHECK(std::abs(peaks[i] - peaks[i - 1] - w) <= 2.0 * de + 1e-12);

  // The direct distribution collapses between 2 Up and 4 Up.
  double near_2up = 0.0, near_4up = 0.0;
  for (std::size_t i = 0; i < energy.size(); ++i) {
    if (std::abs(energy[i] - 2.0 * up_au) < 0.15 * up_au)
      near_2up = std::max(near_2up, prob[i]);
    if (std::abs(energy[i] - 4.0 * up_au) < 0.15 * up_au)
      near_4up = std::max(near_4up, prob[i]);
  }
  CHECK(near_2up > 0.0);
  CHECK(near_4up > 0.0);
  CHECK(near_2up / near_4up >= 10.0);
}

TEST_CASE("rescattering amplitude: switch-off, batching, plateau reach") {
  SeparableTarget tgt = gaussian_target(0.5);
  LaserPulse pulse = make_pulse(0.06, 3.0);
  AmplitudeTrack a = unit_track(pulse);
  const double up_au = pulse.up_au();

  SUBCASE("zero coupling removes rescattering entirely") {
    SingleAtomOptions opt;
    opt.coupling_scale = 0.0;
    const C b1 = rescattering_amplitude(tgt, pulse, a, {0, 0, 1.0},
                                        pulse.duration(), opt);
    CHECK(std::abs(b1) == 0.0);
  }

  SingleAtomOptions opt;
  opt.points_per_period = 16.0;
  opt.inner_points_per_period = 16.0;

  SUBCASE("plateau outlives the direct cutoff") {
    auto along = [&](double energy_up) {
      const Vec3 p =
          std::sqrt(2.0 * energy_up * up_au) * Vec3{0.0, 0.0, 1.0};
      return rescattering_amplitude(tgt, pulse, a, p, pulse.duration(), opt);
    };
    const double at4 = std::abs(along(4.0));
    const double at9 = std::abs(along(9.0));
    const double b0_at9 = std::abs(direct_amplitude(
        tgt, pulse, a, std::sqrt(18.0 * up_au) * Vec3{0.0, 0.0, 1.0},
        pulse.duration()));
    CHECK(at4 > 0.0);
    CHECK(at9 > 0.0);
    // Rescattering keeps the 9 Up region within a couple of decades of the
    // 4 Up region, while the direct amplitude has collapsed there.
    CHECK(at9 >= at4 / 100.0);
    CHECK(at9 > 10.0 * b0_at9);
  }

  SUBCASE("batched grid evaluation equals per-point calls") {
    std::vector<double> pmag = {0.8, 1.3};
    std::vector<double> theta = {0.0, 0.9};
    AmplitudeGrid g =
        amplitude_grid(tgt, pulse, a, AmplitudeKind::rescattered_b1,
                       GridAxes::polar, pmag, theta, pulse.duration(), opt);
    for (std::size_t ia = 0; ia < pmag.size(); ++ia)
      for (std::size_t ib = 0; ib < theta.size(); ++ib) {
        const Vec3 p = g.momentum(pulse, ia, ib) + pulse.drift(pulse.duration());
        const C one =
            rescattering_amplitude(tgt, pulse, a, p, pulse.duration(), opt);
        const C batched = g.values[g.index(ia, ib)];
        CHECK(std::abs(one - batched) <= 1e-12 * (1.0 + std::abs(one)));
      }
  }
}

TEST_CASE("rescattering amplitude: stationary-phase vs explicit-grid inner "
          "integral") {
  // Short ultraviolet pulse keeps the explicit intermediate-momentum grid
  // affordable; the two quadratures must agree at the accuracy the
  // stationary-phase spreading factor can deliver.
  SeparableTarget tgt = gaussian_target(0.5);
  LaserPulse pulse = make_pulse(0.03, 2.0, 266.0);
  AmplitudeTrack a = unit_track(pulse);

  SingleAtomOptions spa;
  spa.points_per_period = 13.0;
  spa.inner_points_per_period = 13.0;
  SingleAtomOptions grd = spa;
  grd.intermediate = IntermediateMode::grid;

  for (double pm : {0.35, 0.55}) {
    const Vec3 p = pm * Vec3{0.0, 0.0, 1.0};
    const C v_spa =
        rescattering_amplitude(tgt, pulse, a, p, pulse.duration(), spa);
    const C v_grd =
        rescattering_amplitude(tgt, pulse, a, p, pulse.duration(), grd);
    CHECK(std::abs(v_spa) > 0.0);
    CHECK(std::abs(v_grd) > 0.0);
    CHECK(std::abs(v_spa - v_grd) <= 0.2 * std::abs(v_grd));
  }
}

TEST_CASE("ati spectrum: exact four-term split and axis discipline") {
  std::mt19937 rng(71003);
  std::uniform_real_distribution<double> ur(-1.0, 1.0);

  AmplitudeGrid b0, b1;
  b0.axes = b1.axes = GridAxes::polar;
  b0.axis_a = b1.axis_a = {0.2, 0.5, 0.8, 1.1};
  b0.axis_b = b1.axis_b = {0.0, 1.0, 2.0};
  b0.kind = AmplitudeKind::direct_b0;
  b1.kind = AmplitudeKind::rescattered_b1;
  const std::size_t n = b0.axis_a.size() * b0.axis_b.size();
  for (std::size_t i = 0; i < n; ++i) {
    b0.values.emplace_back(ur(rng), ur(rng));
    b1.values.emplace_back(0.1 * ur(rng), 0.1 * ur(rng));
  }

  AtiSpectrum s = ati_spectrum(b0, b1);
  for (std::size_t i = 0; i < n; ++i) {
    const double direct = std::norm(b0.values[i] + b1.values[i]);
    CHECK(std::abs(s.total[i] - direct) < 1e-12);
    CHECK(std::abs(s.total[i] - (s.direct_sq[i] + s.rescattered_sq[i] +
                                 s.cross[i])) < 1e-14);
    // The interference term is real: its two halves are conjugates.
    const C cross_c = b0.values[i] * std::conj(b1.values[i]) +
                      std::conj(b0.values[i]) * b1.values[i];
    CHECK(std::abs(cross_c.imag()) < 1e-12);
    CHECK(std::abs(cross_c.real() - s.cross[i]) < 1e-12);
  }

  SUBCASE("mismatched axes or kinds are rejected") {
    AmplitudeGrid other = b1;
    other.axis_a[1] += 1e-6;
    CHECK_THROWS_AS(ati_spectrum(b0, other), std::domain_error);
    AmplitudeGrid swapped = b0;
    CHECK_THROWS_AS(ati_spectrum(b0, swapped), std::domain_error);
  }

  SUBCASE("isotropic angular integration recovers 4 pi p") {
    AmplitudeGrid c0, c1;
    c0.axes = c1.axes = GridAxes::polar;
    c0.axis_a = c1.axis_a = {0.5, 1.0};
    c0.kind = AmplitudeKind::direct_b0;
    c1.kind = AmplitudeKind::rescattered_b1;
    const int n_th = 81;
    for (int i = 0; i < n_th; ++i) {
      const double th = 3.14159265358979323846 * i / (n_th - 1);
      c0.axis_b.push_back(th);
      c1.axis_b.push_back(th);
    }
    for (std::size_t i = 0; i < c0.axis_a.size() * c0.axis_b.size(); ++i) {
      c0.values.emplace_back(1.0, 0.0);
      c1.values.emplace_back(0.0, 0.0);
    }
    EnergySpectrum es = energy_spectrum(ati_spectrum(c0, c1));
    REQUIRE(es.energy.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
      const double p = c0.axis_a[i];
      CHECK(es.energy[i] == doctest::Approx(0.5 * p * p));
      CHECK(es.dp_de[i] ==
            doctest::Approx(4.0 * 3.14159265358979323846 * p).epsilon(1e-3));
    }

    AtiSpectrum line = ati_spectrum(b0, b1);
    line.axis_b = {0.0};  // single angle: nothing to integrate over
    CHECK_THROWS_AS(energy_spectrum(line), std::domain_error);
  }
}

TEST_CASE("hhg dipole: trivial zero, polarization confinement, half-cycle "
          "antisymmetry") {
  SeparableTarget tgt = gaussian_target(0.5);

  SUBCASE("zero field radiates nothing") {
    LaserPulse off = make_pulse(0.0, 4.0);
    AmplitudeTrack a = unit_track(off);
    std::vector<double> times;
    for (int i = 0; i <= 40; ++i) times.push_back(off.duration() * i / 40.0);
    DipoleSeries r = hhg_dipole(tgt, off, a, times);
    for (const Vec3& v : r.values) {
      CHECK(v.x == 0.0);
      CHECK(v.y == 0.0);
      CHECK(v.z == 0.0);
    }
  }

  SUBCASE("linear field on an inversion-symmetric target stays longitudinal") {
    LaserPulse pulse = make_pulse(0.05, 4.0);
    AmplitudeTrack a = unit_track(pulse);
    std::vector<double> times;
    for (int i = 0; i <= 60; ++i)
      times.push_back(pulse.duration() * (0.2 + 0.6 * i / 60.0));
    DipoleSeries r = hhg_dipole(tgt, pulse, a, times);
    double para = 0.0, perp = 0.0;
    for (const Vec3& v : r.values) {
      para = std::max(para, std::abs(v.z));
      perp = std::max(perp, std::max(std::abs(v.x), std::abs(v.y)));
    }
    CHECK(para > 0.0);
    CHECK(perp < 1e-10 * para);
  }

  SUBCASE("flat-top drive: r(t + T/2) = -r(t) mid-pulse to 5%") {
    LaserPulse pulse = make_pulse(0.04, 8.0, 800.0, Envelope::flat);
    AmplitudeTrack a = unit_track(pulse);
    const double period = 2.0 * 3.14159265358979323846 / pulse.omega0();
    const int per_half = 12;
    std::vector<double> times;
    // Cover [3T, 5T] so every compared pair sits mid-pulse.
    for (int i = 0; i <= 4 * per_half; ++i)
      times.push_back(3.0 * period + 0.5 * period * i / per_half);
    DipoleSeries r = hhg_dipole(tgt, pulse, a, times);
    double max_dev = 0.0, max_mag = 0.0;
    for (std::size_t i = 0; i + per_half < r.values.size(); ++i) {
      const Vec3 now = r.values[i];
      const Vec3 later = r.values[i + per_half];
      max_dev = std::max(max_dev, std::abs(later.z + now.z));
      max_mag = std::max(max_mag, std::abs(now.z));
    }
    CHECK(max_mag > 0.0);
    CHECK(max_dev < 0.05 * max_mag);
  }
}

TEST_CASE("harmonic spectrum: pure line, uniform-grid rule, odd-only "
          "emission") {
  const double w0 = omega_au_from_lambda_nm(800.0);

  SUBCASE("a 5 w0 sinusoid lands on order five") {
    const double cycles = 6.0;
    const int n = 1024;
    const double t_total = cycles * 2.0 * 3.14159265358979323846 / w0;
    DipoleSeries series;
    for (int j = 0; j < n; ++j) {
      const double t = t_total * j / n;
      series.times.push_back(t);
      series.values.push_back({std::sin(5.0 * w0 * t), 0.0, 0.0});
    }
    for (SpectrumWindow win : {SpectrumWindow::none, SpectrumWindow::hann}) {
      HarmonicSpectrum hs = harmonic_spectrum(series, w0, win);
      std::size_t kmax = 0;
      for (std::size_t k = 1; k < hs.intensity.size(); ++k)
        if (hs.intensity[k] > hs.intensity[kmax]) kmax = k;
      CHECK(hs.order[kmax] == doctest::Approx(5.0).epsilon(1e-9));
      if (win == SpectrumWindow::none) {
        // Integer cycle count: every other bin is orthogonal to the tone.
        for (std::size_t k = 0; k < hs.intensity.size(); ++k)
          if (k != kmax)
            CHECK(hs.intensity[k] < 1e-16 * hs.intensity[kmax]);
      }
    }
  }

  SUBCASE("non-uniform grids are rejected") {
    DipoleSeries series;
    series.times = {0.0, 1.0, 2.0, 3.1, 4.0, 5.0, 6.0, 7.0};
    series.values.assign(8, Vec3{1.0, 0.0, 0.0});
    CHECK_THROWS_AS(harmonic_spectrum(series, w0), std::domain_error);
  }

  SUBCASE("centrosymmetric response emits odd harmonics only") {
    SeparableTarget tgt = gaussian_target(0.5);
    LaserPulse pulse = make_pulse(0.05, 6.0);
    AmplitudeTrack a = unit_track(pulse);
    const int n = 1 << 11;
    std::vector<double> times;
    for (int j = 0; j < n; ++j)
      times.push_back(pulse.duration() * j / n);
    DipoleSeries r = hhg_dipole(tgt, pulse, a, times);
    HarmonicSpectrum hs = harmonic_spectrum(r, pulse.omega0());

    // Bin spacing is 1/Nc of a harmonic order; compare odd and even integer
    // orders inside the plateau, each taken as a small window maximum.
    auto at_order = [&](double order) {
      double best = 0.0;
      for (std::size_t k = 0; k < hs.order.size(); ++k)
        if (std::abs(hs.order[k] - order) < 0.3)
          best = std::max(best, hs.intensity[k]);
      return best;
    };
    double min_ratio = 1e300;
    for (int odd = 9; odd <= 13; odd += 2) {
      const double at_odd = at_order(odd);
      const double neighbor =
          std::max(at_order(odd - 1.0), at_order(odd + 1.0));
      REQUIRE(at_odd > 0.0);
      REQUIRE(neighbor > 0.0);
      min_ratio = std::min(min_ratio, at_odd / neighbor);
    }
    CHECK(min_ratio >= 100.0);
  }
}

TEST_CASE("amplitude grid: determinism, axis conventions, drift shift") {
  SeparableTarget tgt = gaussian_target(0.5);
  SingleAtomOptions opt;
  opt.points_per_period = 16.0;
  opt.inner_points_per_period = 16.0;

  SUBCASE("worker count never changes a bit") {
    LaserPulse pulse = make_pulse(0.05, 2.0);
    AmplitudeTrack a = unit_track(pulse);
    std::vector<double> pmag = {0.3, 0.7, 1.1};
    std::vector<double> theta = {0.0, 0.8, 1.6, 2.4};
    SingleAtomOptions serial = opt;
    serial.n_workers = 1;
    SingleAtomOptions threaded = opt;
    threaded.n_workers = 3;
    for (AmplitudeKind kind :
         {AmplitudeKind::direct_b0, AmplitudeKind::total}) {
      AmplitudeGrid g1 = amplitude_grid(tgt, pulse, a, kind, GridAxes::polar,
                                        pmag, theta, pulse.duration(), serial);
      AmplitudeGrid g2 = amplitude_grid(tgt, pulse, a, kind, GridAxes::polar,
                                        pmag, theta, pulse.duration(), threaded);
      REQUIRE(g1.values.size() == g2.values.size());
      for (std::size_t i = 0; i < g1.values.size(); ++i) {
        CHECK(g1.values[i].real() == g2.values[i].real());
        CHECK(g1.values[i].imag() == g2.values[i].imag());
      }
    }
  }

  SUBCASE("polar and cartesian nodes describe the same momentum") {
    LaserPulse pulse = make_pulse(0.05, 2.0);
    AmplitudeTrack a = unit_track(pulse);
    const double pm = 0.9, th = 0.7;
    AmplitudeGrid gp =
        amplitude_grid(tgt, pulse, a, AmplitudeKind::direct_b0,
                       GridAxes::polar, {pm}, {th}, pulse.duration(), opt);
    AmplitudeGrid gc = amplitude_grid(
        tgt, pulse, a, AmplitudeKind::direct_b0, GridAxes::cartesian,
        {pm * std::cos(th)}, {pm * std::sin(th)}, pulse.duration(), opt);
    CHECK(std::abs(gp.values[0] - gc.values[0]) <=
          1e-12 * (1.0 + std::abs(gp.values[0])));
  }

  SUBCASE("axes are detector momenta: the residual drift is added back") {
    // A field-envelope pulse leaves a nonzero drift at the end of the pulse.
    LaserPulse pulse = make_pulse(0.05, 2.0, 800.0, Envelope::sin2_on_field);
    AmplitudeTrack a = unit_track(pulse);
    const Vec3 drift_end = pulse.drift(pulse.duration());
    CHECK(norm(drift_end) > 1e-6);
    const double pm = 0.8;
    AmplitudeGrid g =
        amplitude_grid(tgt, pulse, a, AmplitudeKind::direct_b0,
                       GridAxes::polar, {pm}, {0.0}, pulse.duration(), opt);
    const Vec3 canonical = pm * pulse.axis1() + drift_end;
    const C direct =
        direct_amplitude(tgt, pulse, a, canonical, pulse.duration(), opt);
    CHECK(std::abs(g.values[0] - direct) <=
          1e-12 * (1.0 + std::abs(direct)));
  }

  SUBCASE("malformed axes are rejected") {
    LaserPulse pulse = make_pulse(0.05, 2.0);
    AmplitudeTrack a = unit_track(pulse);
    CHECK_THROWS_AS(
        amplitude_grid(tgt, pulse, a, AmplitudeKind::direct_b0,
                       GridAxes::polar, {0.5, 0.5}, {0.0}, pulse.duration()),
        std::domain_error);
    CHECK_THROWS_AS(
        amplitude_grid(tgt, pulse, a, AmplitudeKind::direct_b0,
                       GridAxes::polar, {}, {0.0}, pulse.duration()),
        std::domain_error);
  }
}
