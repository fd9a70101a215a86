#include "sfa/quadrature.hpp"

#include <map>
#include <mutex>
#include <numbers>

namespace sfa {

namespace {

GaussLegendre compute_gl(int n) {
  GaussLegendre g;
  g.x.resize(n);
  g.w.resize(n);
  // Newton iteration on Legendre polynomials from Chebyshev-like seeds.
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double p0 = 0.0, p1 = 0.0;
    for (int it = 0; it < 100; ++it) {
      p0 = 1.0;
      p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      double dp = n * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    p0 = 1.0;
    p1 = 0.0;
    for (int j = 0; j < n; ++j) {
      double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
    }
    double dp = n * (x * p0 - p1) / (x * x - 1.0);
    g.x[i] = x;
    g.w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return g;
}

}  // namespace

const GaussLegendre& gauss_legendre(int n) {
  if (n < 1) throw std::domain_error("gauss_legendre: n must be >= 1");
  static std::mutex mu;
  static std::map<int, GaussLegendre> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gl(n)).first;
  return it->second;
}

CubicSpline::CubicSpline(double x0, double dx,
                         std::vector<std::complex<double>> y)
    : x0_(x0), dx_(dx), n_(y.size()), y_(std::move(y)) {
  if (n_ < 2) throw std::domain_error("CubicSpline: need >= 2 samples");
  if (!(dx > 0.0)) throw std::domain_error("CubicSpline: dx must be > 0");

  // Not-a-knot spline: second derivatives m_ solve the C1-continuity rows
  // (1/6) m_{i-1} + (2/3) m_i + (1/6) m_{i+1} = d2(i) with the third
  // derivative continuous across the first and last interior nodes. A
  // natural spline would force m = 0 at the ends and leak an O(dx^2 f'')
  // error several intervals into the table.
  m_.assign(n_, {});
  auto d2 = [&](std::size_t i) {
    return (y_[i + 1] - 2.0 * y_[i] + y_[i - 1]) / (dx_ * dx_);
  };
  if (n_ == 3) {
    m_[0] = m_[1] = m_[2] = d2(1);
  } else if (n_ >= 4) {
    // Eliminating m_0 = 2 m_1 - m_2 from the node-1 row decouples m_1 (and
    // symmetrically m_{n-2}); the remaining system is tridiagonal.
    m_[1] = d2(1);
    m_[n_ - 2] = d2(n_ - 2);
    const std::size_t lo = 2;
    const std::size_t hi = n_ - 3;
    if (hi >= lo) {
      const std::size_t nu = hi - lo + 1;
      std::vector<std::complex<double>> rhs(nu);
      for (std::size_t j = 0; j < nu; ++j) rhs[j] = d2(lo + j);
      rhs[0] -= m_[1] / 6.0;
      rhs[nu - 1] -= m_[n_ - 2] / 6.0;
      // Thomas algorithm with constant bands (1/6, 2/3, 1/6).
      std::vector<double> cp(nu, 0.0);
      cp[0] = (1.0 / 6.0) / (2.0 / 3.0);
      rhs[0] *= 1.0 / (2.0 / 3.0);
      for (std::size_t j = 1; j < nu; ++j) {
        const double denom = 2.0 / 3.0 - cp[j - 1] / 6.0;
        cp[j] = (1.0 / 6.0) / denom;
        rhs[j] = (rhs[j] - rhs[j - 1] / 6.0) / denom;
      }
      m_[hi] = rhs[nu - 1];
      for (std::size_t j = nu - 1; j-- > 0;)
        m_[lo + j] = rhs[j] - cp[j] * m_[lo + j + 1];
    }
    m_[0] = 2.0 * m_[1] - m_[2];
    m_[n_ - 1] = 2.0 * m_[n_ - 2] - m_[n_ - 3];
  }

  // Per-node cumulative integrals: over [x_i, x_{i+1}] the cubic's
  // integral is dx*(y_i + y_{i+1})/2 - dx^3*(m_i + m_{i+1})/24.
  cum_.assign(n_, {});
  for (std::size_t i = 0; i + 1 < n_; ++i) {
    cum_[i + 1] = cum_[i] + dx_ * 0.5 * (y_[i] + y_[i + 1]) -
                  dx_ * dx_ * dx_ / 24.0 * (m_[i] + m_[i + 1]);
  }
}

std::size_t CubicSpline::locate(double x) const {
  double u = (x - x0_) / dx_;
  if (u <= 0.0) return 0;
  auto i = static_cast<std::size_t>(u);
  if (i >= n_ - 1) return n_ - 2;
  return i;
}

std::complex<double> CubicSpline::operator()(double x) const {
  const std::size_t i = locate(x);
  const double xa = x0_ + dx_ * double(i);
  const double A = (xa + dx_ - x) / dx_;
  const double B = 1.0 - A;
  return A * y_[i] + B * y_[i + 1] +
         ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[i + 1]) *
             (dx_ * dx_ / 6.0);
}

std::complex<double> CubicSpline::integral(double x) const {
  const std::size_t i = locate(x);
  const double xa = x0_ + dx_ * double(i);
  std::complex<double> acc = cum_[i];
  // Integrate the cubic over [xa, x] in the A/B parametrization:
  // dt = dx*dB; int y = dx*[ y_i (B - B^2/2) + y_{i+1} B^2/2
  //   + dx^2/6 ( m_i ((1-B)^4/4 - (1-B)^2/2 + 1/4 ... ) ) ] -- expand directly.
  const double B = (x - xa) / dx_;
  const double A = 1.0 - B;
  // int_0^B A' dB' terms with A' = 1-B'.
  const double iA = B - 0.5 * B * B;            // int (1-B')
  const double iB = 0.5 * B * B;                // int B'
  const double iA3 = (1.0 - A * A * A * A) / 4.0;  // int (1-B')^3 = (1-A^4)/4
  const double iB3 = B * B * B * B / 4.0;       // int B'^3
  acc += dx_ * (y_[i] * iA + y_[i + 1] * iB +
                (dx_ * dx_ / 6.0) *
                    (m_[i] * (iA3 - iA) + m_[i + 1] * (iB3 - iB)));
  return acc;
}

}  // namespace sfa
