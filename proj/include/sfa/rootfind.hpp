#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>

#include "sfa/errors.hpp"

namespace sfa {

// Brent-Dekker bracketed root find: inverse quadratic or secant candidate
// steps, forced back to bisection whenever the candidate leaves the safe
// subinterval or fails to shrink the previous steps fast enough. This
// safeguard matters when one endpoint carries a residual orders of magnitude
// larger than the other; a plain secant update stalls there. Requires f(a)
// and f(b) of opposite sign.
template <class F>
double brent_root(F&& f, double a, double b, double tol, int max_iter = 200) {
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0))
    throw std::domain_error("brent_root: root not bracketed");
  if (std::abs(fa) < std::abs(fb)) {
    std::swap(a, b);
    std::swap(fa, fb);
  }
  // b is the current best iterate, c the previous one, d the one before.
  double c = a, fc = fa, d = c;
  bool bisected = true;
  for (int it = 0; it < max_iter; ++it) {
    if (fb == 0.0 || std::abs(b - a) < tol) return b;
    double s;
    if (fa != fc && fb != fc) {
      s = a * fb * fc / ((fa - fb) * (fa - fc)) +
          b * fa * fc / ((fb - fa) * (fb - fc)) +
          c * fa * fb / ((fc - fa) * (fc - fb));
    } else {
      s = b - fb * (b - a) / (fb - fa);
    }
    const double edge = 0.25 * (3.0 * a + b);
    const double prev = bisected ? std::abs(b - c) : std::abs(c - d);
    if (!(s > std::min(edge, b) && s < std::max(edge, b)) ||
        std::abs(s - b) >= 0.5 * prev || prev < tol) {
      s = 0.5 * (a + b);
      bisected = true;
    } else {
      bisected = false;
    }
    const double fs = f(s);
    d = c;
    c = b;
    fc = fb;
    if ((fa > 0.0) != (fs > 0.0)) {
      b = s;
      fb = fs;
    } else {
      a = s;
      fa = fs;
    }
    if (std::abs(fa) < std::abs(fb)) {
      std::swap(a, b);
      std::swap(fa, fb);
    }
  }
  return b;
}

// Solve A x = b in place for small dense complex systems (n <= 8) with
// partial pivoting; A is row-major n*n.
template <int N>
void solve_dense_complex(std::array<std::complex<double>, N * N>& a,
                         std::array<std::complex<double>, N>& b) {
  for (int col = 0; col < N; ++col) {
    int piv = col;
    double best = std::abs(a[col * N + col]);
    for (int r = col + 1; r < N; ++r) {
      double v = std::abs(a[r * N + col]);
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best == 0.0) throw convergence_error("singular Jacobian");
    if (piv != col) {
      for (int c = col; c < N; ++c) std::swap(a[col * N + c], a[piv * N + c]);
      std::swap(b[col], b[piv]);
    }
    const std::complex<double> inv = 1.0 / a[col * N + col];
    for (int r = col + 1; r < N; ++r) {
      const std::complex<double> factor = a[r * N + col] * inv;
      if (factor == 0.0) continue;
      for (int c = col + 1; c < N; ++c) a[r * N + c] -= factor * a[col * N + c];
      b[r] -= factor * b[col];
    }
  }
  for (int r = N - 1; r >= 0; --r) {
    std::complex<double> acc = b[r];
    for (int c = r + 1; c < N; ++c) acc -= a[r * N + c] * b[c];
    b[r] = acc / a[r * N + r];
  }
}

// Damped Newton for F: C^N -> C^N with a user-supplied residual+Jacobian
// callback. Halves the step until the residual norm decreases (up to 30
// halvings), which tames the strong nonlinearity of saddle equations far
// from the root.
template <int N, class FJ>
bool newton_complex(FJ&& fj, std::array<std::complex<double>, N>& x,
                    double tol, int max_iter = 80) {
  std::array<std::complex<double>, N> f{};
  std::array<std::complex<double>, N * N> jac{};
  auto norm_of = [](const std::array<std::complex<double>, N>& v) {
    double s = 0.0;
    for (const auto& c : v) s += std::norm(c);
    return std::sqrt(s);
  };
  fj(x, f, jac);
  double fn = norm_of(f);
  for (int it = 0; it < max_iter; ++it) {
    if (fn < tol) return true;
    std::array<std::complex<double>, N * N> a = jac;
    std::array<std::complex<double>, N> step = f;
    try {
      solve_dense_complex<N>(a, step);
    } catch (const convergence_error&) {
      return false;
    }
    double lambda = 1.0;
    std::array<std::complex<double>, N> xs{}, fs{};
    std::array<std::complex<double>, N * N> js{};
    for (int h = 0; h < 30; ++h) {
      for (int i = 0; i < N; ++i) xs[i] = x[i] - lambda * step[i];
      fj(xs, fs, js);
      const double fn2 = norm_of(fs);
      if (fn2 < fn || fn2 < tol) {
        x = xs;
        f = fs;
        jac = js;
        fn = fn2;
        break;
      }
      lambda *= 0.5;
      if (h == 29) return false;
    }
  }
  return norm_of(f) < tol;
}

}  // namespace sfa
