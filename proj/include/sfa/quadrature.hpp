#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace sfa {

namespace detail {

template <class T>
double mag(const T& v) {
  return std::abs(v);
}

template <class F, class R>
R simpson_rec(F& f, double a, double b, R fa, R fm, R fb, R whole, double tol,
              int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const R flm = f(lm), frm = f(rm);
  const R left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const R right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const R delta = left + right - whole;
  // Second condition: once delta sits at the rounding floor of the panel
  // sums, refining further only resolves noise; without it a sharply peaked
  // integrand with a large local magnitude recurses to full depth.
  if (depth <= 0 || mag(delta) <= 15.0 * tol ||
      mag(delta) <= 1e-15 * (mag(left) + mag(right)))
    return left + right + delta * (1.0 / 15.0);
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson quadrature; works for real or complex integrands. tol is
// an absolute tolerance on the result.
template <class F>
auto adaptive_simpson(F&& f, double a, double b, double tol,
                      int max_depth = 48) {
  using R = decltype(f(a));
  if (a == b) return R{};
  const double m = 0.5 * (a + b);
  const R fa = f(a), fm = f(m), fb = f(b);
  const R whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

struct GaussLegendre {
  std::vector<double> x;  // nodes on [-1,1]
  std::vector<double> w;
};

// Cached Gauss-Legendre rule; thread-safe.
const GaussLegendre& gauss_legendre(int n);

// Integrate f over [a,b] with an n-point Gauss-Legendre rule.
template <class F>
auto gauss_legendre_integrate(F&& f, double a, double b, int n) {
  const auto& rule = gauss_legendre(n);
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  using R = decltype(f(a));
  R acc{};
  for (int i = 0; i < n; ++i) acc += (half * rule.w[i]) * f(mid + half * rule.x[i]);
  return acc;
}

// Not-a-knot cubic spline on a uniform grid, complex-valued, with an exact
// per-interval antiderivative (cumulative from the first node). Unlike the
// natural end condition, not-a-knot keeps fourth-order accuracy up to the
// table ends and reproduces cubic data exactly.
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(double x0, double dx, std::vector<std::complex<double>> y);

  std::complex<double> operator()(double x) const;
  // int_{x0}^{x} of the spline.
  std::complex<double> integral(double x) const;

  double x_min() const { return x0_; }
  double x_max() const { return x0_ + dx_ * double(n_ - 1); }

 private:
  std::size_t locate(double x) const;

  double x0_ = 0.0, dx_ = 1.0;
  std::size_t n_ = 0;
  std::vector<std::complex<double>> y_, m_;    // values and second derivatives
  std::vector<std::complex<double>> cum_;      // cumulative integrals at nodes
};

}  // namespace sfa
