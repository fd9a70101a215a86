#pragma once

// Independent numerical oracles for the test suites. Everything here is
// deliberately dumb and self-contained: composite Boole quadrature, central
// finite differences, and a seeded RNG. None of it shares code with the
// library under test.

#include <cmath>
#include <complex>
#include <random>

namespace oracle {

// Composite Boole rule on n panels (4 sub-intervals each, O(h^6)).
template <class F>
auto integrate(F&& f, double a, double b, int panels) {
  using T = decltype(f(a));
  const double h = (b - a) / (4.0 * panels);
  T acc = f(a) * 0.0;
  for (int p = 0; p < panels; ++p) {
    const double x0 = a + 4.0 * p * h;
    acc += (2.0 * h / 45.0) *
           (7.0 * f(x0) + 32.0 * f(x0 + h) + 12.0 * f(x0 + 2.0 * h) +
            32.0 * f(x0 + 3.0 * h) + 7.0 * f(x0 + 4.0 * h));
  }
  return acc;
}

// Five-point central first derivative, O(h^4).
template <class F>
auto deriv(F&& f, double x, double h) {
  return (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) /
         (12.0 * h);
}

class Rng {
 public:
  explicit Rng(unsigned long long seed) : gen_(seed) {}
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
  }
  int uniform_int(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(gen_);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace oracle
