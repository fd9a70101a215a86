#pragma once

#include <complex>
#include <functional>

namespace sfa {

// Computes int_0^inf g(p) / (p^2 + k^2)^order dp for Re k > 0 and
// order in {1, 2}. The integrand has a regularized pole at p = |Im k|;
// it is removed by subtracting the first (order 1) or first two (order 2)
// Taylor terms of g there, whose half-line integrals are known in closed
// form. Quadrature then only sees a bounded remainder, so the result stays
// accurate down to Re k ~ 1e-8. g must be smooth on [0, p_cut] and
// negligible beyond p_cut up to an algebraic tail (handled by a 1/p
// substitution).
std::complex<double> pole_weighted_integral(
    const std::function<std::complex<double>(double)>& g,
    std::complex<double> k, int order, double p_cut, double tol = 1e-10);

}  // namespace sfa
