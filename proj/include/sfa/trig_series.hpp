#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace sfa {

// Finite trigonometric series  s(t) = c0 + c1*t + sum_k a_k cos(nu_k t + phi_k).
//
// Drift momenta, their antiderivatives, and |alpha|^2 antiderivatives for all
// supported pulse envelopes are exactly of this form, which keeps every
// action integral closed-form and valid at complex t (saddle-point work).
class TrigSeries {
 public:
  struct Term {
    double amp;
    double freq;   // > 0
    double phase;
  };

  TrigSeries() = default;
  TrigSeries(double c0, double c1, std::vector<Term> terms)
      : c0_(c0), c1_(c1), terms_(std::move(terms)) {}

  double constant() const { return c0_; }
  double slope() const { return c1_; }
  const std::vector<Term>& terms() const { return terms_; }

  // Folds near-zero frequencies into the constant; merging keeps series short
  // after products (cos(a)cos(b) expansions can produce freq ~ 0 terms).
  void add_term(double amp, double freq, double phase, double freq_eps) {
    if (std::abs(amp) == 0.0) return;
    if (std::abs(freq) < freq_eps) {
      c0_ += amp * std::cos(phase);
      return;
    }
    if (freq < 0.0) {  // cos(-x) = cos(x)
      freq = -freq;
      phase = -phase;
    }
    for (auto& t : terms_) {
      if (std::abs(t.freq - freq) < freq_eps) {
        // cos addition: combine equal-frequency terms via phasors.
        double re = t.amp * std::cos(t.phase) + amp * std::cos(phase);
        double im = t.amp * std::sin(t.phase) + amp * std::sin(phase);
        t.amp = std::hypot(re, im);
        t.phase = (t.amp == 0.0) ? 0.0 : std::atan2(im, re);
        return;
      }
    }
    terms_.push_back({amp, freq, phase});
  }

  template <class T>
  T eval(T t) const {
    T s = T(c0_) + T(c1_) * t;
    for (const auto& term : terms_)
      s += T(term.amp) * std::cos(T(term.freq) * t + T(term.phase));
    return s;
  }

  // d/dt: a cos(nu t + phi) -> -a nu sin(nu t + phi) = a nu cos(nu t + phi + pi/2)
  TrigSeries derivative() const {
    TrigSeries d(c1_, 0.0, {});
    d.terms_.reserve(terms_.size());
    for (const auto& t : terms_)
      d.terms_.push_back({t.amp * t.freq, t.freq, t.phase + pi_half()});
    return d;
  }

  // Antiderivative with integration constant 0 for the oscillating part:
  // a cos(nu t + phi) -> (a/nu) sin(nu t + phi) = (a/nu) cos(nu t + phi - pi/2).
  // The linear part must be absent (antiderivatives of drift-squared series
  // never feed back into another antiderivative).
  TrigSeries antiderivative() const {
    if (c1_ != 0.0)
      throw std::logic_error("TrigSeries::antiderivative: slope present");
    TrigSeries a(0.0, c0_, {});
    a.terms_.reserve(terms_.size());
    for (const auto& t : terms_)
      a.terms_.push_back({t.amp / t.freq, t.freq, t.phase - pi_half()});
    return a;
  }

  // Pointwise product, expanded back into a trigonometric series via
  // cos A cos B = (cos(A-B) + cos(A+B))/2. freq_eps controls folding of
  // degenerate difference frequencies.
  static TrigSeries product(const TrigSeries& f, const TrigSeries& g,
                            double freq_eps) {
    if (f.c1_ != 0.0 || g.c1_ != 0.0)
      throw std::logic_error("TrigSeries::product: slope present");
    TrigSeries r(f.c0_ * g.c0_, 0.0, {});
    for (const auto& t : g.terms_) r.add_term(f.c0_ * t.amp, t.freq, t.phase, freq_eps);
    for (const auto& t : f.terms_) r.add_term(g.c0_ * t.amp, t.freq, t.phase, freq_eps);
    for (const auto& a : f.terms_) {
      for (const auto& b : g.terms_) {
        double half = 0.5 * a.amp * b.amp;
        r.add_term(half, a.freq - b.freq, a.phase - b.phase, freq_eps);
        r.add_term(half, a.freq + b.freq, a.phase + b.phase, freq_eps);
      }
    }
    return r;
  }

  TrigSeries scaled(double s) const {
    TrigSeries r(s * c0_, s * c1_, terms_);
    for (auto& t : r.terms_) t.amp *= s;
    return r;
  }

  std::size_t size() const { return terms_.size(); }

 private:
  static constexpr double pi_half() { return 1.5707963267948966; }

  double c0_ = 0.0;
  double c1_ = 0.0;
  std::vector<Term> terms_;
};

}  // namespace sfa
