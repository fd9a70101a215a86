#pragma once

#include <cmath>
#include <complex>

namespace sfa {

// Minimal 3-vector over double or complex<double>. The dot product is
// bilinear (no conjugation): saddle-point formulas continue p.p analytically
// to complex momenta, which requires sum(a_i*b_i) rather than a Hermitian
// inner product.
template <class T>
struct V3 {
  T x{}, y{}, z{};

  V3() = default;
  V3(T x_, T y_, T z_) : x(x_), y(y_), z(z_) {}

  V3 operator-() const { return {-x, -y, -z}; }
  V3& operator+=(const V3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  V3& operator-=(const V3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
};

using Vec3 = V3<double>;
using CVec3 = V3<std::complex<double>>;

template <class T, class S>
inline auto operator*(const S& s, const V3<T>& v) -> V3<decltype(s * v.x)> {
  return {s * v.x, s * v.y, s * v.z};
}

template <class T, class S>
inline auto operator*(const V3<T>& v, const S& s) -> V3<decltype(v.x * s)> {
  return {v.x * s, v.y * s, v.z * s};
}

template <class A, class B>
inline auto dot(const V3<A>& a, const V3<B>& b) -> decltype(a.x * b.x) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

template <class A, class B>
inline auto operator+(const V3<A>& a, const V3<B>& b)
    -> V3<decltype(a.x + b.x)> {
  return {a.x + b.x, a.y + b.y, a.z + b.z};
}

template <class A, class B>
inline auto operator-(const V3<A>& a, const V3<B>& b)
    -> V3<decltype(a.x - b.x)> {
  return {a.x - b.x, a.y - b.y, a.z - b.z};
}

inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

inline CVec3 to_complex(const Vec3& v) {
  return {std::complex<double>(v.x), std::complex<double>(v.y),
          std::complex<double>(v.z)};
}

inline Vec3 real_part(const CVec3& v) {
  return {v.x.real(), v.y.real(), v.z.real()};
}

inline CVec3 conj(const CVec3& v) {
  return {std::conj(v.x), std::conj(v.y), std::conj(v.z)};
}

}  // namespace sfa
