#pragma once

// Truncated Taylor arithmetic: a value and its first three derivatives with
// respect to one scalar. Trajectory generators evaluate their closed-form
// geometry on Jet3 so third-order path derivatives come out exact instead of
// finite-differenced.

#include <cmath>

namespace diffdrive {

struct Jet3 {
  double f = 0.0;   // value
  double d1 = 0.0;  // first derivative
  double d2 = 0.0;
  double d3 = 0.0;

  static constexpr Jet3 constant(double c) { return {c, 0.0, 0.0, 0.0}; }
  static constexpr Jet3 variable(double v) { return {v, 1.0, 0.0, 0.0}; }
};

constexpr Jet3 operator+(const Jet3& a, const Jet3& b) {
  return {a.f + b.f, a.d1 + b.d1, a.d2 + b.d2, a.d3 + b.d3};
}

constexpr Jet3 operator-(const Jet3& a, const Jet3& b) {
  return {a.f - b.f, a.d1 - b.d1, a.d2 - b.d2, a.d3 - b.d3};
}

constexpr Jet3 operator-(const Jet3& a) { return {-a.f, -a.d1, -a.d2, -a.d3}; }

// Leibniz rule through order three.
constexpr Jet3 operator*(const Jet3& a, const Jet3& b) {
  return {a.f * b.f,
          a.d1 * b.f + a.f * b.d1,
          a.d2 * b.f + 2.0 * a.d1 * b.d1 + a.f * b.d2,
          a.d3 * b.f + 3.0 * a.d2 * b.d1 + 3.0 * a.d1 * b.d2 + a.f * b.d3};
}

// q = a/b solved order by order from q*b = a.
constexpr Jet3 operator/(const Jet3& a, const Jet3& b) {
  Jet3 q{};
  q.f = a.f / b.f;
  q.d1 = (a.d1 - q.f * b.d1) / b.f;
  q.d2 = (a.d2 - 2.0 * q.d1 * b.d1 - q.f * b.d2) / b.f;
  q.d3 = (a.d3 - 3.0 * q.d2 * b.d1 - 3.0 * q.d1 * b.d2 - q.f * b.d3) / b.f;
  return q;
}

constexpr Jet3 operator+(const Jet3& a, double c) { return {a.f + c, a.d1, a.d2, a.d3}; }
constexpr Jet3 operator+(double c, const Jet3& a) { return a + c; }
constexpr Jet3 operator-(const Jet3& a, double c) { return {a.f - c, a.d1, a.d2, a.d3}; }
constexpr Jet3 operator-(double c, const Jet3& a) { return {c - a.f, -a.d1, -a.d2, -a.d3}; }
constexpr Jet3 operator*(const Jet3& a, double c) { return {a.f * c, a.d1 * c, a.d2 * c, a.d3 * c}; }
constexpr Jet3 operator*(double c, const Jet3& a) { return a * c; }
constexpr Jet3 operator/(const Jet3& a, double c) { return {a.f / c, a.d1 / c, a.d2 / c, a.d3 / c}; }
constexpr Jet3 operator/(double c, const Jet3& a) { return Jet3::constant(c) / a; }

// Chain rule for u = g(t): the inner derivatives u', u'', u''' multiply the
// outer sin/cos derivatives via Faa di Bruno through order three.
inline Jet3 sin(const Jet3& u) {
  const double s = std::sin(u.f), c = std::cos(u.f);
  Jet3 r;
  r.f = s;
  r.d1 = c * u.d1;
  r.d2 = c * u.d2 - s * u.d1 * u.d1;
  r.d3 = c * u.d3 - 3.0 * s * u.d1 * u.d2 - c * u.d1 * u.d1 * u.d1;
  return r;
}

inline Jet3 cos(const Jet3& u) {
  const double s = std::sin(u.f), c = std::cos(u.f);
  Jet3 r;
  r.f = c;
  r.d1 = -s * u.d1;
  r.d2 = -s * u.d2 - c * u.d1 * u.d1;
  r.d3 = -s * u.d3 - 3.0 * c * u.d1 * u.d2 + s * u.d1 * u.d1 * u.d1;
  return r;
}

}  // namespace diffdrive
