#pragma once

// Truncated Taylor series ("jets") in a single real variable.
//
// A Jet<T> holds the coefficients c[0..order] of f(x0 + t) = sum c[k] t^k.
// Arithmetic propagates the coefficients exactly (up to rounding), so the
// k-th derivative at x0 is k! * c[k].

#include <cassert>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace ppt {

template <typename T>
class Jet {
 public:
  Jet() = default;
  explicit Jet(std::size_t order, T value = T{}) : c_(order + 1, T{}) { c_[0] = value; }

  // Independent variable x0 + t.
  static Jet variable(std::size_t order, T x0) {
    Jet j(order, x0);
    if (order >= 1) j.c_[1] = T{1};
    return j;
  }

  std::size_t order() const { return c_.size() - 1; }
  const T& operator[](std::size_t k) const { return c_[k]; }
  T& operator[](std::size_t k) { return c_[k]; }
  const std::vector<T>& coefficients() const { return c_; }

  Jet& operator+=(const Jet& o) {
    assert(o.c_.size() == c_.size());
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    assert(o.c_.size() == c_.size());
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
    return *this;
  }
  Jet& operator*=(T s) {
    for (auto& v : c_) v *= s;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, T s) { return a *= s; }
  friend Jet operator*(T s, Jet a) { return a *= s; }
  friend Jet operator-(Jet a) { return a *= T{-1}; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    assert(a.c_.size() == b.c_.size());
    Jet r(a.order());
    for (std::size_t k = 0; k < a.c_.size(); ++k) {
      T s{};
      for (std::size_t j = 0; j <= k; ++j) s += a.c_[j] * b.c_[k - j];
      r.c_[k] = s;
    }
    return r;
  }

  friend Jet operator/(const Jet& a, const Jet& b) {
    assert(a.c_.size() == b.c_.size());
    Jet r(a.order());
    for (std::size_t k = 0; k < a.c_.size(); ++k) {
      T s = a.c_[k];
      for (std::size_t j = 1; j <= k; ++j) s -= b.c_[j] * r.c_[k - j];
      r.c_[k] = s / b.c_[0];
    }
    return r;
  }

 private:
  std::vector<T> c_;
};

template <typename T>
Jet<T> sqrt(const Jet<T>& a) {
  using std::sqrt;
  Jet<T> r(a.order());
  r[0] = sqrt(a[0]);
  for (std::size_t k = 1; k <= a.order(); ++k) {
    T s = a[k];
    for (std::size_t j = 1; j < k; ++j) s -= r[j] * r[k - j];
    r[k] = s / (T{2} * r[0]);
  }
  return r;
}

// Simultaneous sine and cosine via the coupled recurrences
// k s_k = sum j u_j c_{k-j},  k c_k = -sum j u_j s_{k-j}.
template <typename T>
void sincos(const Jet<T>& u, Jet<T>& s, Jet<T>& c) {
  using std::cos;
  using std::sin;
  const std::size_t n = u.order();
  s = Jet<T>(n);
  c = Jet<T>(n);
  s[0] = sin(u[0]);
  c[0] = cos(u[0]);
  for (std::size_t k = 1; k <= n; ++k) {
    T ss{}, cc{};
    for (std::size_t j = 1; j <= k; ++j) {
      const T w = T(static_cast<double>(j)) * u[j];
      ss += w * c[k - j];
      cc -= w * s[k - j];
    }
    s[k] = ss / T(static_cast<double>(k));
    c[k] = cc / T(static_cast<double>(k));
  }
}

template <typename T>
Jet<T> conj(const Jet<T>& a) {
  Jet<T> r = a;
  for (std::size_t k = 0; k <= a.order(); ++k) r[k] = std::conj(a[k]);
  return r;
}

}  // namespace ppt
