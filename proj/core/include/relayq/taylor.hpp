#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <ostream>

namespace relayq {

// Truncated Taylor series in one variable: c[k] is the k-th normalized
// coefficient f^(k)(x0) / k!. Arithmetic is exact up to order K.
template <std::size_t K>
class Taylor {
 public:
  static constexpr std::size_t order = K;

  constexpr Taylor() : c_{} {}
  constexpr Taylor(double v) : c_{} { c_[0] = v; }  // NOLINT: implicit by design

  // Independent variable expanded at x0 with unit seed.
  static Taylor variable(double x0, double seed = 1.0) {
    Taylor t(x0);
    if constexpr (K >= 1) t.c_[1] = seed;
    return t;
  }

  double value() const { return c_[0]; }
  double deriv() const {
    if constexpr (K >= 1) return c_[1];
    return 0.0;
  }
  // k-th derivative with respect to the expansion variable.
  double derivative(std::size_t k) const {
    double f = 1.0;
    for (std::size_t i = 2; i <= k; ++i) f *= static_cast<double>(i);
    return c_[k] * f;
  }
  double coeff(std::size_t k) const { return c_[k]; }
  double& coeff(std::size_t k) { return c_[k]; }

  Taylor operator-() const {
    Taylor r;
    for (std::size_t k = 0; k <= K; ++k) r.c_[k] = -c_[k];
    return r;
  }
  Taylor operator+() const { return *this; }

  Taylor& operator+=(const Taylor& o) {
    for (std::size_t k = 0; k <= K; ++k) c_[k] += o.c_[k];
    return *this;
  }
  Taylor& operator-=(const Taylor& o) {
    for (std::size_t k = 0; k <= K; ++k) c_[k] -= o.c_[k];
    return *this;
  }
  Taylor& operator*=(const Taylor& o) {
    Taylor r;
    for (std::size_t k = 0; k <= K; ++k) {
      double s = 0.0;
      for (std::size_t j = 0; j <= k; ++j) s += c_[j] * o.c_[k - j];
      r.c_[k] = s;
    }
    *this = r;
    return *this;
  }
  Taylor& operator/=(const Taylor& o) {
    Taylor q;
    for (std::size_t k = 0; k <= K; ++k) {
      double s = c_[k];
      for (std::size_t j = 0; j < k; ++j) s -= q.c_[j] * o.c_[k - j];
      q.c_[k] = s / o.c_[0];
    }
    *this = q;
    return *this;
  }
  Taylor& operator+=(double v) { c_[0] += v; return *this; }
  Taylor& operator-=(double v) { c_[0] -= v; return *this; }
  Taylor& operator*=(double v) {
    for (auto& x : c_) x *= v;
    return *this;
  }
  Taylor& operator/=(double v) {
    for (auto& x : c_) x /= v;
    return *this;
  }

  friend Taylor operator+(Taylor a, const Taylor& b) { return a += b; }
  friend Taylor operator-(Taylor a, const Taylor& b) { return a -= b; }
  friend Taylor operator*(Taylor a, const Taylor& b) { return a *= b; }
  friend Taylor operator/(Taylor a, const Taylor& b) { return a /= b; }
  friend Taylor operator+(Taylor a, double b) { return a += b; }
  friend Taylor operator-(Taylor a, double b) { return a -= b; }
  friend Taylor operator*(Taylor a, double b) { return a *= b; }
  friend Taylor operator/(Taylor a, double b) { return a /= b; }
  friend Taylor operator+(double a, Taylor b) { return b += a; }
  friend Taylor operator-(double a, const Taylor& b) { return Taylor(a) -= b; }
  friend Taylor operator*(double a, Taylor b) { return b *= a; }
  friend Taylor operator/(double a, const Taylor& b) { return Taylor(a) /= b; }

  friend bool operator==(const Taylor& a, const Taylor& b) { return a.c_ == b.c_; }

  friend std::ostream& operator<<(std::ostream& os, const Taylor& t) {
    os << '[';
    for (std::size_t k = 0; k <= K; ++k) os << (k ? ", " : "") << t.c_[k];
    return os << ']';
  }

 private:
  std::array<double, K + 1> c_;
};

// Value plus first derivative.
using DualScalar = Taylor<1>;

namespace detail {

// Coefficients k >= 1 of exp(a), given b0 = exp(a0).
template <std::size_t K>
void exp_tail(const Taylor<K>& a, Taylor<K>& b, double b0) {
  std::array<double, K + 1> e{};
  e[0] = b0;
  for (std::size_t k = 1; k <= K; ++k) {
    double s = 0.0;
    for (std::size_t j = 1; j <= k; ++j) s += static_cast<double>(j) * a.coeff(j) * e[k - j];
    e[k] = s / static_cast<double>(k);
    b.coeff(k) = e[k];
  }
}

// Coefficients k >= 1 of log(d), where d = denominator series.
template <std::size_t K>
void log_tail(const Taylor<K>& d, Taylor<K>& b) {
  for (std::size_t k = 1; k <= K; ++k) {
    double s = static_cast<double>(k) * d.coeff(k);
    for (std::size_t j = 1; j < k; ++j) s -= static_cast<double>(j) * b.coeff(j) * d.coeff(k - j);
    b.coeff(k) = s / (static_cast<double>(k) * d.coeff(0));
  }
}

}  // namespace detail

template <std::size_t K>
Taylor<K> exp(const Taylor<K>& a) {
  Taylor<K> b(std::exp(a.value()));
  detail::exp_tail(a, b, b.value());
  return b;
}

template <std::size_t K>
Taylor<K> expm1(const Taylor<K>& a) {
  Taylor<K> b(std::expm1(a.value()));
  detail::exp_tail(a, b, std::exp(a.value()));
  return b;
}

template <std::size_t K>
Taylor<K> log(const Taylor<K>& a) {
  Taylor<K> b(std::log(a.value()));
  detail::log_tail(a, b);
  return b;
}

template <std::size_t K>
Taylor<K> log1p(const Taylor<K>& a) {
  Taylor<K> b(std::log1p(a.value()));
  detail::log_tail(a + 1.0, b);
  return b;
}

// Integer power by repeated squaring; exact at a zero base.
template <std::size_t K>
Taylor<K> ipow(Taylor<K> base, unsigned n) {
  Taylor<K> r(1.0);
  while (n) {
    if (n & 1u) r *= base;
    n >>= 1u;
    if (n) base *= base;
  }
  return r;
}

inline double ipow(double base, unsigned n) {
  double r = 1.0;
  while (n) {
    if (n & 1u) r *= base;
    n >>= 1u;
    if (n) base *= base;
  }
  return r;
}

inline double value_of(double x) { return x; }
template <std::size_t K>
double value_of(const Taylor<K>& x) { return x.value(); }

// Taylor<K> with coefficients shifted down by one: (f - f(0)) / x.
// Requires f(0) == 0 to be meaningful.
template <std::size_t K>
Taylor<K - 1> shift_down(const Taylor<K>& a) {
  Taylor<K - 1> r;
  for (std::size_t k = 0; k + 1 <= K; ++k) r.coeff(k) = a.coeff(k + 1);
  return r;
}

// Evaluates the polynomial sum_k t[k] * dx^k, where dx is the displacement
// from t's expansion point expressed as a series in another variable.
template <std::size_t K, std::size_t M>
Taylor<M> compose(const Taylor<K>& t, const Taylor<M>& dx) {
  Taylor<M> r(t.coeff(K));
  for (std::size_t k = K; k-- > 0;) {
    r *= dx;
    r += t.coeff(k);
  }
  return r;
}

}  // namespace relayq
