#pragma once

// Truncated bivariate Taylor arithmetic.
//
// A Jet2 of order n stores the Taylor coefficients c(i,j), i+j <= n, of a
// scalar function of (x,y) about a base point:
//
//   u(x0+dx, y0+dy) = sum c(i,j) dx^i dy^j + O(|d|^(n+1)),
//   c(i,j) = d^i_x d^j_y u / (i! j!).
//
// Arithmetic never raises the order; binary operations truncate to the
// smaller operand order.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <type_traits>
#include <vector>

#include "minsurf/errors.hpp"

namespace minsurf {

inline constexpr int kDefaultJetOrder = 8;

namespace detail {

template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};

inline double factorial(int n) {
  double r = 1.0;
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace detail

template <class T>
class Jet2 {
 public:
  using value_type = T;

  Jet2() : Jet2(0) {}

  explicit Jet2(int order, T constant = T{}) : order_(order), c_(size_for(order), T{}) {
    if (order < 0) throw OrderExceeded("jet order must be non-negative");
    c_[0] = constant;
  }

  static Jet2 constant(int order, T value) { return Jet2(order, value); }

  /// The coordinate function x about base value x0.
  static Jet2 variable_x(int order, T x0) {
    Jet2 r(order, x0);
    if (order >= 1) r.coeff(1, 0) = T{1};
    return r;
  }

  /// The coordinate function y about base value y0.
  static Jet2 variable_y(int order, T y0) {
    Jet2 r(order, y0);
    if (order >= 1) r.coeff(0, 1) = T{1};
    return r;
  }

  int order() const noexcept { return order_; }
  const T& value() const noexcept { return c_[0]; }

  const T& coeff(int i, int j) const { return c_[checked_index(i, j)]; }
  T& coeff(int i, int j) { return c_[checked_index(i, j)]; }

  /// Mixed partial d^i_x d^j_y at the base point.
  T partial(int i, int j) const {
    if (i < 0 || j < 0 || i + j > order_) {
      throw OrderExceeded("partial (" + std::to_string(i) + "," + std::to_string(j) +
                          ") exceeds jet order " + std::to_string(order_));
    }
    return coeff(i, j) * T(detail::factorial(i) * detail::factorial(j));
  }

  /// Drops all terms of total degree above `order`.
  Jet2 truncated(int order) const {
    if (order > order_) throw OrderExceeded("cannot extend a jet by truncation");
    Jet2 r(order);
    std::copy_n(c_.begin(), size_for(order), r.c_.begin());
    return r;
  }

  Jet2& operator+=(const Jet2& b) { return *this = *this + b; }
  Jet2& operator-=(const Jet2& b) { return *this = *this - b; }
  Jet2& operator*=(const Jet2& b) { return *this = *this * b; }
  Jet2& operator*=(const T& s) {
    for (auto& v : c_) v *= s;
    return *this;
  }

  friend Jet2 operator+(const Jet2& a, const Jet2& b) {
    Jet2 r(std::min(a.order_, b.order_));
    for (std::size_t k = 0; k < r.c_.size(); ++k) r.c_[k] = a.c_[k] + b.c_[k];
    return r;
  }
  friend Jet2 operator-(const Jet2& a, const Jet2& b) {
    Jet2 r(std::min(a.order_, b.order_));
    for (std::size_t k = 0; k < r.c_.size(); ++k) r.c_[k] = a.c_[k] - b.c_[k];
    return r;
  }
  friend Jet2 operator-(const Jet2& a) {
    Jet2 r = a;
    for (auto& v : r.c_) v = -v;
    return r;
  }

  // Truncated Cauchy product.
  friend Jet2 operator*(const Jet2& a, const Jet2& b) {
    const int n = std::min(a.order_, b.order_);
    Jet2 r(n);
    for (int d1 = 0; d1 <= n; ++d1) {
      for (int j1 = 0; j1 <= d1; ++j1) {
        const T av = a.c_[index(d1 - j1, j1)];
        if (av == T{}) continue;
        for (int d2 = 0; d2 + d1 <= n; ++d2) {
          const std::size_t base = index(d1 + d2 - j1, j1);
          for (int j2 = 0; j2 <= d2; ++j2) {
            r.c_[base + j2] += av * b.c_[index(d2 - j2, j2)];
          }
        }
      }
    }
    return r;
  }

  friend Jet2 operator+(const Jet2& a, const T& s) {
    Jet2 r = a;
    r.c_[0] += s;
    return r;
  }
  friend Jet2 operator+(const T& s, const Jet2& a) { return a + s; }
  friend Jet2 operator-(const Jet2& a, const T& s) { return a + (-s); }
  friend Jet2 operator-(const T& s, const Jet2& a) { return (-a) + s; }
  friend Jet2 operator*(const Jet2& a, const T& s) {
    Jet2 r = a;
    r *= s;
    return r;
  }
  friend Jet2 operator*(const T& s, const Jet2& a) { return a * s; }
  friend Jet2 operator/(const Jet2& a, const T& s) { return a * (T{1} / s); }
  friend Jet2 operator/(const Jet2& a, const Jet2& b) { return a * reciprocal(b); }
  friend Jet2 operator/(const T& s, const Jet2& b) { return reciprocal(b) * s; }

  /// Evaluates sum g_k (a - a0)^k for univariate Taylor coefficients g.
  friend Jet2 compose_series(const Jet2& a, const std::vector<T>& g) {
    Jet2 u = a;
    u.c_[0] = T{};
    Jet2 r(a.order_, g.empty() ? T{} : g.back());
    for (int k = static_cast<int>(g.size()) - 2; k >= 0; --k) {
      r = r * u;
      r.c_[0] += g[static_cast<std::size_t>(k)];
    }
    return r;
  }

  static std::size_t size_for(int order) {
    return static_cast<std::size_t>(order + 1) * static_cast<std::size_t>(order + 2) / 2;
  }

 private:
  static std::size_t index(int i, int j) {
    const int d = i + j;
    return static_cast<std::size_t>(d) * static_cast<std::size_t>(d + 1) / 2 + static_cast<std::size_t>(j);
  }
  std::size_t checked_index(int i, int j) const {
    if (i < 0 || j < 0 || i + j > order_) {
      throw OrderExceeded("coefficient (" + std::to_string(i) + "," + std::to_string(j) +
                          ") outside jet of order " + std::to_string(order_));
    }
    return index(i, j);
  }

  int order_;
  std::vector<T> c_;
};

// ---------------------------------------------------------------------------
// Analytic functions. Each builds the univariate Taylor series of the
// function at the constant term and composes it with the jet.

template <class T>
Jet2<T> exp(const Jet2<T>& a) {
  using std::exp;
  const int n = a.order();
  std::vector<T> g(static_cast<std::size_t>(n) + 1);
  const T e = exp(a.value());
  for (int k = 0; k <= n; ++k) g[k] = e / T(detail::factorial(k));
  return compose_series(a, g);
}

template <class T>
Jet2<T> sin(const Jet2<T>& a) {
  using std::cos;
  using std::sin;
  const int n = a.order();
  const std::array<T, 4> cyc{sin(a.value()), cos(a.value()), -sin(a.value()), -cos(a.value())};
  std::vector<T> g(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) g[k] = cyc[k % 4] / T(detail::factorial(k));
  return compose_series(a, g);
}

template <class T>
Jet2<T> cos(const Jet2<T>& a) {
  using std::cos;
  using std::sin;
  const int n = a.order();
  const std::array<T, 4> cyc{cos(a.value()), -sin(a.value()), -cos(a.value()), sin(a.value())};
  std::vector<T> g(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) g[k] = cyc[k % 4] / T(detail::factorial(k));
  return compose_series(a, g);
}

namespace detail {

template <class T>
void require_positive(const T& v, const char* fn) {
  if constexpr (is_complex<T>::value) {
    if (v == T{}) throw DomainError(std::string(fn) + ": constant term is zero");
  } else {
    if (!(v > T{0})) throw DomainError(std::string(fn) + ": constant term must be positive");
  }
}

}  // namespace detail

template <class T>
Jet2<T> log(const Jet2<T>& a) {
  using std::log;
  detail::require_positive(a.value(), "log");
  const int n = a.order();
  std::vector<T> g(static_cast<std::size_t>(n) + 1);
  g[0] = log(a.value());
  T inv_pow = T{1};
  for (int k = 1; k <= n; ++k) {
    inv_pow /= a.value();
    g[k] = inv_pow * T((k % 2 == 1 ? 1.0 : -1.0) / k);
  }
  return compose_series(a, g);
}

/// Real power a^p via the binomial series.
template <class T>
Jet2<T> pow(const Jet2<T>& a, double p) {
  using std::pow;
  detail::require_positive(a.value(), "pow");
  const int n = a.order();
  std::vector<T> g(static_cast<std::size_t>(n) + 1);
  T coef = pow(a.value(), T(p));
  for (int k = 0; k <= n; ++k) {
    g[k] = coef;
    coef = coef * T((p - k) / (k + 1)) / a.value();
  }
  return compose_series(a, g);
}

template <class T>
Jet2<T> sqrt(const Jet2<T>& a) {
  detail::require_positive(a.value(), "sqrt");
  return pow(a, 0.5);
}

template <class T>
Jet2<T> reciprocal(const Jet2<T>& a) {
  if (a.value() == T{}) throw DomainError("reciprocal: constant term is zero");
  const int n = a.order();
  std::vector<T> g(static_cast<std::size_t>(n) + 1);
  const T inv = T{1} / a.value();
  T term = inv;
  for (int k = 0; k <= n; ++k) {
    g[k] = term;
    term *= -inv;
  }
  return compose_series(a, g);
}

// ---------------------------------------------------------------------------

/// First partial derivative along x as a jet of one order lower.
template <class T>
Jet2<T> derivative_x(const Jet2<T>& a) {
  if (a.order() < 1) throw OrderExceeded("cannot differentiate an order-0 jet");
  Jet2<T> r(a.order() - 1);
  for (int d = 0; d <= r.order(); ++d)
    for (int j = 0; j <= d; ++j) r.coeff(d - j, j) = a.coeff(d - j + 1, j) * T(d - j + 1);
  return r;
}

template <class T>
Jet2<T> derivative_y(const Jet2<T>& a) {
  if (a.order() < 1) throw OrderExceeded("cannot differentiate an order-0 jet");
  Jet2<T> r(a.order() - 1);
  for (int d = 0; d <= r.order(); ++d)
    for (int j = 0; j <= d; ++j) r.coeff(d - j, j) = a.coeff(d - j, j + 1) * T(j + 1);
  return r;
}

/// Jet of q -> u(p0 + A q) at q = 0, given the jet of u at p0.
/// A is row-major: (dx, dy) = (A00 dq1 + A01 dq2, A10 dq1 + A11 dq2).
template <class T>
Jet2<T> compose_linear(const Jet2<T>& a, const std::array<double, 4>& A) {
  const int n = a.order();
  Jet2<T> lx(n), ly(n);
  if (n >= 1) {
    lx.coeff(1, 0) = T(A[0]);
    lx.coeff(0, 1) = T(A[1]);
    ly.coeff(1, 0) = T(A[2]);
    ly.coeff(0, 1) = T(A[3]);
  }
  std::vector<Jet2<T>> px(static_cast<std::size_t>(n) + 1, Jet2<T>(n, T{1}));
  std::vector<Jet2<T>> py(static_cast<std::size_t>(n) + 1, Jet2<T>(n, T{1}));
  for (int k = 1; k <= n; ++k) {
    px[k] = px[k - 1] * lx;
    py[k] = py[k - 1] * ly;
  }
  Jet2<T> r(n);
  for (int d = 0; d <= n; ++d)
    for (int j = 0; j <= d; ++j) {
      const T c = a.coeff(d - j, j);
      if (c != T{}) r += px[d - j] * py[j] * c;
    }
  return r;
}

// ---------------------------------------------------------------------------

/// Jets of every ambient coordinate of a map into R^{n+1}, sharing one base
/// point and one order.
class JetVec {
 public:
  JetVec() = default;
  JetVec(double x, double y, std::vector<Jet2<double>> components)
      : x_(x), y_(y), components_(std::move(components)) {
    if (!components_.empty()) {
      order_ = components_.front().order();
      for (auto& c : components_) order_ = std::min(order_, c.order());
      for (auto& c : components_)
        if (c.order() != order_) c = c.truncated(order_);
    }
  }

  int order() const noexcept { return order_; }
  std::size_t ambient_dim() const noexcept { return components_.size(); }
  double x() const noexcept { return x_; }
  double y() const noexcept { return y_; }
  const std::vector<Jet2<double>>& components() const noexcept { return components_; }
  const Jet2<double>& operator[](std::size_t k) const { return components_[k]; }

  /// Partial d^i_x d^j_y of every component.
  std::vector<double> partial(int i, int j) const {
    std::vector<double> r(components_.size());
    for (std::size_t k = 0; k < r.size(); ++k) r[k] = components_[k].partial(i, j);
    return r;
  }

 private:
  double x_ = 0.0;
  double y_ = 0.0;
  int order_ = 0;
  std::vector<Jet2<double>> components_;
};

}  // namespace minsurf
