#pragma once

#include <Eigen/Core>
#include <cmath>

namespace gaitforge::math {

// Forward-mode scalar carrying a value and a dense derivative vector.
// An empty derivative vector means "derivative identically zero" so that
// plain constants cost no allocation.
class Dual {
 public:
  double val{0.0};
  Eigen::VectorXd der;

  Dual() = default;
  Dual(double v) : val(v) {}  // NOLINT: implicit by design
  Dual(double v, Eigen::VectorXd d) : val(v), der(std::move(d)) {}

  static Dual seed(double v, int dim, int index) {
    Dual d(v);
    d.der = Eigen::VectorXd::Zero(dim);
    d.der[index] = 1.0;
    return d;
  }

  bool has_der() const { return der.size() > 0; }

  Dual& operator+=(const Dual& o) {
    val += o.val;
    if (o.has_der()) {
      if (has_der()) der += o.der;
      else der = o.der;
    }
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    val -= o.val;
    if (o.has_der()) {
      if (has_der()) der -= o.der;
      else der = -o.der;
    }
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    if (has_der() && o.has_der()) der = o.val * der + val * o.der;
    else if (o.has_der()) der = val * o.der;
    else if (has_der()) der *= o.val;
    val *= o.val;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    const double inv = 1.0 / o.val;
    if (has_der() && o.has_der()) der = inv * der - (val * inv * inv) * o.der;
    else if (o.has_der()) der = -(val * inv * inv) * o.der;
    else if (has_der()) der *= inv;
    val *= inv;
    return *this;
  }

  Dual operator-() const {
    Dual r(-val);
    if (has_der()) r.der = -der;
    return r;
  }
};

inline Dual operator+(Dual a, const Dual& b) { return a += b; }
inline Dual operator-(Dual a, const Dual& b) { return a -= b; }
inline Dual operator*(Dual a, const Dual& b) { return a *= b; }
inline Dual operator/(Dual a, const Dual& b) { return a /= b; }

inline bool operator<(const Dual& a, const Dual& b) { return a.val < b.val; }
inline bool operator>(const Dual& a, const Dual& b) { return a.val > b.val; }
inline bool operator<=(const Dual& a, const Dual& b) { return a.val <= b.val; }
inline bool operator>=(const Dual& a, const Dual& b) { return a.val >= b.val; }
inline bool operator==(const Dual& a, const Dual& b) { return a.val == b.val; }
inline bool operator!=(const Dual& a, const Dual& b) { return a.val != b.val; }

inline Dual sin(const Dual& x) {
  Dual r(std::sin(x.val));
  if (x.has_der()) r.der = std::cos(x.val) * x.der;
  return r;
}
inline Dual cos(const Dual& x) {
  Dual r(std::cos(x.val));
  if (x.has_der()) r.der = -std::sin(x.val) * x.der;
  return r;
}
inline Dual sqrt(const Dual& x) {
  const double s = std::sqrt(x.val);
  Dual r(s);
  if (x.has_der()) r.der = (0.5 / s) * x.der;
  return r;
}
inline Dual exp(const Dual& x) {
  const double e = std::exp(x.val);
  Dual r(e);
  if (x.has_der()) r.der = e * x.der;
  return r;
}
inline Dual abs(const Dual& x) { return x.val < 0.0 ? -x : x; }
inline Dual abs2(const Dual& x) { return x * x; }

inline double value(const Dual& x) { return x.val; }
inline double value(double x) { return x; }

}  // namespace gaitforge::math

namespace Eigen {
template <>
struct NumTraits<gaitforge::math::Dual> : NumTraits<double> {
  using Real = gaitforge::math::Dual;
  using NonInteger = gaitforge::math::Dual;
  using Nested = gaitforge::math::Dual;
  using Literal = double;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 1,
    AddCost = 4,
    MulCost = 8,
  };
};

template <typename BinaryOp>
struct ScalarBinaryOpTraits<gaitforge::math::Dual, double, BinaryOp> {
  using ReturnType = gaitforge::math::Dual;
};
template <typename BinaryOp>
struct ScalarBinaryOpTraits<double, gaitforge::math::Dual, BinaryOp> {
  using ReturnType = gaitforge::math::Dual;
};
}  // namespace Eigen
