#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <sstream>
#include <vector>

#include "lpzeros/errors.hpp"
#include "lpzeros/quadrature.hpp"

namespace lpzeros {

/// x^degree + low(degree-1) x^(degree-1) + ... + low(0). The leading
/// coefficient is implicit and always exactly one.
template <typename Scalar>
class MonicPolynomial {
 public:
  explicit MonicPolynomial(Vector<Scalar> low_coeffs) : low_(std::move(low_coeffs)) {
    if (low_.size() < 1) throw ConfigError("monic polynomial: degree must be >= 1");
  }

  /// x^degree.
  static MonicPolynomial power(int degree) { return MonicPolynomial(Vector<Scalar>::Zero(degree)); }

  /// prod_j (x - zeros[j]).
  static MonicPolynomial from_zeros(std::span<const Scalar> zeros) {
    Vector<Scalar> c = Vector<Scalar>::Zero(static_cast<Eigen::Index>(zeros.size()) + 1);
    c(0) = 1;
    Eigen::Index deg = 0;
    for (Scalar z : zeros) {
      // multiply by (x - z), coefficients stored low to high with c(deg) leading
      for (Eigen::Index i = deg + 1; i > 0; --i) c(i) = c(i - 1) - z * c(i);
      c(0) = -z * c(0);
      ++deg;
    }
    return MonicPolynomial(c.head(deg));
  }

  int degree() const { return static_cast<int>(low_.size()); }
  const Vector<Scalar>& low_coeffs() const { return low_; }

  /// Coefficient of x^i for 0 <= i <= degree.
  Scalar coeff(int i) const { return i == degree() ? Scalar(1) : low_(i); }

  Scalar operator()(Scalar x) const { return eval(*this, x); }

 private:
  Vector<Scalar> low_;
};

template <typename Scalar>
Scalar eval(const MonicPolynomial<Scalar>& P, Scalar x) {
  const auto& c = P.low_coeffs();
  Scalar v = 1;
  for (Eigen::Index i = c.size() - 1; i >= 0; --i) v = v * x + c(i);
  return v;
}

/// Compensated Horner: error-free transformations carry the rounding error of
/// each step, giving roughly twice the working precision.
template <typename Scalar>
Scalar eval_compensated(const MonicPolynomial<Scalar>& P, Scalar x) {
  using std::fma;
  const auto& c = P.low_coeffs();
  Scalar v = 1, err = 0;
  for (Eigen::Index i = c.size() - 1; i >= 0; --i) {
    const Scalar prod = v * x;
    const Scalar prod_err = fma(v, x, -prod);
    const Scalar sum = prod + c(i);
    const Scalar z = sum - prod;
    const Scalar sum_err = (prod - (sum - z)) + (c(i) - z);
    err = err * x + (prod_err + sum_err);
    v = sum;
  }
  return v + err;
}

template <typename Scalar>
struct ValueAndSlope {
  Scalar value;
  Scalar slope;
};

template <typename Scalar>
ValueAndSlope<Scalar> eval_with_derivative(const MonicPolynomial<Scalar>& P, Scalar x) {
  const auto& c = P.low_coeffs();
  Scalar v = 1, d = 0;
  for (Eigen::Index i = c.size() - 1; i >= 0; --i) {
    d = d * x + v;
    v = v * x + c(i);
  }
  return {v, d};
}

/// Synthetic division: P(x) = (x - x0) q(x) + P(x0). Requires degree >= 2;
/// quotient_coeffs also covers the constant quotient of a linear P.
template <typename Scalar>
MonicPolynomial<Scalar> deflated_quotient(const MonicPolynomial<Scalar>& P, Scalar x0) {
  const int d = P.degree();
  if (d < 2) throw ConfigError("deflated_quotient: quotient of a degree-1 polynomial is constant");
  Vector<Scalar> q(d - 1);
  Scalar carry = 1;  // leading coefficient of q
  for (int i = d - 1; i >= 1; --i) {
    carry = P.coeff(i) + x0 * carry;
    q(i - 1) = carry;
  }
  return MonicPolynomial<Scalar>(std::move(q));
}

/// Coefficients (low to high, leading one included) of the synthetic-division
/// quotient. Valid for every degree, including the constant quotient.
template <typename Scalar>
Vector<Scalar> quotient_coeffs(const MonicPolynomial<Scalar>& P, Scalar x0) {
  const int d = P.degree();
  Vector<Scalar> q(d);
  q(d - 1) = 1;
  for (int i = d - 1; i >= 1; --i) q(i - 1) = P.coeff(i) + x0 * q(i);
  return q;
}

/// Horner on a full coefficient vector (low to high).
template <typename Scalar>
Scalar horner(const Vector<Scalar>& c, Scalar x) {
  Scalar v = 0;
  for (Eigen::Index i = c.size() - 1; i >= 0; --i) v = v * x + c(i);
  return v;
}

template <typename Scalar>
struct ZeroSet {
  std::vector<Scalar> zeros;
  Interval<Scalar> hull;
  Scalar min_gap = std::numeric_limits<Scalar>::infinity();

  std::size_t size() const { return zeros.size(); }
  Scalar operator[](std::size_t k) const { return zeros[k]; }
};

struct RootOptions {
  double simplicity_tol = 1e-8;  // relative to hull width
  double hull_tol = 1e-9;        // relative to hull width
};

namespace detail {

template <typename Scalar>
Scalar polish_bracketed(const MonicPolynomial<Scalar>& P, Scalar lo, Scalar hi, Scalar flo) {
  using std::abs;
  // bisection to (near) machine resolution, then guarded Newton
  for (int i = 0; i < 200; ++i) {
    const Scalar mid = lo + (hi - lo) / 2;
    if (!(mid > lo && mid < hi)) break;
    const Scalar fm = eval(P, mid);
    if (fm == Scalar(0)) return mid;
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  Scalar x = lo + (hi - lo) / 2;
  for (int i = 0; i < 3; ++i) {
    const auto vs = eval_with_derivative(P, x);
    if (vs.value == Scalar(0) || vs.slope == Scalar(0)) break;
    const Scalar next = x - vs.value / vs.slope;
    if (!(abs(next - x) <= (hi - lo) * 4)) break;
    if (abs(eval(P, next)) >= abs(vs.value)) break;
    x = next;
  }
  return x;
}

}  // namespace detail

/// Real zeros found by sign changes on a uniform grid of `search`, without
/// any validation. Used for quadrature breakpoints on non-optimal iterates.
template <typename Scalar>
std::vector<Scalar> bracket_real_zeros(const MonicPolynomial<Scalar>& P, Interval<Scalar> search,
                                       int grid_points) {
  std::vector<Scalar> out;
  Scalar xprev = search.lo, fprev = eval(P, xprev);
  if (fprev == Scalar(0)) out.push_back(xprev);
  for (int i = 1; i < grid_points; ++i) {
    const Scalar x = i == grid_points - 1
                         ? search.hi
                         : search.lo + search.width() * Scalar(i) / Scalar(grid_points - 1);
    const Scalar f = eval(P, x);
    if (f == Scalar(0)) {
      out.push_back(x);
    } else if (fprev != Scalar(0) && (f < 0) != (fprev < 0)) {
      out.push_back(detail::polish_bracketed(P, xprev, x, fprev));
    }
    xprev = x;
    fprev = f;
  }
  return out;
}

/// All zeros of P, which must be real, simple and inside `hull`.
template <typename Scalar>
ZeroSet<Scalar> find_real_zeros(const MonicPolynomial<Scalar>& P, Interval<Scalar> hull,
                                const RootOptions& opts = {}) {
  using std::abs;
  const int degree = P.degree();
  const Scalar width = hull.width() > 0 ? hull.width() : Scalar(1);
  const Interval<Scalar> search{hull.lo - width / 100, hull.hi + width / 100};

  std::vector<Scalar> zeros;
  int grid = 64 * degree;
  for (int attempt = 0; attempt <= 3; ++attempt, grid *= 2) {
    zeros = bracket_real_zeros(P, search, grid + 1);
    if (static_cast<int>(zeros.size()) >= degree) break;
  }
  if (static_cast<int>(zeros.size()) < degree) {
    std::ostringstream msg;
    msg << "zeros not all real: found " << zeros.size() << " of " << degree;
    throw StructuralError(msg.str());
  }

  ZeroSet<Scalar> out{std::move(zeros), hull, std::numeric_limits<Scalar>::infinity()};
  for (std::size_t k = 1; k < out.zeros.size(); ++k)
    out.min_gap = std::min(out.min_gap, out.zeros[k] - out.zeros[k - 1]);
  if (!(out.min_gap > Scalar(opts.simplicity_tol) * width)) {
    std::ostringstream msg;
    msg << "zeros not simple: minimum gap " << out.min_gap;
    throw StructuralError(msg.str());
  }
  const Scalar slack = Scalar(opts.hull_tol) * width;
  for (Scalar z : out.zeros) {
    if (!hull.contains(z, slack)) {
      std::ostringstream msg;
      msg << "Fejer violation: zero " << z << " outside [" << hull.lo << ", " << hull.hi << "]";
      throw StructuralError(msg.str());
    }
  }
  return out;
}

}  // namespace lpzeros
