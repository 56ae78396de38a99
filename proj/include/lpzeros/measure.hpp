#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <string_view>
#include <vector>

#include "lpzeros/errors.hpp"
#include "lpzeros/quadrature.hpp"

namespace lpzeros {

enum class WeightKind { Constant, Exponential, JacobiVaryAlpha, JacobiVaryBeta };

/// Parametric weight omega(x, t) with its analytic t-derivative.
///   Constant         1
///   Exponential      exp(t x)
///   JacobiVaryAlpha  (1 - x)^t (1 + x)^exponent
///   JacobiVaryBeta   (1 - x)^exponent (1 + x)^t
template <typename Scalar>
struct WeightFamily {
  WeightKind kind = WeightKind::Constant;
  Scalar exponent = 0;

  static WeightFamily constant() { return {WeightKind::Constant, 0}; }
  static WeightFamily exponential() { return {WeightKind::Exponential, 0}; }
  static WeightFamily jacobi_vary_alpha(Scalar beta) { return {WeightKind::JacobiVaryAlpha, beta}; }
  static WeightFamily jacobi_vary_beta(Scalar alpha) { return {WeightKind::JacobiVaryBeta, alpha}; }
};

enum class ScalarKind { Constant, Affine, Exponential };

/// A C^1 scalar function of t: constant, intercept + slope t, or scale exp(rate t).
template <typename Scalar>
struct ScalarFamily {
  ScalarKind kind = ScalarKind::Constant;
  Scalar a = 0;
  Scalar b = 0;

  static ScalarFamily constant(Scalar value) { return {ScalarKind::Constant, value, 0}; }
  static ScalarFamily affine(Scalar intercept, Scalar slope) { return {ScalarKind::Affine, intercept, slope}; }
  static ScalarFamily exponential(Scalar scale, Scalar rate) { return {ScalarKind::Exponential, scale, rate}; }

  Scalar value(Scalar t) const {
    using std::exp;
    switch (kind) {
      case ScalarKind::Constant: return a;
      case ScalarKind::Affine: return a + b * t;
      case ScalarKind::Exponential: return a * exp(b * t);
    }
    return a;
  }

  Scalar derivative(Scalar t) const {
    using std::exp;
    switch (kind) {
      case ScalarKind::Constant: return 0;
      case ScalarKind::Affine: return b;
      case ScalarKind::Exponential: return a * b * exp(b * t);
    }
    return 0;
  }

  bool is_constant() const {
    return kind == ScalarKind::Constant || b == Scalar(0);
  }
};

/// Inserted mass point j(t) delta_{y(t)}.
template <typename Scalar>
struct MassPoint {
  ScalarFamily<Scalar> size;
  ScalarFamily<Scalar> location;
};

template <typename Scalar>
struct WeightValue {
  Scalar omega;
  Scalar domega_dt;
};

template <typename Scalar>
struct MassValue {
  Scalar j;
  Scalar j_prime;
  Scalar y;
  Scalar y_prime;
};

enum class Monotonicity { Increasing, Decreasing, Constant, NonMonotone };

inline std::string_view to_string(Monotonicity m) {
  switch (m) {
    case Monotonicity::Increasing: return "increasing";
    case Monotonicity::Decreasing: return "decreasing";
    case Monotonicity::Constant: return "constant";
    case Monotonicity::NonMonotone: return "nonmonotone";
  }
  return "nonmonotone";
}

/// d mu(x, t) = omega(x, t) d nu(x) + j(t) delta_{y(t)} for t in the open
/// interval U.
template <typename Scalar>
class ParametricMeasure {
 public:
  ParametricMeasure(BaseMeasure<Scalar> base, WeightFamily<Scalar> weight,
                    std::optional<MassPoint<Scalar>> mass, Interval<Scalar> t_domain)
      : base_(std::move(base)), weight_(weight), mass_(std::move(mass)), t_domain_(t_domain) {
    if (!(t_domain_.lo < t_domain_.hi))
      throw ConfigError("t_domain: requires lo < hi");
    validate_weight();
  }

  const BaseMeasure<Scalar>& base() const { return base_; }
  const WeightFamily<Scalar>& weight() const { return weight_; }
  const std::optional<MassPoint<Scalar>>& mass() const { return mass_; }
  const Interval<Scalar>& t_domain() const { return t_domain_; }
  bool has_mass() const { return mass_.has_value(); }

  void check_t(Scalar t) const {
    if (!t_domain_.contains_open(t)) {
      std::ostringstream msg;
      msg << "parameter t = " << t << " outside the open interval (" << t_domain_.lo << ", "
          << t_domain_.hi << ")";
      throw DomainError(msg.str());
    }
  }

  ParametricMeasure with_base(BaseMeasure<Scalar> base) const {
    return ParametricMeasure(std::move(base), weight_, mass_, t_domain_);
  }

 private:
  void validate_weight() const {
    if (weight_.kind != WeightKind::JacobiVaryAlpha && weight_.kind != WeightKind::JacobiVaryBeta)
      return;
    const auto hull = base_.hull();
    if (hull.lo < -1 || hull.hi > 1)
      throw ConfigError("weight: Jacobi families require the support inside [-1, 1]");
    if (!(weight_.exponent > -1))
      throw ConfigError("weight: Jacobi fixed exponent must be > -1");
    if (t_domain_.lo < -1)
      throw ConfigError("weight: Jacobi families require t_domain inside (-1, inf)");
    // (1 - x) carries the varying exponent for VaryAlpha, (1 + x) for VaryBeta
    const bool vary_alpha = weight_.kind == WeightKind::JacobiVaryAlpha;
    const bool touches_varying = vary_alpha ? hull.hi == 1 : hull.lo == -1;
    const bool touches_fixed = vary_alpha ? hull.lo == -1 : hull.hi == 1;
    if (touches_varying && t_domain_.lo < 0)
      throw ConfigError("weight: varying Jacobi exponent can be negative where the factor vanishes on the support");
    if (touches_fixed && weight_.exponent < 0)
      throw ConfigError("weight: fixed Jacobi exponent is negative where the factor vanishes on the support");
  }

  BaseMeasure<Scalar> base_;
  WeightFamily<Scalar> weight_;
  std::optional<MassPoint<Scalar>> mass_;
  Interval<Scalar> t_domain_;
};

namespace detail {

template <typename Scalar>
WeightValue<Scalar> weight_value(const WeightFamily<Scalar>& w, Scalar x, Scalar t) {
  using std::exp;
  using std::log;
  using std::pow;
  switch (w.kind) {
    case WeightKind::Constant: return {1, 0};
    case WeightKind::Exponential: {
      const Scalar e = exp(t * x);
      return {e, x * e};
    }
    case WeightKind::JacobiVaryAlpha: {
      const Scalar om = pow(1 - x, t) * pow(1 + x, w.exponent);
      return {om, om == Scalar(0) ? Scalar(0) : log(1 - x) * om};
    }
    case WeightKind::JacobiVaryBeta: {
      const Scalar om = pow(1 - x, w.exponent) * pow(1 + x, t);
      return {om, om == Scalar(0) ? Scalar(0) : log(1 + x) * om};
    }
  }
  return {1, 0};
}

template <typename Scalar>
Scalar log_weight_derivative(const WeightFamily<Scalar>& w, Scalar x) {
  using std::log;
  switch (w.kind) {
    case WeightKind::Constant: return 0;
    case WeightKind::Exponential: return x;
    case WeightKind::JacobiVaryAlpha: return log(1 - x);
    case WeightKind::JacobiVaryBeta: return log(1 + x);
  }
  return 0;
}

}  // namespace detail

template <typename Scalar>
WeightValue<Scalar> weight_at(const ParametricMeasure<Scalar>& m, Scalar x, Scalar t) {
  m.check_t(t);
  return detail::weight_value(m.weight(), x, t);
}

/// (1 / omega) d omega / dt at (x, t), in closed form.
template <typename Scalar>
Scalar log_weight_t_derivative(const ParametricMeasure<Scalar>& m, Scalar x, Scalar t) {
  m.check_t(t);
  return detail::log_weight_derivative(m.weight(), x);
}

/// Monotonicity of a sampled sequence; exact ties count as flat segments.
template <typename Scalar>
Monotonicity classify_samples(std::span<const Scalar> values) {
  bool up = false, down = false;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[i - 1]) up = true;
    if (values[i] < values[i - 1]) down = true;
  }
  if (up && down) return Monotonicity::NonMonotone;
  if (up) return Monotonicity::Increasing;
  if (down) return Monotonicity::Decreasing;
  return Monotonicity::Constant;
}

/// Samples (1 / omega) d omega / dt on a uniform grid of the support hull.
template <typename Scalar>
Monotonicity classify_eq2_sampled(const ParametricMeasure<Scalar>& m, Scalar t, int grid_size) {
  using std::isfinite;
  if (grid_size < 3) throw ConfigError("classify_eq2: grid_size must be >= 3");
  m.check_t(t);
  const auto hull = m.base().hull();
  std::vector<Scalar> values;
  values.reserve(grid_size);
  for (int i = 0; i < grid_size; ++i) {
    const Scalar x = hull.lo + hull.width() * Scalar(i) / Scalar(grid_size - 1);
    const Scalar v = detail::log_weight_derivative(m.weight(), x);
    if (isfinite(v)) values.push_back(v);
  }
  return classify_samples<Scalar>(values);
}

/// Monotonicity in x of (1 / omega) d omega / dt over the support. Built-in
/// families resolve analytically.
template <typename Scalar>
Monotonicity classify_eq2(const ParametricMeasure<Scalar>& m, Scalar t, int grid_size = 257) {
  if (grid_size < 3) throw ConfigError("classify_eq2: grid_size must be >= 3");
  m.check_t(t);
  switch (m.weight().kind) {
    case WeightKind::Constant: return Monotonicity::Constant;
    case WeightKind::Exponential: return Monotonicity::Increasing;
    case WeightKind::JacobiVaryAlpha: return Monotonicity::Decreasing;
    case WeightKind::JacobiVaryBeta: return Monotonicity::Increasing;
  }
  return classify_eq2_sampled(m, t, grid_size);
}

template <typename Scalar>
std::optional<MassValue<Scalar>> mass_at(const ParametricMeasure<Scalar>& m, Scalar t) {
  m.check_t(t);
  if (!m.mass()) return std::nullopt;
  const auto& mp = *m.mass();
  MassValue<Scalar> v{mp.size.value(t), mp.size.derivative(t), mp.location.value(t),
                      mp.location.derivative(t)};
  if (!(v.j > 0)) {
    std::ostringstream msg;
    msg << "mass size j(t) = " << v.j << " must be positive at t = " << t;
    throw InvariantError(msg.str());
  }
  return v;
}

/// Convex hull of supp mu(., t), including the mass location.
template <typename Scalar>
Interval<Scalar> support_hull(const ParametricMeasure<Scalar>& m, Scalar t) {
  using std::max;
  using std::min;
  auto hull = m.base().hull();
  if (const auto mv = mass_at(m, t)) {
    hull.lo = min(hull.lo, mv->y);
    hull.hi = max(hull.hi, mv->y);
  }
  return hull;
}

/// Distinct support points of mu(., t) (saturating for continuous bases).
template <typename Scalar>
std::size_t support_points(const ParametricMeasure<Scalar>& m, Scalar t) {
  const std::size_t base = m.base().support_points();
  const auto mv = mass_at(m, t);
  if (!mv || !m.base().is_discrete()) return base;
  for (const auto& atom : std::get<DiscreteBase<Scalar>>(m.base().kind()).atoms)
    if (atom.location == mv->y) return base;
  return base + 1;
}

/// Rule for mu(., t): nodes of the base rule with weights scaled by omega,
/// followed by the mass atom when present. All weights positive.
template <typename Scalar>
QuadratureRule<Scalar> discretize(const ParametricMeasure<Scalar>& m, Scalar t,
                                  std::span<const Scalar> breakpoints = {}) {
  const auto mv = mass_at(m, t);
  auto base = build_rule(m.base(), breakpoints);
  const Eigen::Index n = base.size();
  QuadratureRule<Scalar> rule{Vector<Scalar>(n + (mv ? 1 : 0)), Vector<Scalar>(n + (mv ? 1 : 0))};
  for (Eigen::Index i = 0; i < n; ++i) {
    rule.nodes(i) = base.nodes(i);
    rule.weights(i) = base.weights(i) * detail::weight_value(m.weight(), base.nodes(i), t).omega;
  }
  if (mv) {
    rule.nodes(n) = mv->y;
    rule.weights(n) = mv->j;
  }
  return rule;
}

/// Rule for the signed measure d omega/dt (x, t) d nu(x). The mass part is
/// excluded; its t-dependence enters through j', y' separately.
template <typename Scalar>
QuadratureRule<Scalar> discretize_weight_derivative(const ParametricMeasure<Scalar>& m, Scalar t,
                                                    std::span<const Scalar> breakpoints = {}) {
  m.check_t(t);
  auto rule = build_rule(m.base(), breakpoints);
  for (Eigen::Index i = 0; i < rule.size(); ++i)
    rule.weights(i) *= detail::weight_value(m.weight(), rule.nodes(i), t).domega_dt;
  return rule;
}

/// int f(x) omega(x, t) d nu(x) + j(t) f(y(t)).
template <typename Scalar, typename F>
Scalar integrate_mu(const ParametricMeasure<Scalar>& m, Scalar t, F&& f,
                    std::span<const Scalar> breakpoints = {}) {
  return integrate(discretize(m, t, breakpoints), std::forward<F>(f));
}

}  // namespace lpzeros
