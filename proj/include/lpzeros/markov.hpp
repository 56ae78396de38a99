#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "lpzeros/best_approx.hpp"
#include "lpzeros/errors.hpp"
#include "lpzeros/measure.hpp"
#include "lpzeros/polynomial.hpp"

// Zero sensitivity of the minimal-norm polynomial. With zeros x_0..x_n held
// as independent variables, the map
//
//   f_k(x, t) = int |P(s)|^p / (s - x_k) d mu(s, t),   P = prod_j (s - x_j)
//
// vanishes at the optimum for every k, its Jacobian in x is diagonal there,
// and dx_k/dt = -(df_k/dt) / (df_k/dx_k). Every integrand with an apparent
// pole at x_k is evaluated through the quotient q_k = P / (s - x_k):
//
//   |P|^p / (s - x_k)    = q_k |P|^(p-1) sgn P
//   |P|^p / (s - x_k)^2  = |q_k|^p |s - x_k|^(p-2)

namespace lpzeros {

enum class Direction { Increasing, Decreasing, Inconclusive };

inline std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::Increasing: return "increasing";
    case Direction::Decreasing: return "decreasing";
    case Direction::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

template <typename Scalar>
struct MarkovEntry {
  Scalar x;
  Scalar d;
  Scalar R;
  Scalar dfk_dxk;
  Scalar dfk_dt;
  Scalar dxk_dt;
  std::optional<Scalar> cond_eq;
  bool theorem_applies;
  Direction predicted;
};

template <typename Scalar>
struct MarkovReport {
  std::vector<MarkovEntry<Scalar>> entries;
  Monotonicity eq2_verdict;
  std::vector<std::string> warnings;
};

namespace detail {

template <typename Scalar>
void check_index(std::span<const Scalar> zeros, std::size_t k) {
  if (k >= zeros.size()) throw ConfigError("zero index out of range");
}

/// prod over i not in {skip_a, skip_b} of (x - zeros[i]).
template <typename Scalar>
Scalar partial_product(std::span<const Scalar> zeros, Scalar x, std::size_t skip_a, std::size_t skip_b) {
  Scalar v = 1;
  for (std::size_t i = 0; i < zeros.size(); ++i)
    if (i != skip_a && i != skip_b) v *= x - zeros[i];
  return v;
}

}  // namespace detail

template <typename Scalar>
Scalar f_k(const ParametricMeasure<Scalar>& m, Scalar t, const MonicPolynomial<Scalar>& P,
           std::span<const Scalar> zeros, std::size_t k, Scalar p) {
  detail::check_index(zeros, k);
  const auto q = quotient_coeffs(P, zeros[k]);
  const auto rule = discretize(m, t, zeros);
  return integrate(rule, [&](Scalar x) {
    return horner(q, x) * detail::signed_pow(eval(P, x), p - 1);
  });
}

/// f_k with P rebuilt from its zeros; lets a single zero move while the
/// others stay fixed.
template <typename Scalar>
Scalar f_k_from_zeros(const ParametricMeasure<Scalar>& m, Scalar t, std::span<const Scalar> zeros,
                      std::size_t k, Scalar p) {
  detail::check_index(zeros, k);
  const auto rule = discretize(m, t, zeros);
  return integrate(rule, [&](Scalar x) {
    const Scalar q = detail::partial_product(zeros, x, k, k);
    return q * detail::signed_pow(q * (x - zeros[k]), p - 1);
  });
}

/// (1 - p) int |q_k|^p |x - x_k|^(p-2) d mu; strictly negative.
template <typename Scalar>
Scalar dfk_dxk(const ParametricMeasure<Scalar>& m, Scalar t, const MonicPolynomial<Scalar>& P,
               std::span<const Scalar> zeros, std::size_t k, Scalar p) {
  detail::check_index(zeros, k);
  const auto q = quotient_coeffs(P, zeros[k]);
  const Scalar xk = zeros[k];
  const auto rule = discretize(m, t, zeros);
  const Scalar value = (1 - p) * integrate(rule, [&](Scalar x) {
    return detail::abs_pow(horner(q, x), p) * detail::abs_pow(x - xk, p - 2);
  });
  if (!(value < 0)) {
    std::ostringstream msg;
    msg << "df_k/dx_k = " << value << " is not negative (k = " << k << ")";
    throw ConsistencyError(msg.str());
  }
  return value;
}

/// Off-diagonal partial -p int q_jk |P|^(p-1) sgn P d mu with
/// q_jk = P / ((x - x_j)(x - x_k)); zero at the optimum since q_jk has degree n - 1.
template <typename Scalar>
Scalar dfk_dxj(const ParametricMeasure<Scalar>& m, Scalar t, const MonicPolynomial<Scalar>& P,
               std::span<const Scalar> zeros, std::size_t k, std::size_t j, Scalar p) {
  detail::check_index(zeros, k);
  detail::check_index(zeros, j);
  if (j == k) return dfk_dxk(m, t, P, zeros, k, p);
  const auto rule = discretize(m, t, zeros);
  return -p * integrate(rule, [&](Scalar x) {
    return detail::partial_product(zeros, x, j, k) * detail::signed_pow(eval(P, x), p - 1);
  });
}

/// Sum over j with y != x_j (bitwise) of (p - delta_jk) / (y - x_j).
template <typename Scalar>
Scalar rational_R(std::span<const Scalar> zeros, Scalar y, std::size_t k, Scalar p) {
  Scalar sum = 0;
  for (std::size_t j = 0; j < zeros.size(); ++j) {
    if (y == zeros[j]) continue;
    sum += (p - (j == k ? Scalar(1) : Scalar(0))) / (y - zeros[j]);
  }
  return sum;
}

/// y - x_k, or 1 when they coincide.
template <typename Scalar>
Scalar d_k(std::span<const Scalar> zeros, Scalar y, std::size_t k) {
  detail::check_index(zeros, k);
  return y == zeros[k] ? Scalar(1) : y - zeros[k];
}

template <typename Scalar>
Scalar dfk_dt(const ParametricMeasure<Scalar>& m, Scalar t, const MonicPolynomial<Scalar>& P,
              std::span<const Scalar> zeros, std::size_t k, Scalar p) {
  detail::check_index(zeros, k);
  const auto q = quotient_coeffs(P, zeros[k]);
  const auto rule = discretize_weight_derivative(m, t, zeros);
  Scalar value = integrate(rule, [&](Scalar x) {
    return horner(q, x) * detail::signed_pow(eval(P, x), p - 1);
  });
  if (const auto mv = mass_at(m, t); mv && mv->y != zeros[k]) {
    const Scalar R = rational_R(zeros, mv->y, k, p);
    // |P(y)|^p / (y - x_k) in quotient form
    const Scalar atom = horner(q, mv->y) * detail::signed_pow(eval(P, mv->y), p - 1);
    value += (mv->j_prime + mv->j * mv->y_prime * R) * atom;
  }
  return value;
}

/// (1 / d_k) (j'/j + y' R - (1/omega) d omega/dt at x_k).
template <typename Scalar>
Scalar condition_eq(const ParametricMeasure<Scalar>& m, Scalar t, std::span<const Scalar> zeros,
                    std::size_t k, Scalar p) {
  const auto mv = mass_at(m, t);
  if (!mv) throw InapplicableError("condition (eq) needs a mass point; none configured");
  const Scalar R = rational_R(zeros, mv->y, k, p);
  const Scalar log_w = log_weight_t_derivative(m, zeros[k], t);
  return (mv->j_prime / mv->j + mv->y_prime * R - log_w) / d_k(zeros, mv->y, k);
}

namespace detail {

inline Direction predict(std::optional<double> cond, Monotonicity eq2) {
  using M = Monotonicity;
  if (eq2 == M::NonMonotone) return Direction::Inconclusive;
  if (!cond) {
    if (eq2 == M::Increasing) return Direction::Increasing;
    if (eq2 == M::Decreasing) return Direction::Decreasing;
    return Direction::Inconclusive;
  }
  const double c = *cond;
  if (c >= 0 && (eq2 == M::Increasing || eq2 == M::Constant) && !(c == 0 && eq2 == M::Constant))
    return Direction::Increasing;
  if (c <= 0 && (eq2 == M::Decreasing || eq2 == M::Constant) && !(c == 0 && eq2 == M::Constant))
    return Direction::Decreasing;
  return Direction::Inconclusive;
}

}  // namespace detail

/// Full sensitivity report at a converged optimum. Refuses a result whose
/// characterization residual does not meet the solver bound.
template <typename Scalar>
MarkovReport<Scalar> zero_derivatives(const ParametricMeasure<Scalar>& m, Scalar t,
                                      const BestApproxResult<Scalar>& result,
                                      const SolverConfig<Scalar>& cfg,
                                      double coincidence_tol = 1e-12) {
  using std::abs;
  const Scalar p = cfg.p;
  const auto& P = result.P;
  const std::span<const Scalar> zs(result.zeros.zeros);

  const auto ev = detail::evaluate(m, t, P, p, false);
  const Scalar residual = ev.signed_moments.cwiseAbs().maxCoeff();
  if (!(residual <= detail::residual_bound(cfg.residual_tol, ev.value, p))) {
    std::ostringstream msg;
    msg << "zero_derivatives: P is not a converged optimum (residual " << residual << ")";
    throw ConvergenceError(msg.str(), result.iterations, static_cast<double>(residual));
  }

  MarkovReport<Scalar> report;
  report.eq2_verdict = classify_eq2(m, t);
  const auto mv = mass_at(m, t);
  const Scalar width = support_hull(m, t).width();

  for (std::size_t k = 0; k < zs.size(); ++k) {
    MarkovEntry<Scalar> e{};
    e.x = zs[k];
    e.dfk_dxk = dfk_dxk(m, t, P, zs, k, p);
    e.dfk_dt = dfk_dt(m, t, P, zs, k, p);
    e.dxk_dt = -e.dfk_dt / e.dfk_dxk;
    if (mv) {
      e.d = d_k(zs, mv->y, k);
      e.R = rational_R(zs, mv->y, k, p);
      e.cond_eq = condition_eq(m, t, zs, k, p);
      if (mv->y != zs[k] && abs(mv->y - zs[k]) < Scalar(coincidence_tol) * width) {
        std::ostringstream msg;
        msg << "mass location y = " << mv->y << " nearly coincides with zero " << k;
        report.warnings.push_back(msg.str());
      }
    } else {
      e.d = 1;
      e.R = 0;
    }
    const bool sign_ok = (e.dxk_dt > 0) == (e.dfk_dt > 0) && (e.dxk_dt < 0) == (e.dfk_dt < 0);
    if (!sign_ok) throw ConsistencyError("sign(dx_k/dt) differs from sign(df_k/dt)");
    e.predicted = detail::predict(e.cond_eq ? std::optional<double>(static_cast<double>(*e.cond_eq))
                                            : std::nullopt,
                                  report.eq2_verdict);
    e.theorem_applies = e.predicted != Direction::Inconclusive;
    report.entries.push_back(e);
  }

  if (mv && m.weight().kind == WeightKind::Constant && mv->y_prime == 0 && mv->j_prime != 0)
    report.warnings.push_back(
        "mass size varies at a fixed location: zeros below y are predicted to increase when "
        "j' > 0 and to decrease when j' < 0");
  return report;
}

}  // namespace lpzeros
