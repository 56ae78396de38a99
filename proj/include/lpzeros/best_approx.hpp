#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "lpzeros/errors.hpp"
#include "lpzeros/measure.hpp"
#include "lpzeros/polynomial.hpp"

namespace lpzeros {

template <typename Scalar>
struct SolverConfig {
  int n = 0;  // P has degree n + 1
  Scalar p = 2;
  Scalar residual_tol = Scalar(1e-10);
  int max_newton_iters = 200;
  Scalar continuation_step = 1;
  Scalar levenberg_floor = Scalar(1e-12);
  RootOptions roots;

  void validate() const {
    if (n < 0) throw ConfigError("n must be >= 0");
    if (!(p >= 2)) {
      std::ostringstream msg;
      msg << "p must satisfy p >= 2 (got " << p << ")";
      throw ConfigError(msg.str());
    }
    if (!(residual_tol > 0)) throw ConfigError("residual_tol must be positive");
    if (max_newton_iters < 1) throw ConfigError("max_newton_iters must be >= 1");
    if (!(continuation_step > 0)) throw ConfigError("continuation_step must be positive");
    if (!(levenberg_floor >= 0)) throw ConfigError("levenberg_floor must be >= 0");
  }
};

template <typename Scalar>
struct BestApproxResult {
  MonicPolynomial<Scalar> P;
  ZeroSet<Scalar> zeros;
  Scalar char_residual;
  Scalar norm_p;
  int iterations;
};

/// Objective F(g) = int |x^(n+1) - g|^p d mu as a function of the
/// coefficients of g, with its gradient and Hessian.
template <typename Scalar>
struct ObjectiveDerivatives {
  Scalar value;
  Vector<Scalar> gradient;
  Matrix<Scalar> hessian;
};

namespace detail {

/// |v|^e with the convention |v|^0 = 1, and |v|^e sgn(v) with sgn(0) = 0.
template <typename Scalar>
Scalar abs_pow(Scalar v, Scalar e) {
  using std::abs;
  using std::pow;
  if (e == Scalar(0)) return 1;
  if (e == Scalar(1)) return abs(v);
  if (e == Scalar(2)) return v * v;
  return pow(abs(v), e);
}

template <typename Scalar>
Scalar signed_pow(Scalar v, Scalar e) {
  if (v == Scalar(0)) return 0;
  const Scalar a = abs_pow(v, e);
  return v < 0 ? -a : a;
}

/// Real zeros of an iterate, used to anchor quadrature panels where |P|^p
/// loses smoothness.
template <typename Scalar>
std::vector<Scalar> breakpoints_for(const ParametricMeasure<Scalar>& m, Scalar t,
                                    const MonicPolynomial<Scalar>& P) {
  const auto hull = support_hull(m, t);
  const Scalar pad = hull.width() / 100;
  return bracket_real_zeros(P, Interval<Scalar>{hull.lo - pad, hull.hi + pad},
                            64 * P.degree() + 1);
}

template <typename Scalar>
struct Evaluation {
  Scalar value = 0;
  Vector<Scalar> signed_moments;  // int x^i |P|^(p-1) sgn P, i = 0..n
  Vector<Scalar> abs_moments;     // int |x|^i |P|^(p-1)
  Vector<Scalar> hankel;          // int x^r |P|^(p-2), r = 0..2n
};

template <typename Scalar>
Evaluation<Scalar> evaluate(const ParametricMeasure<Scalar>& m, Scalar t,
                            const MonicPolynomial<Scalar>& P, Scalar p, bool with_hessian) {
  using std::abs;
  using std::isfinite;
  const int n = P.degree() - 1;
  const auto bps = breakpoints_for(m, t, P);
  const auto rule = discretize<Scalar>(m, t, bps);

  Evaluation<Scalar> ev;
  ev.signed_moments = Vector<Scalar>::Zero(n + 1);
  ev.abs_moments = Vector<Scalar>::Zero(n + 1);
  ev.hankel = Vector<Scalar>::Zero(with_hessian ? 2 * n + 1 : 0);
  for (Eigen::Index i = 0; i < rule.size(); ++i) {
    const Scalar x = rule.nodes(i), w = rule.weights(i);
    const Scalar v = eval(P, x);
    const Scalar a1 = abs_pow(v, p - 1);
    const Scalar s = v < 0 ? -a1 : (v > 0 ? a1 : Scalar(0));
    ev.value += w * a1 * abs(v);
    Scalar xi = 1;
    for (int k = 0; k <= n; ++k, xi *= x) {
      ev.signed_moments(k) += w * s * xi;
      ev.abs_moments(k) += w * a1 * abs(xi);
    }
    if (with_hessian) {
      const Scalar h = w * abs_pow(v, p - 2);
      Scalar xr = 1;
      for (int r = 0; r <= 2 * n; ++r, xr *= x) ev.hankel(r) += h * xr;
    }
  }
  if (!isfinite(ev.value) || !ev.signed_moments.allFinite() ||
      (with_hessian && !ev.hankel.allFinite()))
    throw NumericError("objective: non-finite moment", 0.0);
  return ev;
}

template <typename Scalar>
MonicPolynomial<Scalar> from_g(const Vector<Scalar>& g) {
  return MonicPolynomial<Scalar>(-g);
}

/// p = 2: the normal equations M g = b with M_ij = int x^(i+j), b_i = int x^(i+n+1).
template <typename Scalar>
MonicPolynomial<Scalar> moment_solve(const ParametricMeasure<Scalar>& m, Scalar t, int n) {
  const auto rule = discretize<Scalar>(m, t);
  Vector<Scalar> mom = Vector<Scalar>::Zero(2 * n + 2);
  for (Eigen::Index i = 0; i < rule.size(); ++i) {
    Scalar xr = 1;
    for (int r = 0; r <= 2 * n + 1; ++r, xr *= rule.nodes(i)) mom(r) += rule.weights(i) * xr;
  }
  Matrix<Scalar> M(n + 1, n + 1);
  Vector<Scalar> b(n + 1);
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) M(i, j) = mom(i + j);
    b(i) = mom(i + n + 1);
  }
  const Vector<Scalar> g = M.ldlt().solve(b);
  return from_g(g);
}

struct NewtonStats {
  int iterations = 0;
};

template <typename Scalar>
Scalar residual_bound(Scalar tol, Scalar value, Scalar p) {
  using std::max;
  using std::pow;
  const Scalar norm = pow(value, 1 / p);
  return tol * max(Scalar(1), pow(norm, p - 1));
}

/// Damped Newton on F(g) at fixed p. Converged when the characterization
/// residual meets the configured bound and the iteration has settled
/// (small step, tiny relative residual, or a residual stuck at rounding level).
/// A non-strict run returns its last iterate instead of failing; continuation
/// stages only need a starting point for the next p.
template <typename Scalar>
MonicPolynomial<Scalar> newton(const ParametricMeasure<Scalar>& m, Scalar t, Scalar p,
                               const MonicPolynomial<Scalar>& start, const SolverConfig<Scalar>& cfg,
                               NewtonStats& stats, bool strict = true) {
  using std::abs;
  const int dim = start.degree();
  Vector<Scalar> g = -start.low_coeffs();
  Scalar last_step = std::numeric_limits<Scalar>::infinity();
  Scalar last_residual = std::numeric_limits<Scalar>::infinity();
  Scalar gscale = 1 + g.cwiseAbs().maxCoeff();
  Scalar residual = 0;

  for (int iter = 0;; ++iter) {
    const auto P = from_g(g);
    const auto ev = evaluate(m, t, P, p, true);
    residual = ev.signed_moments.cwiseAbs().maxCoeff();
    Scalar rel = 0;
    for (int i = 0; i < dim; ++i)
      if (ev.abs_moments(i) > 0) rel = std::max(rel, abs(ev.signed_moments(i)) / ev.abs_moments(i));
    const bool meets_tol = residual <= residual_bound(cfg.residual_tol, ev.value, p);
    // settled: step at rounding level, or a small step that no longer reduces the residual
    const bool settled = last_step <= Scalar(1e-12) * gscale ||
                         (last_step <= Scalar(1e-7) * gscale && residual >= last_residual);
    if ((meets_tol || !strict) && (settled || rel <= Scalar(1e-14))) return P;
    last_residual = residual;
    if (iter >= cfg.max_newton_iters) {
      if (meets_tol || !strict) return P;
      std::ostringstream msg;
      msg << "Newton did not reach residual_tol at p = " << p << " after " << iter
          << " iterations (residual " << residual << ")";
      throw ConvergenceError(msg.str(), stats.iterations, static_cast<double>(residual));
    }

    const Vector<Scalar> grad = -p * ev.signed_moments;
    Matrix<Scalar> H(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) H(i, j) = p * (p - 1) * ev.hankel(i + j);
    // symmetric diagonal equilibration; the floor then acts on a unit diagonal
    const Vector<Scalar> s = H.diagonal().cwiseSqrt().cwiseInverse();
    Matrix<Scalar> Hs = s.asDiagonal() * H * s.asDiagonal();
    Eigen::LDLT<Matrix<Scalar>> ldlt(Hs);
    if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().minCoeff() >= cfg.levenberg_floor)) {
      Hs.diagonal().array() += cfg.levenberg_floor;
      ldlt.compute(Hs);
    }
    const Vector<Scalar> dir = -s.cwiseProduct(ldlt.solve(s.cwiseProduct(grad)));
    if (!dir.allFinite()) throw ConvergenceError("Newton: singular Hessian", stats.iterations,
                                                 static_cast<double>(residual));

    gscale = 1 + g.cwiseAbs().maxCoeff();
    const Scalar dnorm = dir.cwiseAbs().maxCoeff();
    // Armijo backtracking on the convex objective
    Scalar alpha = 1;
    const Scalar slope = grad.dot(dir);
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls, alpha /= 2) {
      const Scalar trial = evaluate(m, t, from_g<Scalar>(g + alpha * dir), p, false).value;
      if (trial <= ev.value + Scalar(1e-4) * alpha * slope + Scalar(1e-15) * abs(ev.value)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (meets_tol || !strict) return P;
      throw ConvergenceError("Newton: line search stalled", stats.iterations,
                             static_cast<double>(residual));
    }
    const Scalar step = alpha * dnorm;
    g += alpha * dir;
    ++stats.iterations;
    last_step = step;
  }
}

}  // namespace detail

template <typename Scalar>
ObjectiveDerivatives<Scalar> objective_and_derivatives(const ParametricMeasure<Scalar>& m, Scalar t,
                                                       const MonicPolynomial<Scalar>& P, Scalar p) {
  if (!(p >= 2)) throw ConfigError("objective: p must be >= 2");
  const auto ev = detail::evaluate(m, t, P, p, true);
  const int dim = P.degree();
  ObjectiveDerivatives<Scalar> out{ev.value, -p * ev.signed_moments, Matrix<Scalar>(dim, dim)};
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) out.hessian(i, j) = p * (p - 1) * ev.hankel(i + j);
  return out;
}

/// max_i | int x^i |P|^(p-1) sgn(P) d mu(x, t) |, i = 0..deg P - 1.
template <typename Scalar>
Scalar char_residual(const ParametricMeasure<Scalar>& m, Scalar t, const MonicPolynomial<Scalar>& P,
                     Scalar p) {
  return detail::evaluate(m, t, P, p, false).signed_moments.cwiseAbs().maxCoeff();
}

/// The monic polynomial of degree n + 1 with least L^p(mu(., t)) norm.
/// p = 2 comes from the moment system; larger p by continuation in p with
/// damped Newton at each stage. A warm start skips the continuation and is
/// abandoned in favour of it if Newton fails.
template <typename Scalar>
BestApproxResult<Scalar> solve(const ParametricMeasure<Scalar>& m, Scalar t, const SolverConfig<Scalar>& cfg,
                               const std::optional<MonicPolynomial<Scalar>>& warm_start = std::nullopt) {
  using std::min;
  using std::pow;
  cfg.validate();
  m.check_t(t);
  const auto points = support_points(m, t);
  if (points < static_cast<std::size_t>(cfg.n) + 2) {
    std::ostringstream msg;
    msg << "measure has " << points << " support points; n = " << cfg.n << " needs at least "
        << cfg.n + 2;
    throw ConfigError(msg.str());
  }
  if (warm_start && warm_start->degree() != cfg.n + 1)
    throw ConfigError("warm start degree does not match n + 1");

  detail::NewtonStats stats;
  std::optional<MonicPolynomial<Scalar>> P;
  if (warm_start) {
    try {
      P = detail::newton(m, t, cfg.p, *warm_start, cfg, stats);
    } catch (const ConvergenceError&) {
      P.reset();
    }
  }
  if (!P) {
    P = detail::moment_solve(m, t, cfg.n);
    P = detail::newton(m, t, Scalar(2), *P, cfg, stats, cfg.p == Scalar(2));
    Scalar pk = 2;
    while (pk < cfg.p) {
      pk = min(cfg.p, pk + cfg.continuation_step);
      P = detail::newton(m, t, pk, *P, cfg, stats, pk == cfg.p);
    }
  }

  const auto ev = detail::evaluate(m, t, *P, cfg.p, false);
  auto zeros = find_real_zeros(*P, support_hull(m, t), cfg.roots);
  return BestApproxResult<Scalar>{*P, std::move(zeros), ev.signed_moments.cwiseAbs().maxCoeff(),
                                  pow(ev.value, 1 / cfg.p), stats.iterations};
}

}  // namespace lpzeros
