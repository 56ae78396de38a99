#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <sstream>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "lpzeros/errors.hpp"

namespace lpzeros {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
struct Interval {
  Scalar lo;
  Scalar hi;

  Scalar width() const { return hi - lo; }
  bool contains(Scalar x, Scalar slack = Scalar(0)) const {
    return x >= lo - slack && x <= hi + slack;
  }
  bool contains_open(Scalar x) const { return x > lo && x < hi; }
};

template <typename Scalar>
struct LebesgueBase {
  Interval<Scalar> support;
  int panels = 16;
  int nodes_per_panel = 64;
};

template <typename Scalar>
struct Atom {
  Scalar location;
  Scalar weight;
};

template <typename Scalar>
struct DiscreteBase {
  std::vector<Atom<Scalar>> atoms;
};

/// The reference measure nu: either Lebesgue measure on a closed interval,
/// integrated by a composite Gauss-Legendre rule, or a finite sum of atoms.
template <typename Scalar>
class BaseMeasure {
 public:
  using Kind = std::variant<LebesgueBase<Scalar>, DiscreteBase<Scalar>>;

  static BaseMeasure lebesgue(Interval<Scalar> support, int panels = 16,
                              int nodes_per_panel = 64) {
    if (!(support.lo < support.hi))
      throw ConfigError("base measure: support interval requires a < b");
    if (panels < 1) throw ConfigError("base measure: panels must be >= 1");
    if (nodes_per_panel < 2)
      throw ConfigError("base measure: nodes_per_panel must be >= 2");
    return BaseMeasure(LebesgueBase<Scalar>{support, panels, nodes_per_panel});
  }

  static BaseMeasure discrete(std::vector<Atom<Scalar>> atoms) {
    if (atoms.empty()) throw ConfigError("base measure: at least one atom required");
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (!(atoms[i].weight > 0))
        throw ConfigError("base measure: atom weights must be positive");
      if (i > 0 && !(atoms[i - 1].location < atoms[i].location))
        throw ConfigError("base measure: atom locations must be strictly increasing");
    }
    return BaseMeasure(DiscreteBase<Scalar>{std::move(atoms)});
  }

  const Kind& kind() const { return kind_; }
  bool is_discrete() const { return std::holds_alternative<DiscreteBase<Scalar>>(kind_); }

  /// Closed convex hull of supp(nu).
  Interval<Scalar> hull() const {
    if (const auto* leb = std::get_if<LebesgueBase<Scalar>>(&kind_)) return leb->support;
    const auto& atoms = std::get<DiscreteBase<Scalar>>(kind_).atoms;
    return {atoms.front().location, atoms.back().location};
  }

  /// Number of distinct support points; max() for the continuous case.
  std::size_t support_points() const {
    if (is_discrete()) return std::get<DiscreteBase<Scalar>>(kind_).atoms.size();
    return std::numeric_limits<std::size_t>::max();
  }

  /// Same measure with every panel split in two.
  BaseMeasure refined() const {
    if (const auto* leb = std::get_if<LebesgueBase<Scalar>>(&kind_))
      return lebesgue(leb->support, 2 * leb->panels, leb->nodes_per_panel);
    return *this;
  }

 private:
  explicit BaseMeasure(Kind kind) : kind_(std::move(kind)) {}
  Kind kind_;
};

template <typename Scalar>
struct QuadratureRule {
  Vector<Scalar> nodes;
  Vector<Scalar> weights;

  Eigen::Index size() const { return nodes.size(); }
};

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the three-term recurrence.
template <typename Scalar>
QuadratureRule<Scalar> gauss_legendre(int count) {
  using std::abs;
  using std::cos;
  using std::acos;
  const Scalar pi = acos(Scalar(-1));
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();

  QuadratureRule<Scalar> rule{Vector<Scalar>(count), Vector<Scalar>(count)};
  const int half = (count + 1) / 2;
  for (int i = 0; i < half; ++i) {
    Scalar x = cos(pi * (Scalar(i) + Scalar(0.75)) / (Scalar(count) + Scalar(0.5)));
    Scalar dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      Scalar p0 = 1, p1 = x;
      for (int k = 2; k <= count; ++k) {
        const Scalar pk = ((2 * k - 1) * x * p1 - (k - 1) * p0) / Scalar(k);
        p0 = p1;
        p1 = pk;
      }
      if (count == 1) p0 = 1;
      dp = Scalar(count) * (x * p1 - p0) / (x * x - 1);
      const Scalar dx = p1 / dp;
      x -= dx;
      if (abs(dx) <= 2 * eps) break;
    }
    // recompute derivative at the converged node for the weight
    Scalar p0 = 1, p1 = x;
    for (int k = 2; k <= count; ++k) {
      const Scalar pk = ((2 * k - 1) * x * p1 - (k - 1) * p0) / Scalar(k);
      p0 = p1;
      p1 = pk;
    }
    if (count == 1) p0 = 1;
    dp = Scalar(count) * (x * p1 - p0) / (x * x - 1);
    const Scalar w = 2 / ((1 - x * x) * dp * dp);
    rule.nodes(i) = -x;
    rule.nodes(count - 1 - i) = x;
    rule.weights(i) = w;
    rule.weights(count - 1 - i) = w;
  }
  if (count % 2 == 1) rule.nodes(count / 2) = 0;
  return rule;
}

/// Composite rule for the base measure. Panel boundaries are the uniform
/// subdivision of the support merged with every breakpoint inside it.
/// Discrete measures return their atoms unchanged.
template <typename Scalar>
QuadratureRule<Scalar> build_rule(const BaseMeasure<Scalar>& base,
                                  std::span<const Scalar> breakpoints = {}) {
  if (const auto* disc = std::get_if<DiscreteBase<Scalar>>(&base.kind())) {
    const auto n = static_cast<Eigen::Index>(disc->atoms.size());
    QuadratureRule<Scalar> rule{Vector<Scalar>(n), Vector<Scalar>(n)};
    for (Eigen::Index i = 0; i < n; ++i) {
      rule.nodes(i) = disc->atoms[i].location;
      rule.weights(i) = disc->atoms[i].weight;
    }
    return rule;
  }

  const auto& leb = std::get<LebesgueBase<Scalar>>(base.kind());
  const Scalar a = leb.support.lo, b = leb.support.hi;
  if (!(a < b)) throw ConfigError("quadrature: malformed interval, a >= b");

  std::vector<Scalar> cuts;
  cuts.reserve(leb.panels + 1 + breakpoints.size());
  for (int i = 0; i <= leb.panels; ++i)
    cuts.push_back(i == leb.panels ? b : a + (b - a) * Scalar(i) / Scalar(leb.panels));
  for (Scalar bp : breakpoints)
    if (bp > a && bp < b) cuts.push_back(bp);
  std::sort(cuts.begin(), cuts.end());
  // panels thinner than a few ulps carry no mass and only cost nodes
  const Scalar merge = 64 * std::numeric_limits<Scalar>::epsilon() * (b - a);
  std::vector<Scalar> edges{cuts.front()};
  for (std::size_t i = 1; i < cuts.size(); ++i)
    if (cuts[i] - edges.back() > merge) edges.push_back(cuts[i]);
  edges.back() = b;

  const auto ref = gauss_legendre<Scalar>(leb.nodes_per_panel);
  const auto m = ref.size();
  const auto panels = static_cast<Eigen::Index>(edges.size() - 1);
  QuadratureRule<Scalar> rule{Vector<Scalar>(m * panels), Vector<Scalar>(m * panels)};
  for (Eigen::Index j = 0; j < panels; ++j) {
    const Scalar half = (edges[j + 1] - edges[j]) / 2;
    const Scalar mid = (edges[j + 1] + edges[j]) / 2;
    rule.nodes.segment(j * m, m) = (half * ref.nodes).array() + mid;
    rule.weights.segment(j * m, m) = half * ref.weights;
  }
  return rule;
}

/// Sum of weights times f(nodes); any non-finite sample is an error.
template <typename Scalar, typename F>
Scalar integrate(const QuadratureRule<Scalar>& rule, F&& f) {
  using std::isfinite;
  Scalar sum = 0;
  for (Eigen::Index i = 0; i < rule.size(); ++i) {
    const Scalar v = f(rule.nodes(i));
    if (!isfinite(v)) {
      std::ostringstream msg;
      msg << "integrate: non-finite integrand at node " << rule.nodes(i);
      throw NumericError(msg.str(), static_cast<double>(rule.nodes(i)));
    }
    sum += rule.weights(i) * v;
  }
  return sum;
}

}  // namespace lpzeros
