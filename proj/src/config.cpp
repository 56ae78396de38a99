#include "lpzeros/app/config.hpp"

#include <fstream>
#include <initializer_list>
#include <string>

namespace lpzeros::app {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& why) {
  throw ConfigError("config field '" + field + "': " + why);
}

void allow_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) fail(where, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (const char* k : keys) known = known || key == k;
    if (!known) fail(where.empty() ? key : where + "." + key, "unknown key");
  }
}

const json& require(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) fail(where.empty() ? key : where + "." + key, "missing");
  return obj.at(key);
}

double number(const json& v, const std::string& field) {
  if (!v.is_number()) fail(field, "expected a number");
  return v.get<double>();
}

int integer(const json& v, const std::string& field) {
  if (!v.is_number_integer()) fail(field, "expected an integer");
  return v.get<int>();
}

Interval<double> interval(const json& v, const std::string& field) {
  if (!v.is_array() || v.size() != 2) fail(field, "expected [lo, hi]");
  const Interval<double> out{number(v[0], field + "[0]"), number(v[1], field + "[1]")};
  if (!(out.lo < out.hi)) fail(field, "requires lo < hi");
  return out;
}

BaseMeasure<double> parse_base(const json& v, Interval<double> support) {
  const std::string where = "base_measure";
  if (!v.is_object()) fail(where, "expected an object");
  const std::string type = require(v, where, "type").is_string() ? v.at("type").get<std::string>() : "";
  if (type == "lebesgue") {
    allow_keys(v, where, {"type", "panels", "nodes_per_panel"});
    const int panels = v.contains("panels") ? integer(v.at("panels"), where + ".panels") : 16;
    const int npp =
        v.contains("nodes_per_panel") ? integer(v.at("nodes_per_panel"), where + ".nodes_per_panel") : 64;
    if (panels < 1) fail(where + ".panels", "must be >= 1");
    if (npp < 2) fail(where + ".nodes_per_panel", "must be >= 2");
    return BaseMeasure<double>::lebesgue(support, panels, npp);
  }
  if (type == "discrete") {
    allow_keys(v, where, {"type", "atoms"});
    const auto& atoms = require(v, where, "atoms");
    if (!atoms.is_array() || atoms.empty()) fail(where + ".atoms", "expected a non-empty array");
    std::vector<Atom<double>> out;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const std::string f = where + ".atoms[" + std::to_string(i) + "]";
      if (!atoms[i].is_array() || atoms[i].size() != 2) fail(f, "expected [location, weight]");
      const Atom<double> a{number(atoms[i][0], f), number(atoms[i][1], f)};
      if (!(a.weight > 0)) fail(f, "weight must be positive");
      if (!support.contains(a.location)) fail(f, "location outside support");
      if (!out.empty() && !(out.back().location < a.location)) fail(f, "locations must be strictly increasing");
      out.push_back(a);
    }
    return BaseMeasure<double>::discrete(std::move(out));
  }
  fail(where + ".type", "expected \"lebesgue\" or \"discrete\"");
}

WeightFamily<double> parse_weight(const json& v) {
  const std::string where = "weight";
  if (!v.is_object()) fail(where, "expected an object");
  const auto& fam = require(v, where, "family");
  const std::string name = fam.is_string() ? fam.get<std::string>() : "";
  if (name == "constant") {
    allow_keys(v, where, {"family"});
    return WeightFamily<double>::constant();
  }
  if (name == "exponential") {
    allow_keys(v, where, {"family"});
    return WeightFamily<double>::exponential();
  }
  if (name == "jacobi_vary_alpha") {
    allow_keys(v, where, {"family", "beta"});
    const double beta = number(require(v, where, "beta"), where + ".beta");
    if (!(beta > -1)) fail(where + ".beta", "must be > -1");
    return WeightFamily<double>::jacobi_vary_alpha(beta);
  }
  if (name == "jacobi_vary_beta") {
    allow_keys(v, where, {"family", "alpha"});
    const double alpha = number(require(v, where, "alpha"), where + ".alpha");
    if (!(alpha > -1)) fail(where + ".alpha", "must be > -1");
    return WeightFamily<double>::jacobi_vary_beta(alpha);
  }
  fail(where + ".family", "expected constant, exponential, jacobi_vary_alpha or jacobi_vary_beta");
}

ScalarFamily<double> parse_scalar(const json& v, const std::string& where) {
  if (!v.is_object()) fail(where, "expected an object");
  const auto& fam = require(v, where, "family");
  const std::string name = fam.is_string() ? fam.get<std::string>() : "";
  if (name == "constant") {
    allow_keys(v, where, {"family", "value"});
    return ScalarFamily<double>::constant(number(require(v, where, "value"), where + ".value"));
  }
  if (name == "affine") {
    allow_keys(v, where, {"family", "intercept", "slope"});
    return ScalarFamily<double>::affine(number(require(v, where, "intercept"), where + ".intercept"),
                                        number(require(v, where, "slope"), where + ".slope"));
  }
  if (name == "exponential") {
    allow_keys(v, where, {"family", "scale", "rate"});
    return ScalarFamily<double>::exponential(number(require(v, where, "scale"), where + ".scale"),
                                             number(require(v, where, "rate"), where + ".rate"));
  }
  fail(where + ".family", "expected constant, affine or exponential");
}

MassPoint<double> parse_mass(const json& v, Interval<double> t_domain) {
  const std::string where = "mass";
  allow_keys(v, where, {"j", "y"});
  MassPoint<double> mp{parse_scalar(require(v, where, "j"), "mass.j"),
                       parse_scalar(require(v, where, "y"), "mass.y")};
  // j is constant, affine or a scaled exponential: positivity on the open
  // interval follows from the closed endpoints and the midpoint
  const double mid = (t_domain.lo + t_domain.hi) / 2;
  const auto& j = mp.size;
  if (!(j.value(t_domain.lo) >= 0 && j.value(t_domain.hi) >= 0 && j.value(mid) > 0))
    fail("mass.j", "j(t) must be positive on t_domain");
  return mp;
}

}  // namespace

ProblemConfig parse_config(const json& doc) {
  allow_keys(doc, "", {"p", "n", "support", "base_measure", "weight", "mass", "t_domain", "solver"});

  SolverConfig<double> solver;
  solver.p = number(require(doc, "", "p"), "p");
  if (!(solver.p >= 2)) fail("p", "must satisfy p >= 2 (1 < p < 2 and p = inf are not supported)");
  solver.n = integer(require(doc, "", "n"), "n");
  if (solver.n < 0) fail("n", "must be >= 0");

  const auto support = interval(require(doc, "", "support"), "support");
  const auto t_domain = interval(require(doc, "", "t_domain"), "t_domain");
  auto base = parse_base(require(doc, "", "base_measure"), support);
  const auto weight = parse_weight(require(doc, "", "weight"));
  std::optional<MassPoint<double>> mass;
  if (doc.contains("mass")) mass = parse_mass(doc.at("mass"), t_domain);

  double coincidence_tol = 1e-12;
  if (doc.contains("solver")) {
    const auto& s = doc.at("solver");
    allow_keys(s, "solver",
               {"residual_tol", "max_newton_iters", "continuation_step", "levenberg_floor", "simplicity_tol",
                "hull_tol", "coincidence_tol"});
    if (s.contains("residual_tol")) solver.residual_tol = number(s.at("residual_tol"), "solver.residual_tol");
    if (s.contains("max_newton_iters"))
      solver.max_newton_iters = integer(s.at("max_newton_iters"), "solver.max_newton_iters");
    if (s.contains("continuation_step"))
      solver.continuation_step = number(s.at("continuation_step"), "solver.continuation_step");
    if (s.contains("levenberg_floor"))
      solver.levenberg_floor = number(s.at("levenberg_floor"), "solver.levenberg_floor");
    if (s.contains("simplicity_tol"))
      solver.roots.simplicity_tol = number(s.at("simplicity_tol"), "solver.simplicity_tol");
    if (s.contains("hull_tol")) solver.roots.hull_tol = number(s.at("hull_tol"), "solver.hull_tol");
    if (s.contains("coincidence_tol")) coincidence_tol = number(s.at("coincidence_tol"), "solver.coincidence_tol");
  }
  try {
    solver.validate();
  } catch (const ConfigError& e) {
    fail("solver", e.what());
  }

  if (base.support_points() < static_cast<std::size_t>(solver.n) + 2 - (mass ? 1 : 0))
    fail("base_measure", "too few support points for n (need n + 2 distinct points)");

  try {
    return ProblemConfig{ParametricMeasure<double>(std::move(base), weight, std::move(mass), t_domain), solver,
                         coincidence_tol};
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

ProblemConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

}  // namespace lpzeros::app
