#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include <json.hpp>

#include "lpzeros/app/config.hpp"
#include "lpzeros/app/sweep.hpp"

using namespace lpzeros;
using namespace lpzeros::app;
using nlohmann::json;

namespace {

std::string config_path(const char* name) { return std::string(LPZEROS_CONFIG_DIR) + "/" + name; }

json base_doc() {
  return json::parse(R"({
    "p": 2, "n": 1, "support": [-1, 1],
    "base_measure": {"type": "lebesgue"},
    "weight": {"family": "constant"},
    "t_domain": [-1, 1]
  })");
}

SweepSpec grid(double a, double b, int steps) {
  SweepSpec s;
  s.t_start = a;
  s.t_stop = b;
  s.steps = steps;
  return s;
}

}  // namespace

TEST_CASE("config: valid documents parse") {
  const auto cfg = parse_config(base_doc());
  CHECK(cfg.solver.n == 1);
  CHECK(cfg.solver.p == 2.0);
  CHECK_FALSE(cfg.measure.has_mass());

  for (const char* name : {"legendre.json", "mass.json", "moving_mass_right.json", "moving_mass_left.json",
                           "growing_mass.json", "exponential.json", "jacobi.json", "discrete.json", "static.json",
                           "tight_tolerance.json"})
    CHECK_NOTHROW(load_config(config_path(name)));

  auto doc = base_doc();
  doc["solver"] = {{"residual_tol", 1e-12}, {"max_newton_iters", 50}, {"simplicity_tol", 1e-7}};
  const auto tuned = parse_config(doc);
  CHECK(tuned.solver.residual_tol == 1e-12);
  CHECK(tuned.solver.max_newton_iters == 50);
  CHECK(tuned.solver.roots.simplicity_tol == 1e-7);
}

TEST_CASE("config: field-level errors") {
  const auto expect_error = [](const json& doc, const std::string& needle) {
    try {
      parse_config(doc);
      FAIL("expected ConfigError mentioning " << needle);
    } catch (const ConfigError& e) {
      CHECK_MESSAGE(std::string(e.what()).find(needle) != std::string::npos, e.what());
    }
  };
  CHECK_THROWS_WITH_AS(load_config(config_path("invalid_p.json")), doctest::Contains("p >= 2"), ConfigError);

  auto d = base_doc();
  d["extra"] = 1;
  expect_error(d, "extra");
  d = base_doc();
  d.erase("support");
  expect_error(d, "support");
  d = base_doc();
  d["weight"] = {{"family", "gaussian"}};
  expect_error(d, "weight.family");
  d = base_doc();
  d["weight"] = {{"family", "constant"}, {"beta", 1}};
  expect_error(d, "weight.beta");
  d = base_doc();
  d["n"] = 1.5;
  expect_error(d, "'n'");
  d = base_doc();
  d["support"] = {1, -1};
  expect_error(d, "support");
  d = base_doc();
  d["base_measure"] = {{"type", "discrete"}, {"atoms", {{0, 1}, {-1, 1}, {2, 1}}}};
  d["support"] = {-1, 2};
  expect_error(d, "atoms[1]");
  d = base_doc();
  d["base_measure"] = {{"type", "discrete"}, {"atoms", {{0, 1}, {1, 1}}}};
  expect_error(d, "too few support points");
  d = base_doc();
  d["mass"] = {{"j", {{"family", "affine"}, {"intercept", 0.5}, {"slope", 1}}}, {"y", {{"family", "constant"}, {"value", 2}}}};
  expect_error(d, "mass.j");
  d = base_doc();
  d["weight"] = {{"family", "jacobi_vary_alpha"}, {"beta", 0}};
  expect_error(d, "Jacobi");
  d = base_doc();
  d["solver"] = {{"residual_tolerance", 1e-9}};
  expect_error(d, "solver.residual_tolerance");
  CHECK_THROWS_AS(load_config(config_path("missing.json")), ConfigError);
}

TEST_CASE("run_solve examples") {
  const auto leg = run_solve(load_config(config_path("legendre.json")), 0.0);
  REQUIRE(leg.result.zeros.size() == 3);
  CHECK(leg.result.zeros[0] == doctest::Approx(-0.774597).epsilon(1e-6));
  CHECK(std::abs(leg.result.zeros[1]) <= 1e-12);
  CHECK(leg.result.zeros[2] == doctest::Approx(0.774597).epsilon(1e-6));

  const auto cfg = load_config(config_path("mass.json"));
  const auto mass = run_solve(cfg, 0.0);
  CHECK(mass.result.zeros[0] == doctest::Approx(0.666667).epsilon(1e-6));
  CHECK(mass.report.entries[0].dxk_dt == doctest::Approx(0.333333).epsilon(1e-6));

  const auto doc = to_json(mass, cfg);
  CHECK(doc["zeros"].size() == 1);
  CHECK(doc["coefficients"].back() == 1.0);
  CHECK(doc["entries"][0]["predicted"] == "increasing");
  CHECK(doc["entries"][0]["R"].get<double>() == doctest::Approx(0.75));
  CHECK(doc["min_gap"].is_null());
}

TEST_CASE("sweep: moving mass gives increasing zero columns") {
  const auto cfg = load_config(config_path("moving_mass_right.json"));
  const auto records = run_sweep(cfg, grid(0, 1, 11));
  REQUIRE(records.size() == 11);
  for (std::size_t i = 1; i < records.size(); ++i)
    for (std::size_t k = 0; k < records[i].zeros.size(); ++k) CHECK(records[i].zeros[k] > records[i - 1].zeros[k]);
  CHECK_FALSE(records.front().dxdt_fd);
  CHECK_FALSE(records.back().dxdt_fd);
  for (std::size_t i = 1; i + 1 < records.size(); ++i) {
    REQUIRE(records[i].dxdt_fd);
    for (std::size_t k = 0; k < 4; ++k)
      CHECK(std::abs((*records[i].dxdt_fd)[k] - records[i].dxdt_analytic[k]) <= 1e-3 * records[i].dxdt_analytic[k]);
  }
}

TEST_CASE("sweep: exponential weight, classical monotonicity") {
  auto cfg = load_config(config_path("exponential.json"));
  const auto records = run_sweep(cfg, grid(0, 1, 11));
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(records[i].eq2 == Monotonicity::Increasing);
    CHECK_FALSE(records[i].cond_eq);
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(records[i].dxdt_analytic[k] > 0);
      if (i) CHECK(records[i].zeros[k] > records[i - 1].zeros[k]);
    }
  }
}

TEST_CASE("sweep: static configuration gives identical rows") {
  const auto records = run_sweep(load_config(config_path("static.json")), grid(-0.5, 0.5, 6));
  for (const auto& r : records)
    for (std::size_t k = 0; k < r.zeros.size(); ++k) {
      CHECK(std::abs(r.zeros[k] - records.front().zeros[k]) <= 1e-10);
      CHECK(r.dxdt_analytic[k] == 0.0);
    }
}

TEST_CASE("sweep: cold concurrent solves match warm-started sweep") {
  const auto cfg = load_config(config_path("jacobi.json"));
  auto spec = grid(0, 1.5, 7);
  const auto warm = run_sweep(cfg, spec);
  spec.cold = true;
  const auto cold = run_sweep(cfg, spec);
  for (std::size_t i = 0; i < warm.size(); ++i)
    for (std::size_t j = 0; j < warm[i].coeffs.size(); ++j) CHECK(std::abs(warm[i].coeffs[j] - cold[i].coeffs[j]) <= 1e-9);
}

TEST_CASE("sweep output formats") {
  const auto cfg = load_config(config_path("mass.json"));
  const auto records = run_sweep(cfg, grid(0, 1, 3));

  std::ostringstream csv;
  write_csv(csv, records);
  std::istringstream lines(csv.str());
  std::string header, first, middle;
  std::getline(lines, header);
  std::getline(lines, first);
  std::getline(lines, middle);
  CHECK(header == "t,x_0,dxdt_0,fd_0,cond_0,eq2,residual,iters");
  CHECK(first.find(",,") != std::string::npos);  // endpoint FD omitted
  CHECK(middle.rfind("0.5,0.83333333333333", 0) == 0);

  std::ostringstream jl;
  write_jsonl(jl, records);
  std::istringstream jlines(jl.str());
  std::string line;
  int count = 0;
  while (std::getline(jlines, line)) {
    const auto doc = json::parse(line);
    CHECK(doc["x"].size() == 1);
    CHECK(doc["eq2"] == "constant");
    CHECK(doc["fd"].is_null() == (count != 1));
    CHECK(doc["cond"].size() == 1);
    ++count;
  }
  CHECK(count == 3);

  // identical inputs, identical bytes
  std::ostringstream again;
  write_csv(again, run_sweep(cfg, grid(0, 1, 3)));
  CHECK(again.str() == csv.str());
  CHECK(format_number(0.1) == "0.10000000000000001");
}

TEST_CASE("sweep spec validation") {
  const auto cfg = load_config(config_path("mass.json"));
  CHECK_THROWS_AS(run_sweep(cfg, grid(0, 1, 1)), ConfigError);
  CHECK_THROWS_AS(run_sweep(cfg, grid(1, 0, 5)), ConfigError);
  CHECK_THROWS_AS(run_sweep(cfg, grid(-0.5, 1, 5)), ConfigError);  // t_start on the open boundary
  const auto spec = default_spec(cfg);
  CHECK(spec.t_start == doctest::Approx(-0.3));
  CHECK(spec.t_stop == doctest::Approx(1.3));
}

TEST_CASE("sweep failures report the offending t") {
  const auto cfg = load_config(config_path("tight_tolerance.json"));
  CHECK_THROWS_WITH_AS(run_sweep(cfg, grid(-0.5, 0.5, 3)), doctest::Contains("at t = -0.5"), ConvergenceError);
}

TEST_CASE("validate: property battery") {
  for (const char* name : {"legendre.json", "mass.json", "moving_mass_left.json", "growing_mass.json", "jacobi.json",
                           "discrete.json", "static.json", "exponential.json"}) {
    const auto cfg = load_config(config_path(name));
    const auto summary = run_validate(cfg, default_spec(cfg));
    std::ostringstream os;
    print_summary(os, summary);
    INFO(name << "\n" << os.str());
    CHECK(summary.all_passed());
    CHECK(summary.checks.size() == 8);
  }
  const auto mass = load_config(config_path("mass.json"));
  const auto summary = run_validate(mass, default_spec(mass));
  for (const auto& c : summary.checks)
    if (c.name == "fd_dxk_dt") CHECK(c.worst <= 1e-3);
  CHECK_THROWS_AS(run_validate(load_config(config_path("tight_tolerance.json")), grid(-0.5, 0.5, 3)),
                  ConvergenceError);
}
