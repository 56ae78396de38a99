#include "lpzeros/app/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <sstream>

namespace lpzeros::app {
namespace {

struct PointSolution {
  double t;
  BestApproxResult<double> result;
  MarkovReport<double> report;
  std::optional<std::vector<double>> fd;
};

template <typename F>
auto at_t(double t, F&& body) {
  const std::string where = "at t = " + format_number(t) + ": ";
  try {
    return body();
  } catch (const StructuralError& e) {
    throw StructuralError(where + e.what());
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(where + e.what(), e.iterations(), e.residual());
  } catch (const ConsistencyError& e) {
    throw ConsistencyError(where + e.what());
  }
}

// zeros of `next` must stay between the neighbours of the matching zero of `prev`
void check_ordering(const std::vector<double>& prev, const std::vector<double>& next, double t_prev,
                    double t_next) {
  for (std::size_t k = 0; k < next.size(); ++k) {
    const bool above = k == 0 || next[k] > prev[k - 1];
    const bool below = k + 1 == next.size() || next[k] < prev[k + 1];
    if (!above || !below) {
      std::ostringstream msg;
      msg << "zero " << k << " changed sorted position between t = " << format_number(t_prev)
          << " and t = " << format_number(t_next);
      throw StructuralError(msg.str());
    }
  }
}

PointSolution solve_point(const ProblemConfig& cfg, double t,
                          const std::optional<MonicPolynomial<double>>& warm, bool interior, double h) {
  return at_t(t, [&] {
    auto result = solve(cfg.measure, t, cfg.solver, warm);
    auto report = zero_derivatives(cfg.measure, t, result, cfg.solver, cfg.coincidence_tol);
    std::optional<std::vector<double>> fd;
    if (interior) {
      const auto plus = solve(cfg.measure, t + h, cfg.solver, std::optional(result.P));
      const auto minus = solve(cfg.measure, t - h, cfg.solver, std::optional(result.P));
      check_ordering(result.zeros.zeros, plus.zeros.zeros, t, t + h);
      check_ordering(result.zeros.zeros, minus.zeros.zeros, t, t - h);
      std::vector<double> d(result.zeros.size());
      for (std::size_t k = 0; k < d.size(); ++k) d[k] = (plus.zeros[k] - minus.zeros[k]) / (2 * h);
      fd = std::move(d);
    }
    return PointSolution{t, std::move(result), std::move(report), std::move(fd)};
  });
}

std::vector<PointSolution> sweep_points(const ProblemConfig& cfg, const SweepSpec& spec) {
  spec.validate(cfg);
  std::vector<PointSolution> points;
  points.reserve(spec.steps);
  const auto interior = [&](int i) { return i > 0 && i + 1 < spec.steps; };
  if (spec.cold) {
    std::vector<std::future<PointSolution>> jobs;
    for (int i = 0; i < spec.steps; ++i)
      jobs.push_back(std::async(std::launch::async, [&cfg, &spec, i, inner = interior(i)] {
        return solve_point(cfg, spec.t_at(i), std::nullopt, inner, spec.fd_step);
      }));
    for (auto& job : jobs) points.push_back(job.get());
  } else {
    std::optional<MonicPolynomial<double>> warm;
    for (int i = 0; i < spec.steps; ++i) {
      points.push_back(solve_point(cfg, spec.t_at(i), warm, interior(i), spec.fd_step));
      warm = points.back().result.P;
    }
  }
  for (std::size_t i = 1; i < points.size(); ++i)
    check_ordering(points[i - 1].result.zeros.zeros, points[i].result.zeros.zeros, points[i - 1].t,
                   points[i].t);
  return points;
}

SweepRecord to_record(const PointSolution& pt) {
  SweepRecord r;
  r.t = pt.t;
  r.zeros = pt.result.zeros.zeros;
  r.dxdt_fd = pt.fd;
  r.eq2 = pt.report.eq2_verdict;
  r.char_residual = pt.result.char_residual;
  r.iterations = pt.result.iterations;
  const auto& low = pt.result.P.low_coeffs();
  r.coeffs.assign(low.data(), low.data() + low.size());
  bool has_cond = false;
  std::vector<double> cond;
  for (const auto& e : pt.report.entries) {
    r.dxdt_analytic.push_back(e.dxk_dt);
    r.predicted.push_back(e.predicted);
    if (e.cond_eq) {
      has_cond = true;
      cond.push_back(*e.cond_eq);
    }
  }
  if (has_cond) r.cond_eq = std::move(cond);
  return r;
}

std::string json_array(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::isfinite(v[i]) ? format_number(v[i]) : "null";
  }
  return s + "]";
}

void update(PropertyCheck& c, double value, bool ok, const std::string& where) {
  c.worst = std::max(c.worst, value);
  if (!ok && c.passed) {
    c.passed = false;
    c.detail = where;
  }
}

}  // namespace

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void SweepSpec::validate(const ProblemConfig& cfg) const {
  const auto& U = cfg.measure.t_domain();
  if (steps < 2) throw ConfigError("sweep: steps must be >= 2");
  if (!(t_start < t_stop)) throw ConfigError("sweep: requires t_start < t_stop");
  if (!U.contains_open(t_start) || !U.contains_open(t_stop))
    throw ConfigError("sweep: [t_start, t_stop] must lie inside the open t_domain");
  if (!(fd_step > 0)) throw ConfigError("sweep: fd_step must be positive");
}

double SweepSpec::t_at(int i) const {
  if (i == steps - 1) return t_stop;
  return t_start + (t_stop - t_start) * i / (steps - 1);
}

SweepSpec default_spec(const ProblemConfig& cfg) {
  const auto& U = cfg.measure.t_domain();
  SweepSpec spec;
  spec.t_start = U.lo + U.width() / 10;
  spec.t_stop = U.hi - U.width() / 10;
  return spec;
}

SolveOutput run_solve(const ProblemConfig& cfg, double t) {
  return at_t(t, [&] {
    auto result = solve(cfg.measure, t, cfg.solver);
    auto report = zero_derivatives(cfg.measure, t, result, cfg.solver, cfg.coincidence_tol);
    return SolveOutput{t, std::move(result), std::move(report)};
  });
}

nlohmann::json to_json(const SolveOutput& out, const ProblemConfig& cfg) {
  using nlohmann::json;
  const auto& low = out.result.P.low_coeffs();
  json coeffs = json::array();
  for (Eigen::Index i = 0; i < low.size(); ++i) coeffs.push_back(low(i));
  coeffs.push_back(1.0);

  json entries = json::array();
  for (std::size_t k = 0; k < out.report.entries.size(); ++k) {
    const auto& e = out.report.entries[k];
    entries.push_back({{"k", k},
                       {"x", e.x},
                       {"d", e.d},
                       {"R", e.R},
                       {"dfk_dxk", e.dfk_dxk},
                       {"dfk_dt", e.dfk_dt},
                       {"dxk_dt", e.dxk_dt},
                       {"cond_eq", e.cond_eq ? json(*e.cond_eq) : json(nullptr)},
                       {"theorem_applies", e.theorem_applies},
                       {"predicted", std::string(to_string(e.predicted))}});
  }
  const auto& zs = out.result.zeros;
  return {{"t", out.t},
          {"p", cfg.solver.p},
          {"n", cfg.solver.n},
          {"coefficients", coeffs},
          {"zeros", zs.zeros},
          {"min_gap", std::isfinite(zs.min_gap) ? json(zs.min_gap) : json(nullptr)},
          {"hull", {zs.hull.lo, zs.hull.hi}},
          {"char_residual", out.result.char_residual},
          {"norm_p", out.result.norm_p},
          {"iterations", out.result.iterations},
          {"eq2", std::string(to_string(out.report.eq2_verdict))},
          {"entries", entries},
          {"warnings", out.report.warnings}};
}

std::vector<SweepRecord> run_sweep(const ProblemConfig& cfg, const SweepSpec& spec) {
  const auto points = sweep_points(cfg, spec);
  std::vector<SweepRecord> out;
  out.reserve(points.size());
  for (const auto& pt : points) out.push_back(to_record(pt));
  return out;
}

void write_csv(std::ostream& os, std::span<const SweepRecord> records) {
  if (records.empty()) return;
  const std::size_t m = records.front().zeros.size();
  os << "t";
  for (const char* prefix : {"x_", "dxdt_", "fd_", "cond_"})
    for (std::size_t k = 0; k < m; ++k) os << ',' << prefix << k;
  os << ",eq2,residual,iters\n";
  for (const auto& r : records) {
    os << format_number(r.t);
    for (double v : r.zeros) os << ',' << format_number(v);
    for (double v : r.dxdt_analytic) os << ',' << format_number(v);
    for (std::size_t k = 0; k < m; ++k) os << ',' << (r.dxdt_fd ? format_number((*r.dxdt_fd)[k]) : "");
    for (std::size_t k = 0; k < m; ++k) os << ',' << (r.cond_eq ? format_number((*r.cond_eq)[k]) : "");
    os << ',' << to_string(r.eq2) << ',' << format_number(r.char_residual) << ',' << r.iterations << '\n';
  }
}

void write_jsonl(std::ostream& os, std::span<const SweepRecord> records) {
  for (const auto& r : records) {
    os << "{\"t\":" << format_number(r.t) << ",\"x\":" << json_array(r.zeros)
       << ",\"dxdt\":" << json_array(r.dxdt_analytic)
       << ",\"fd\":" << (r.dxdt_fd ? json_array(*r.dxdt_fd) : "null")
       << ",\"cond\":" << (r.cond_eq ? json_array(*r.cond_eq) : "null") << ",\"eq2\":\"" << to_string(r.eq2)
       << "\",\"residual\":" << format_number(r.char_residual) << ",\"iters\":" << r.iterations << "}\n";
  }
}

void write_records(std::ostream& os, std::span<const SweepRecord> records, OutputFormat format) {
  if (format == OutputFormat::Csv)
    write_csv(os, records);
  else
    write_jsonl(os, records);
}

bool ValidationSummary::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

namespace {

// Difference steps for the f_k partials, 1e-2 of the length scale on which
// f_k varies: the distance from x_k (or from y) to the nearest zero, mass
// location or atom.
double step_in_x(const ParametricMeasure<double>& m, const std::vector<double>& zs, std::size_t k,
                 const std::optional<MassValue<double>>& mv) {
  double scale = 1;
  for (std::size_t j = 0; j < zs.size(); ++j)
    if (j != k) scale = std::min(scale, std::abs(zs[j] - zs[k]));
  if (mv && mv->y != zs[k]) scale = std::min(scale, std::abs(mv->y - zs[k]));
  if (const auto* disc = std::get_if<DiscreteBase<double>>(&m.base().kind()))
    for (const auto& atom : disc->atoms)
      if (atom.location != zs[k]) scale = std::min(scale, std::abs(atom.location - zs[k]));
  return 1e-2 * scale;
}

double step_in_t(const std::vector<double>& zs, const std::optional<MassValue<double>>& mv) {
  double scale = 1;
  if (mv)
    for (double z : zs)
      if (z != mv->y) scale = std::min(scale, std::abs(mv->y - z) / std::max(1.0, std::abs(mv->y_prime)));
  return 1e-2 * scale;
}

// Central differences at h and h / 2 combined by one Richardson step.
template <typename F>
double richardson(F&& f, double x, double h) {
  const auto central = [&](double s) { return (f(x + s) - f(x - s)) / (2 * s); };
  return (4 * central(h / 2) - central(h)) / 3;
}

}  // namespace

ValidationSummary run_validate(const ProblemConfig& cfg, const SweepSpec& spec) {
  const auto points = sweep_points(cfg, spec);
  const double p = cfg.solver.p;
  const auto& U = cfg.measure.t_domain();

  PropertyCheck residual{"char_residual", true, 0, 1, ""};
  PropertyCheck fejer{"fejer_hull", true, 0, cfg.solver.roots.hull_tol, ""};
  PropertyCheck simple{"simple_zeros", true, 0, 1, ""};
  PropertyCheck negative{"dfk_dxk_negative", true, 0, 0, ""};
  PropertyCheck sign{"sign_identity", true, 0, 0, ""};
  PropertyCheck fd_x{"fd_dfk_dxk", true, 0, 1e-5, ""};
  PropertyCheck fd_t{"fd_dfk_dt", true, 0, 1e-5, ""};
  PropertyCheck fd_track{"fd_dxk_dt", true, 0, 1e-3, ""};

  for (const auto& pt : points) {
    const double t = pt.t;
    const auto& res = pt.result;
    const std::string where = "t = " + format_number(t);

    const double bound = cfg.solver.residual_tol * std::max(1.0, std::pow(res.norm_p, p - 1));
    update(residual, res.char_residual / bound, res.char_residual <= bound, where);

    const auto hull = res.zeros.hull;
    const double width = hull.width();
    for (double z : res.zeros.zeros) {
      const double excess = std::max({0.0, hull.lo - z, z - hull.hi}) / width;
      update(fejer, excess, excess <= cfg.solver.roots.hull_tol, where);
    }
    // ratio of the simplicity tolerance to the observed gap; passes below 1
    const double gap_ratio = cfg.solver.roots.simplicity_tol * width / res.zeros.min_gap;
    update(simple, gap_ratio, gap_ratio < 1, where);

    std::vector<double> zs = res.zeros.zeros;
    const auto mv = mass_at(cfg.measure, t);
    const double ht = step_in_t(zs, mv);
    for (std::size_t k = 0; k < zs.size(); ++k) {
      const auto& e = pt.report.entries[k];
      const std::string wk = where + ", k = " + std::to_string(k);
      update(negative, std::max(0.0, e.dfk_dxk), e.dfk_dxk < 0, wk);
      const bool same_sign = (e.dxk_dt > 0) == (e.dfk_dt > 0) && (e.dxk_dt < 0) == (e.dfk_dt < 0);
      update(sign, same_sign ? 0.0 : 1.0, same_sign, wk);

      auto shifted = zs;
      const double dx_fd = richardson(
          [&](double x) {
            shifted[k] = x;
            return f_k_from_zeros<double>(cfg.measure, t, shifted, k, p);
          },
          zs[k], step_in_x(cfg.measure, zs, k, mv));
      const double ex = std::abs(dx_fd - e.dfk_dxk) / std::abs(e.dfk_dxk);
      update(fd_x, ex, ex <= fd_x.limit, wk);

      if (U.contains_open(t - ht) && U.contains_open(t + ht)) {
        const double dt_fd =
            richardson([&](double s) { return f_k_from_zeros<double>(cfg.measure, s, zs, k, p); }, t, ht);
        const double et = std::abs(dt_fd - e.dfk_dt) / std::max(std::abs(e.dfk_dt), 1e-6 * std::abs(e.dfk_dxk));
        update(fd_t, et, et <= fd_t.limit, wk);
      }
      if (pt.fd) {
        const double er = std::abs((*pt.fd)[k] - e.dxk_dt) / std::max(std::abs(e.dxk_dt), 1e-6);
        update(fd_track, er, er <= fd_track.limit, wk);
      }
    }
  }
  return ValidationSummary{{residual, fejer, simple, negative, sign, fd_x, fd_t, fd_track}};
}

void print_summary(std::ostream& os, const ValidationSummary& summary) {
  for (const auto& c : summary.checks) {
    os << (c.passed ? "PASS " : "FAIL ") << c.name << " worst=" << format_number(c.worst);
    if (!c.passed) os << " first failure at " << c.detail;
    os << '\n';
  }
  os << (summary.all_passed() ? "all properties passed" : "some properties failed") << '\n';
}

}  // namespace lpzeros::app
