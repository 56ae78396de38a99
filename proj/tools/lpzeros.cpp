#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "lpzeros/app/config.hpp"
#include "lpzeros/app/sweep.hpp"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

struct Options {
  std::string config;
  std::optional<double> t;
  std::optional<double> t_start;
  std::optional<double> t_stop;
  std::optional<int> steps;
  std::optional<double> fd_step;
  std::string out;
  std::string format = "csv";
  bool cold = false;
};

lpzeros::app::SweepSpec make_spec(const Options& o, const lpzeros::app::ProblemConfig& cfg) {
  auto spec = lpzeros::app::default_spec(cfg);
  if (o.t_start) spec.t_start = *o.t_start;
  if (o.t_stop) spec.t_stop = *o.t_stop;
  if (o.steps) spec.steps = *o.steps;
  if (o.fd_step) spec.fd_step = *o.fd_step;
  spec.emit = o.format == "jsonl" ? lpzeros::app::OutputFormat::JsonLines : lpzeros::app::OutputFormat::Csv;
  spec.cold = o.cold;
  return spec;
}

// Writes to --out when given, stdout otherwise.
template <typename F>
void emit(const std::string& path, F&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream file(path);
  if (!file) throw lpzeros::ConfigError("cannot open output file " + path);
  write(file);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimal-norm monic polynomials in L^p with an inserted mass point: zeros and their motion"};
  app.require_subcommand(1);
  Options o;

  auto add_grid = [&](CLI::App* sub) {
    sub->add_option("--t-start", o.t_start, "first grid value of t");
    sub->add_option("--t-stop", o.t_stop, "last grid value of t");
    sub->add_option("--steps", o.steps, "number of grid points (>= 2)");
    sub->add_option("--fd-step", o.fd_step, "step for central differences of tracked zeros");
    sub->add_flag("--cold", o.cold, "cold-start every grid point and solve them concurrently");
  };

  auto* solve_cmd = app.add_subcommand("solve", "solve at a single t and print the sensitivity report");
  solve_cmd->add_option("--config", o.config, "problem configuration (JSON)")->required();
  solve_cmd->add_option("--t", o.t, "parameter value")->required();
  solve_cmd->add_option("--out", o.out, "output file (default stdout)");

  auto* sweep_cmd = app.add_subcommand("sweep", "track zeros over a uniform t grid");
  sweep_cmd->add_option("--config", o.config, "problem configuration (JSON)")->required();
  sweep_cmd->add_option("--out", o.out, "output file (default stdout)");
  sweep_cmd->add_option("--format", o.format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
  add_grid(sweep_cmd);

  auto* validate_cmd = app.add_subcommand("validate", "run the property battery over a t grid");
  validate_cmd->add_option("--config", o.config, "problem configuration (JSON)")->required();
  add_grid(validate_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    const auto cfg = lpzeros::app::load_config(o.config);
    if (*solve_cmd) {
      const auto out = lpzeros::app::run_solve(cfg, *o.t);
      emit(o.out, [&](std::ostream& os) { os << lpzeros::app::to_json(out, cfg).dump(2) << '\n'; });
      return 0;
    }
    const auto spec = make_spec(o, cfg);
    if (*sweep_cmd) {
      const auto records = lpzeros::app::run_sweep(cfg, spec);
      emit(o.out, [&](std::ostream& os) { lpzeros::app::write_records(os, records, spec.emit); });
      return 0;
    }
    const auto summary = lpzeros::app::run_validate(cfg, spec);
    lpzeros::app::print_summary(std::cout, summary);
    return summary.all_passed() ? 0 : kExitValidation;
  } catch (const lpzeros::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const lpzeros::DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const lpzeros::InvariantError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const lpzeros::Error& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kExitSolver;
  }
}
