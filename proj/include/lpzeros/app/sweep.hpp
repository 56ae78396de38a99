#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "lpzeros/app/config.hpp"
#include "lpzeros/markov.hpp"

namespace lpzeros::app {

enum class OutputFormat { Csv, JsonLines };

struct SweepSpec {
  double t_start = 0;
  double t_stop = 1;
  int steps = 11;
  double fd_step = 1e-4;
  OutputFormat emit = OutputFormat::Csv;
  bool cold = false;  // independent cold solves per grid point, run concurrently

  void validate(const ProblemConfig& cfg) const;
  double t_at(int i) const;
};

/// Default grid: the middle 80% of t_domain, 11 points.
SweepSpec default_spec(const ProblemConfig& cfg);

struct SweepRecord {
  double t = 0;
  std::vector<double> zeros;
  std::vector<double> dxdt_analytic;
  std::optional<std::vector<double>> dxdt_fd;
  std::optional<std::vector<double>> cond_eq;
  Monotonicity eq2 = Monotonicity::Constant;
  double char_residual = 0;
  int iterations = 0;
  std::vector<double> coeffs;  // low coefficients of P
  std::vector<Direction> predicted;
};

struct SolveOutput {
  double t;
  BestApproxResult<double> result;
  MarkovReport<double> report;
};

SolveOutput run_solve(const ProblemConfig& cfg, double t);

nlohmann::json to_json(const SolveOutput& out, const ProblemConfig& cfg);

/// Solves on the uniform grid, warm-starting each point from its predecessor
/// unless spec.cold is set. Interior points also get central differences of
/// the tracked zeros at t +- fd_step. A failure at any t is rethrown with that
/// t in the message.
std::vector<SweepRecord> run_sweep(const ProblemConfig& cfg, const SweepSpec& spec);

void write_csv(std::ostream& os, std::span<const SweepRecord> records);
void write_jsonl(std::ostream& os, std::span<const SweepRecord> records);
void write_records(std::ostream& os, std::span<const SweepRecord> records, OutputFormat format);

struct PropertyCheck {
  std::string name;
  bool passed = true;
  double worst = 0;  // worst observed value of the checked quantity
  double limit = 0;
  std::string detail;
};

struct ValidationSummary {
  std::vector<PropertyCheck> checks;
  bool all_passed() const;
};

/// Runs the property battery over the sweep grid: characterization residual,
/// hull membership, simplicity, negativity of df_k/dx_k, the sign identity,
/// and finite-difference agreement for df_k/dx_k, df_k/dt and dx_k/dt.
ValidationSummary run_validate(const ProblemConfig& cfg, const SweepSpec& spec);

void print_summary(std::ostream& os, const ValidationSummary& summary);

/// %.17g formatting.
std::string format_number(double v);

}  // namespace lpzeros::app
