#pragma once

// Command-line front end: flag/config parsing, dispatch to the verification
// harnesses, parameter sweeps and CSV/JSON output.

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "bose/report.hpp"

namespace bose::cli {

enum class ExitCode : int { ok = 0, checks_failed = 1, invalid_input = 2, not_converged = 3 };

struct RunConfig {
  std::string command;  // pressure | equivalence | laplace | fulldiag | sweep
  double beta = 1.0;
  double mu = std::numeric_limits<double>::quiet_NaN();
  double nu = 0.0;
  double phi = 0.0;
  int dim = 3;
  double side = 16.0;
  std::vector<double> ladder;
  double pmax = 0.0;  // 0 picks the cutoff from tail_tol
  std::vector<int> fock_cutoffs{20};
  double coefficient = 2.0;
  double coupling = 1.0;  // mean-field a for fulldiag
  double rel_tol = 1e-17;
  double tail_tol = 1e-15;
  double fd_step = 0.0;  // 0 picks max(1e-5, 1e-4 |mu|)
  double rate_threshold = 0.9;
  double bound_tol = 1e-9;
  // sweep grid and target command
  std::string target = "fulldiag";
  std::vector<double> betas, mus, nus;
  int workers = 1;
  std::string out;  // empty writes to stdout
  std::string format = "csv";
};

// Parses flags (and --config key=value files; flags win). Throws DomainError
// naming the offending key.
RunConfig parse_config(const std::vector<std::string>& args);
void validate(const RunConfig& config);

std::vector<double> parse_list(const std::string& text, const char* key);

struct RunResult {
  ExitCode code = ExitCode::ok;
  std::vector<ReportRow> rows;
};

// Runs a validated config. Library errors propagate as exceptions.
RunResult run(const RunConfig& config);

void write_rows(const RunConfig& config, const std::vector<ReportRow>& rows, std::ostream& out);

// Whole program: parse, run, write. Failures print one JSON error record on
// err and map to an exit code.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bose::cli
