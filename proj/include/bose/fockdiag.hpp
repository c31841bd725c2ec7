#pragma once

// Exact statistical mechanics on truncated Fock spaces. A truncation keeps a
// few lattice modes (zero mode first) with per-mode occupation cutoffs; the
// configuration basis is enumerated in mixed radix with the zero-mode
// occupation varying fastest, so the linear source only couples neighbouring
// basis vectors and every Hamiltonian here is block tridiagonal.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "bose/lattice.hpp"
#include "bose/nonlinear_model.hpp"

namespace bose {

inline constexpr std::size_t kDefaultMaxFockDimension = 1'000'000;

// Ceiling on the configuration count; BOSE_LIMITS_MAX_DIM overrides it.
std::size_t max_fock_dimension();

struct FockTruncation {
  std::vector<double> energies;  // lambda(p) per kept mode; energies[0] == 0 is the zero mode
  std::vector<int> cutoffs;      // n_max(p) per kept mode
  double volume = 1.0;

  std::size_t modes() const { return energies.size(); }
  std::size_t dimension() const;
  std::size_t zero_block() const { return static_cast<std::size_t>(cutoffs.at(0)) + 1; }
};

// Throws DomainError for malformed truncations and ResourceError above the
// ceiling.
void validate(const FockTruncation& trunc);

// First n_modes modes of the lattice (which must contain p = 0).
FockTruncation make_truncation(const ModeLattice& lattice, std::size_t n_modes,
                               std::vector<int> cutoffs);

struct ConfigList {
  std::size_t modes = 0;
  std::vector<int> occupations;  // size() * modes, mode index fastest
  std::vector<long> total;       // N(omega)
  std::vector<long> nonzero;     // N'(omega), zero mode excluded

  std::size_t size() const { return total.size(); }
  std::span<const int> at(std::size_t j) const { return {occupations.data() + j * modes, modes}; }
  int zero_occupation(std::size_t j) const { return occupations[j * modes]; }
};

ConfigList enumerate_configs(const FockTruncation& trunc);

struct DiagonalModel {
  double a = 0.0;         // mean-field coupling
  std::vector<double> v;  // M x M row-major kernel v(p - p'), symmetric, >= 0; empty means 0
  double mu = -1.0;
};

void validate(const DiagonalModel& model, std::size_t modes);

// E(omega) = sum lambda omega + (a/2V)(N^2 - N) + (1/2V) sum v omega omega' - mu N.
std::vector<double> diagonal_energies(const DiagonalModel& model, const FockTruncation& trunc,
                                      const ConfigList& configs);

enum class Sparsity { diagonal, zero_mode_tridiagonal };

struct OperatorMatrix {
  std::vector<double> diag;
  // off[j] = <j+1|H|j>; nonzero only when j and j+1 differ by one zero-mode
  // quantum (and zero at every block boundary).
  std::vector<double> off;
  std::size_t block = 1;  // zero-mode block length, n0_max + 1
  Sparsity sparsity = Sparsity::diagonal;

  std::size_t size() const { return diag.size(); }
  Eigen::MatrixXd to_dense() const;
};

OperatorMatrix diagonal_operator(std::vector<double> diag, const FockTruncation& trunc);

// H^{FD} with -nu sqrt(V) (a_0 + a_0^dag) added (phase fixed to 0).
OperatorMatrix add_linear_source(const DiagonalModel& model, const FockTruncation& trunc,
                                 const ConfigList& configs, double nu);

// H^{FD,app}: diagonal E(omega) - c nu sqrt(V) sqrt(omega(0) + 1).
OperatorMatrix add_sqrt_source(const DiagonalModel& model, const FockTruncation& trunc,
                               const ConfigList& configs, double nu,
                               double coefficient = kDefaultSourceCoefficient);

// Matrix of a_0 + a_0^dag in the configuration basis.
OperatorMatrix zero_mode_field(const FockTruncation& trunc, const ConfigList& configs);

OperatorMatrix operator-(const OperatorMatrix& x, const OperatorMatrix& y);

// Diagonal and first off-diagonal of the density matrix e^{-beta H}/Z; that
// is all an expectation of a block-tridiagonal observable needs.
struct GibbsState {
  double beta = 1.0;
  double volume = 1.0;
  double log_z = 0.0;
  std::vector<double> rho_diag;
  std::vector<double> rho_off;

  double pressure() const { return log_z / (beta * volume); }
};

// Diagonal operators use a stabilised log-sum-exp; tridiagonal blocks are
// diagonalised exactly. ConvergenceError if an eigensolve fails.
GibbsState gibbs_state(const OperatorMatrix& op, double beta, double volume);

// (1/(beta V)) ln Tr e^{-beta H}.
double gibbs_trace(const OperatorMatrix& op, double beta, double volume);

double gibbs_expectation(std::span<const double> per_config, const GibbsState& state);
double gibbs_expectation(const OperatorMatrix& x, const GibbsState& state);

struct InequalityReport {
  double lower = 0.0;
  double upper = 0.0;
  double delta_p = 0.0;
  double lower_margin = 0.0;  // delta_p - lower
  double upper_margin = 0.0;  // upper - delta_p
  bool passed = false;
};

// lower = <(Ha - Hb)/V>_a, upper = <(Ha - Hb)/V>_b, delta_p = p_b - p_a.
InequalityReport bogoliubov_bounds(const OperatorMatrix& ha, const OperatorMatrix& hb,
                                   double beta, double volume, double tol = 1e-9);
InequalityReport bogoliubov_bounds(const OperatorMatrix& ha, const GibbsState& sa,
                                   const OperatorMatrix& hb, const GibbsState& sb,
                                   double tol = 1e-9);

// f(E[X]) - E[f(X)] for a per-configuration observable X.
double jensen_gap(const std::function<double(double)>& f, std::span<const double> x,
                  const GibbsState& state);

struct FdQuasiAverage {
  double eta = 0.0;           // <a_0 / sqrt(V)>
  double root_density = 0.0;  // sqrt(<n_0> / V)
  double difference = 0.0;    // eta - root_density
};

FdQuasiAverage quasiaverage_fd(const OperatorMatrix& h, const FockTruncation& trunc,
                               const ConfigList& configs, double beta);

// Probability that some mode sits at its cutoff.
double shell_weight(const FockTruncation& trunc, const ConfigList& configs,
                    const GibbsState& state);

// min over configurations of E(omega) + mu N - (a/2V)(N^2 - N); >= 0 for
// lambda >= 0, v >= 0.
double superstability_slack(const DiagonalModel& model, const FockTruncation& trunc,
                            const ConfigList& configs, std::span<const double> energies);

struct SandwichRow {
  double volume = 0.0;
  std::size_t dimension = 0;
  double p_fd = 0.0;
  double p_app = 0.0;
  double delta_p = 0.0;             // p_fd - p_app
  double sqrt_app = 0.0;            // <sqrt(rho_0 + 1/V)>_app
  double sqrt_fd = 0.0;             // <sqrt(rho_0 + 1/V)>_fd
  double jensen_sqrt_fd = 0.0;      // sqrt(<rho_0>_fd + 1/V)
  double eta_fd = 0.0;              // <a_0 / sqrt(V)>_fd
  double shell_fd = 0.0;
  double shell_app = 0.0;
  // 0 <= 2 nu sqrt_app <= delta_p <= nu (2 jensen_sqrt_fd - 2 eta_fd)
  double chain_lower = 0.0;
  double chain_upper = 0.0;
  bool chain_nonnegative = false;
  bool chain_lower_holds = false;
  bool chain_upper_holds = false;
  bool chain_passed = false;
  // Bogoliubov sandwich with Ha = H^{FD,app}, Hb = H^{FD}:
  // -c nu <sqrt(rho_0 + 1/V)>_app <= delta_p <= nu (2 eta_fd - c sqrt_fd)
  InequalityReport bogoliubov;
};

// One row per truncation. Tolerance applies to every inequality.
std::vector<SandwichRow> verify_theorem3_sandwich(const DiagonalModel& model,
                                                  const std::vector<FockTruncation>& ladder,
                                                  double beta, double nu,
                                                  double coefficient = kDefaultSourceCoefficient,
                                                  double tol = 1e-9);

// Raises every cutoff by one until the shell weight under build(trunc) is
// below shell_tol; ResourceError past max_cutoff.
FockTruncation select_fock_cutoffs(FockTruncation trunc,
                                   const std::function<OperatorMatrix(const FockTruncation&,
                                                                      const ConfigList&)>& build,
                                   double beta, double shell_tol = 1e-8, int max_cutoff = 400);

}  // namespace bose
