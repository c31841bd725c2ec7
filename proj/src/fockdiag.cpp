#include "bose/fockdiag.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "bose/errors.hpp"
#include "bose/kernels.hpp"
#include "bose/summation.hpp"

namespace bose {

std::size_t max_fock_dimension() {
  const char* env = std::getenv("BOSE_LIMITS_MAX_DIM");
  if (env == nullptr || *env == '\0') return kDefaultMaxFockDimension;
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (errno != 0 || end == env || *end != '\0' || v < 2)
    throw DomainError(std::string("BOSE_LIMITS_MAX_DIM: not a dimension >= 2: ") + env);
  return static_cast<std::size_t>(v);
}

std::size_t FockTruncation::dimension() const {
  std::size_t d = 1;
  for (int c : cutoffs) {
    const auto r = static_cast<std::size_t>(c) + 1;
    if (d > std::numeric_limits<std::size_t>::max() / r) return std::numeric_limits<std::size_t>::max();
    d *= r;
  }
  return d;
}

void validate(const FockTruncation& trunc) {
  if (trunc.energies.empty()) throw DomainError("FockTruncation: no modes");
  if (trunc.energies.size() != trunc.cutoffs.size())
    throw DomainError("FockTruncation: energies and cutoffs differ in length");
  if (trunc.energies[0] != 0.0) throw DomainError("FockTruncation: first mode must be the zero mode");
  for (double e : trunc.energies)
    if (!(e >= 0.0) || !std::isfinite(e)) throw DomainError("FockTruncation: mode energy must be >= 0");
  for (int c : trunc.cutoffs)
    if (c < 0) throw DomainError("FockTruncation: cutoff must be >= 0");
  require_positive(trunc.volume, "volume", "FockTruncation");
  const auto dim = trunc.dimension();
  if (dim < 2) throw DomainError("FockTruncation: dimension must be >= 2");
  const auto ceiling = max_fock_dimension();
  if (dim > ceiling)
    throw ResourceError("FockTruncation: dimension " + std::to_string(dim) + " exceeds ceiling " +
                        std::to_string(ceiling));
}

FockTruncation make_truncation(const ModeLattice& lattice, std::size_t n_modes,
                               std::vector<int> cutoffs) {
  if (!lattice.includes_zero) throw DomainError("make_truncation: lattice lacks the zero mode");
  if (n_modes == 0 || n_modes > lattice.size())
    throw DomainError("make_truncation: mode count out of range");
  FockTruncation t;
  t.energies.assign(lattice.energies.begin(), lattice.energies.begin() + static_cast<long>(n_modes));
  t.cutoffs = std::move(cutoffs);
  t.volume = lattice.volume;
  validate(t);
  return t;
}

ConfigList enumerate_configs(const FockTruncation& trunc) {
  validate(trunc);
  const std::size_t m = trunc.modes();
  const std::size_t dim = trunc.dimension();
  ConfigList out;
  out.modes = m;
  out.occupations.resize(dim * m);
  out.total.resize(dim);
  out.nonzero.resize(dim);
  std::vector<int> w(m, 0);
  for (std::size_t j = 0; j < dim; ++j) {
    long n = 0;
    for (std::size_t k = 0; k < m; ++k) {
      out.occupations[j * m + k] = w[k];
      n += w[k];
    }
    out.total[j] = n;
    out.nonzero[j] = n - w[0];
    for (std::size_t k = 0; k < m; ++k) {
      if (++w[k] <= trunc.cutoffs[k]) break;
      w[k] = 0;
    }
  }
  return out;
}

void validate(const DiagonalModel& model, std::size_t modes) {
  if (!(model.a >= 0.0)) throw DomainError("DiagonalModel: a must be >= 0");
  if (!std::isfinite(model.mu)) throw DomainError("DiagonalModel: mu must be finite");
  if (model.v.empty()) return;
  if (model.v.size() != modes * modes) throw DomainError("DiagonalModel: v must be modes x modes");
  for (std::size_t i = 0; i < modes; ++i)
    for (std::size_t k = 0; k < modes; ++k) {
      const double x = model.v[i * modes + k];
      if (!(x >= 0.0)) throw DomainError("DiagonalModel: v must be >= 0");
      if (x != model.v[k * modes + i]) throw DomainError("DiagonalModel: v must be symmetric");
    }
}

std::vector<double> diagonal_energies(const DiagonalModel& model, const FockTruncation& trunc,
                                      const ConfigList& configs) {
  const std::size_t m = trunc.modes();
  validate(model, m);
  if (configs.modes != m) throw DomainError("diagonal_energies: configuration list does not match");
  const double vol = trunc.volume;
  std::vector<double> e(configs.size());
  for (std::size_t j = 0; j < configs.size(); ++j) {
    const auto w = configs.at(j);
    double kin = 0.0;
    for (std::size_t k = 0; k < m; ++k) kin += trunc.energies[k] * w[k];
    const auto n = static_cast<double>(configs.total[j]);
    double pair = 0.0;
    if (!model.v.empty())
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t k = 0; k < m; ++k) pair += model.v[i * m + k] * w[i] * w[k];
    e[j] = kin + model.a / (2.0 * vol) * (n * n - n) + pair / (2.0 * vol) - model.mu * n;
  }
  return e;
}

Eigen::MatrixXd OperatorMatrix::to_dense() const {
  const auto n = static_cast<Eigen::Index>(size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) m(j, j) = diag[static_cast<std::size_t>(j)];
  for (Eigen::Index j = 0; j + 1 < n; ++j) {
    m(j + 1, j) = off[static_cast<std::size_t>(j)];
    m(j, j + 1) = off[static_cast<std::size_t>(j)];
  }
  return m;
}

OperatorMatrix diagonal_operator(std::vector<double> diag, const FockTruncation& trunc) {
  OperatorMatrix op;
  op.block = trunc.zero_block();
  op.off.assign(diag.empty() ? 0 : diag.size() - 1, 0.0);
  op.diag = std::move(diag);
  op.sparsity = Sparsity::diagonal;
  return op;
}

OperatorMatrix zero_mode_field(const FockTruncation& trunc, const ConfigList& configs) {
  auto op = diagonal_operator(std::vector<double>(configs.size(), 0.0), trunc);
  op.sparsity = Sparsity::zero_mode_tridiagonal;
  const std::size_t b = op.block;
  for (std::size_t j = 0; j + 1 < configs.size(); ++j)
    if (j % b != b - 1) op.off[j] = std::sqrt(static_cast<double>(configs.zero_occupation(j)) + 1.0);
  return op;
}

OperatorMatrix add_linear_source(const DiagonalModel& model, const FockTruncation& trunc,
                                 const ConfigList& configs, double nu) {
  if (!(nu >= 0.0)) throw DomainError("add_linear_source: nu must be >= 0");
  auto op = zero_mode_field(trunc, configs);
  op.diag = diagonal_energies(model, trunc, configs);
  const double s = -nu * std::sqrt(trunc.volume);
  for (double& x : op.off) x *= s;
  return op;
}

OperatorMatrix add_sqrt_source(const DiagonalModel& model, const FockTruncation& trunc,
                               const ConfigList& configs, double nu, double coefficient) {
  if (!(nu >= 0.0)) throw DomainError("add_sqrt_source: nu must be >= 0");
  auto e = diagonal_energies(model, trunc, configs);
  const double c = coefficient * nu * std::sqrt(trunc.volume);
  for (std::size_t j = 0; j < e.size(); ++j)
    e[j] -= c * std::sqrt(static_cast<double>(configs.zero_occupation(j)) + 1.0);
  return diagonal_operator(std::move(e), trunc);
}

OperatorMatrix operator-(const OperatorMatrix& x, const OperatorMatrix& y) {
  if (x.size() != y.size() || x.block != y.block)
    throw DomainError("OperatorMatrix: operands live on different truncations");
  OperatorMatrix r = x;
  for (std::size_t j = 0; j < r.diag.size(); ++j) r.diag[j] -= y.diag[j];
  for (std::size_t j = 0; j < r.off.size(); ++j) r.off[j] -= y.off[j];
  r.sparsity = (x.sparsity == Sparsity::diagonal && y.sparsity == Sparsity::diagonal)
                   ? Sparsity::diagonal
                   : Sparsity::zero_mode_tridiagonal;
  return r;
}

namespace {

GibbsState diagonal_state(const OperatorMatrix& op, double beta, double volume) {
  const std::size_t n = op.size();
  std::vector<double> x(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = -beta * op.diag[j];
  const double shift = *std::max_element(x.begin(), x.end());
  GibbsState s;
  s.beta = beta;
  s.volume = volume;
  s.rho_diag.resize(n);
  kernels::active().exp_shifted(x, shift, s.rho_diag);
  const double z = compensated_sum(s.rho_diag);
  for (double& r : s.rho_diag) r /= z;
  s.rho_off.assign(n - 1, 0.0);
  s.log_z = shift + std::log(z);
  return s;
}

using Solver = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>;

void solve_block(Solver& solver, const OperatorMatrix& op, std::size_t start, std::size_t b,
                 bool vectors) {
  Eigen::VectorXd d(static_cast<Eigen::Index>(b));
  Eigen::VectorXd e(static_cast<Eigen::Index>(b > 1 ? b - 1 : 0));
  for (std::size_t i = 0; i < b; ++i) d(static_cast<Eigen::Index>(i)) = op.diag[start + i];
  for (std::size_t i = 0; i + 1 < b; ++i) e(static_cast<Eigen::Index>(i)) = op.off[start + i];
  solver.computeFromTridiagonal(d, e, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw ConvergenceError("gibbs_state: tridiagonal eigensolve failed at block " +
                           std::to_string(start / b));
}

GibbsState tridiagonal_state(const OperatorMatrix& op, double beta, double volume) {
  const std::size_t n = op.size();
  const std::size_t b = op.block;
  if (b == 0 || n % b != 0) throw DomainError("gibbs_state: block size does not divide dimension");
  Solver solver;

  double e_min = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < n; s += b) {
    solve_block(solver, op, s, b, false);
    e_min = std::min(e_min, solver.eigenvalues()(0));
  }

  GibbsState st;
  st.beta = beta;
  st.volume = volume;
  st.rho_diag.assign(n, 0.0);
  st.rho_off.assign(n - 1, 0.0);
  CompensatedSum z;
  for (std::size_t s = 0; s < n; s += b) {
    solve_block(solver, op, s, b, true);
    const auto& ev = solver.eigenvalues();
    const auto& u = solver.eigenvectors();
    for (Eigen::Index k = 0; k < ev.size(); ++k) {
      const double w = std::exp(-beta * (ev(k) - e_min));
      z.add(w);
      for (std::size_t i = 0; i < b; ++i) {
        const double ui = u(static_cast<Eigen::Index>(i), k);
        st.rho_diag[s + i] += w * ui * ui;
        if (i + 1 < b) st.rho_off[s + i] += w * ui * u(static_cast<Eigen::Index>(i + 1), k);
      }
    }
  }
  const double zv = z.value();
  for (double& r : st.rho_diag) r /= zv;
  for (double& r : st.rho_off) r /= zv;
  st.log_z = -beta * e_min + std::log(zv);
  return st;
}

}  // namespace

GibbsState gibbs_state(const OperatorMatrix& op, double beta, double volume) {
  require_positive(beta, "beta", "gibbs_state");
  require_positive(volume, "volume", "gibbs_state");
  if (op.size() == 0) throw DomainError("gibbs_state: empty operator");
  if (op.off.size() + 1 != op.size()) throw DomainError("gibbs_state: malformed operator");
  return op.sparsity == Sparsity::diagonal ? diagonal_state(op, beta, volume)
                                           : tridiagonal_state(op, beta, volume);
}

double gibbs_trace(const OperatorMatrix& op, double beta, double volume) {
  return gibbs_state(op, beta, volume).pressure();
}

double gibbs_expectation(std::span<const double> per_config, const GibbsState& state) {
  if (per_config.size() != state.rho_diag.size())
    throw DomainError("gibbs_expectation: observable does not match the state");
  CompensatedSum s;
  for (std::size_t j = 0; j < per_config.size(); ++j) s.add(per_config[j] * state.rho_diag[j]);
  return s.value();
}

double gibbs_expectation(const OperatorMatrix& x, const GibbsState& state) {
  if (x.size() != state.rho_diag.size())
    throw DomainError("gibbs_expectation: observable does not match the state");
  CompensatedSum s;
  for (std::size_t j = 0; j < x.diag.size(); ++j) s.add(x.diag[j] * state.rho_diag[j]);
  // Exactly zero for a diagonal state: every product below is x * 0.
  for (std::size_t j = 0; j < x.off.size(); ++j) s.add(2.0 * x.off[j] * state.rho_off[j]);
  return s.value();
}

InequalityReport bogoliubov_bounds(const OperatorMatrix& ha, const GibbsState& sa,
                                   const OperatorMatrix& hb, const GibbsState& sb, double tol) {
  const auto dh = ha - hb;
  const double vol = sa.volume;
  InequalityReport r;
  r.lower = gibbs_expectation(dh, sa) / vol;
  r.upper = gibbs_expectation(dh, sb) / vol;
  r.delta_p = sb.pressure() - sa.pressure();
  r.lower_margin = r.delta_p - r.lower;
  r.upper_margin = r.upper - r.delta_p;
  r.passed = r.lower_margin >= -tol && r.upper_margin >= -tol;
  return r;
}

InequalityReport bogoliubov_bounds(const OperatorMatrix& ha, const OperatorMatrix& hb,
                                   double beta, double volume, double tol) {
  return bogoliubov_bounds(ha, gibbs_state(ha, beta, volume), hb, gibbs_state(hb, beta, volume), tol);
}

double jensen_gap(const std::function<double(double)>& f, std::span<const double> x,
                  const GibbsState& state) {
  std::vector<double> fx(x.size());
  std::transform(x.begin(), x.end(), fx.begin(), f);
  return f(gibbs_expectation(x, state)) - gibbs_expectation(fx, state);
}

namespace {

std::vector<double> zero_density(const FockTruncation& trunc, const ConfigList& configs,
                                 double extra) {
  std::vector<double> out(configs.size());
  for (std::size_t j = 0; j < out.size(); ++j)
    out[j] = static_cast<double>(configs.zero_occupation(j)) / trunc.volume + extra;
  return out;
}

}  // namespace

FdQuasiAverage quasiaverage_fd(const OperatorMatrix& h, const FockTruncation& trunc,
                               const ConfigList& configs, double beta) {
  const auto st = gibbs_state(h, beta, trunc.volume);
  const auto field = zero_mode_field(trunc, configs);
  FdQuasiAverage q;
  q.eta = gibbs_expectation(field, st) / (2.0 * std::sqrt(trunc.volume));
  q.root_density = std::sqrt(gibbs_expectation(zero_density(trunc, configs, 0.0), st));
  q.difference = q.eta - q.root_density;
  return q;
}

double shell_weight(const FockTruncation& trunc, const ConfigList& configs,
                    const GibbsState& state) {
  CompensatedSum s;
  for (std::size_t j = 0; j < configs.size(); ++j) {
    const auto w = configs.at(j);
    for (std::size_t k = 0; k < w.size(); ++k)
      if (w[k] == trunc.cutoffs[k]) {
        s.add(state.rho_diag[j]);
        break;
      }
  }
  return s.value();
}

double superstability_slack(const DiagonalModel& model, const FockTruncation& trunc,
                            const ConfigList& configs, std::span<const double> energies) {
  double slack = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < configs.size(); ++j) {
    const auto n = static_cast<double>(configs.total[j]);
    slack = std::min(slack, energies[j] + model.mu * n - model.a / (2.0 * trunc.volume) * (n * n - n));
  }
  return slack;
}

std::vector<SandwichRow> verify_theorem3_sandwich(const DiagonalModel& model,
                                                  const std::vector<FockTruncation>& ladder,
                                                  double beta, double nu, double coefficient,
                                                  double tol) {
  require_positive(beta, "beta", "verify_theorem3_sandwich");
  if (!(nu >= 0.0)) throw DomainError("verify_theorem3_sandwich: nu must be >= 0");
  std::vector<SandwichRow> rows;
  for (const auto& trunc : ladder) {
    const auto configs = enumerate_configs(trunc);
    const auto h_fd = add_linear_source(model, trunc, configs, nu);
    const auto h_app = add_sqrt_source(model, trunc, configs, nu, coefficient);
    const auto s_fd = gibbs_state(h_fd, beta, trunc.volume);
    const auto s_app = gibbs_state(h_app, beta, trunc.volume);
    const double inv_v = 1.0 / trunc.volume;

    auto roots = zero_density(trunc, configs, inv_v);
    for (double& r : roots) r = std::sqrt(r);

    SandwichRow row;
    row.volume = trunc.volume;
    row.dimension = configs.size();
    row.p_fd = s_fd.pressure();
    row.p_app = s_app.pressure();
    row.delta_p = row.p_fd - row.p_app;
    row.sqrt_app = gibbs_expectation(roots, s_app);
    row.sqrt_fd = gibbs_expectation(roots, s_fd);
    row.jensen_sqrt_fd = std::sqrt(gibbs_expectation(zero_density(trunc, configs, 0.0), s_fd) + inv_v);
    row.eta_fd = gibbs_expectation(zero_mode_field(trunc, configs), s_fd) / (2.0 * std::sqrt(trunc.volume));
    row.shell_fd = shell_weight(trunc, configs, s_fd);
    row.shell_app = shell_weight(trunc, configs, s_app);

    row.chain_lower = coefficient * nu * row.sqrt_app;
    row.chain_upper = nu * (coefficient * row.jensen_sqrt_fd - 2.0 * row.eta_fd);
    row.chain_nonnegative = row.chain_lower >= -tol;
    row.chain_lower_holds = row.delta_p - row.chain_lower >= -tol;
    row.chain_upper_holds = row.chain_upper - row.delta_p >= -tol;
    row.chain_passed = row.chain_nonnegative && row.chain_lower_holds && row.chain_upper_holds;
    row.bogoliubov = bogoliubov_bounds(h_app, s_app, h_fd, s_fd, tol);
    rows.push_back(row);
  }
  return rows;
}

FockTruncation select_fock_cutoffs(
    FockTruncation trunc,
    const std::function<OperatorMatrix(const FockTruncation&, const ConfigList&)>& build,
    double beta, double shell_tol, int max_cutoff) {
  for (;;) {
    const auto configs = enumerate_configs(trunc);
    const auto st = gibbs_state(build(trunc, configs), beta, trunc.volume);
    if (shell_weight(trunc, configs, st) < shell_tol) return trunc;
    for (int& c : trunc.cutoffs) {
      if (c >= max_cutoff)
        throw ResourceError("select_fock_cutoffs: shell weight still above tolerance at cutoff " +
                            std::to_string(max_cutoff));
      ++c;
    }
  }
}

}  // namespace bose
