#include "bose/cli.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "bose/equivalence.hpp"
#include "bose/errors.hpp"
#include "bose/fockdiag.hpp"
#include "bose/nonlinear_model.hpp"
#include "bose/source_model.hpp"

namespace bose::cli {

namespace {

using Clock = std::chrono::steady_clock;

struct HelpRequested {
  std::string text;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void stamp(std::vector<ReportRow>& rows, Clock::time_point t0) {
  const double d = seconds_since(t0);
  for (auto& r : rows) r.duration_s = d;
}

ReportRow base_row(const RunConfig& c) {
  ReportRow r;
  r.set("command", c.command)
      .set("beta", c.beta)
      .set("mu", c.mu)
      .set("nu", c.nu)
      .set("dim", std::int64_t{c.dim});
  return r;
}

std::shared_ptr<const ModeLattice> lattice_from(const RunConfig& c, double side) {
  const double p_max = c.pmax > 0.0 ? c.pmax : select_cutoff(c.beta, c.mu, c.dim, side, c.tail_tol);
  return std::make_shared<const ModeLattice>(build_lattice(c.dim, side, p_max));
}

std::vector<ReportRow> run_pressure(const RunConfig& c) {
  const auto lat = lattice_from(c, c.side);
  const ThermoPoint pt{c.beta, c.mu, c.nu, c.phi, lat};
  const auto id = pressure_source(pt);
  const auto series = zero_mode_pressure_series(pt, c.rel_tol, c.coefficient);
  const auto app = pressure_app(pt, c.rel_tol, c.coefficient);
  const auto rc = critical_density_finite(pt);
  const auto qa = quasiaverage(pt);
  const double p_free = pressure_ideal_limit(c.beta, c.mu, c.dim);

  ReportRow r = base_row(c);
  r.set("phi", c.phi)
      .set("side", c.side)
      .set("volume", lat->volume)
      .set("p_max", lat->p_max)
      .set("modes", static_cast<std::int64_t>(lat->size()))
      .set("p_id_zero", id.zero_mode)
      .set("p_id_primed", id.primed)
      .set("p_id_constant", id.constant)
      .set("p_id", id.total)
      .set("p_app_zero", app.zero_mode)
      .set("p_app", app.total)
      .set("cutoff_bound", id.truncation_bound)
      .set("series_terms", static_cast<std::int64_t>(series.terms_used))
      .set("series_tail_bound", series.tail_bound)
      .set("delta_p", (id.zero_mode - app.zero_mode) + id.constant + (id.primed - app.primed))
      .set("p_id_limit", -c.nu * c.nu / c.mu + p_free)
      .set("p_app_limit", pressure_app_limit(c.beta, c.mu, c.nu, c.dim, c.coefficient))
      .set("rho_c", rc.value)
      .set("rho_c_bound", rc.bound)
      .set("eta_re", qa.eta.real())
      .set("eta_im", qa.eta.imag())
      .set("rho0_source", condensate_density_source(c.mu, c.nu))
      .set("passed", std::isfinite(id.total) && std::isfinite(app.total));
  return {r};
}

std::vector<ReportRow> run_equivalence(const RunConfig& c) {
  Theorem2Options opt;
  opt.rel_tol = c.rel_tol;
  opt.tail_tol = c.tail_tol;
  opt.rate_threshold = c.rate_threshold;
  opt.griffiths.step = c.fd_step;
  const auto rep = verify_theorem2(c.beta, c.mu, c.nu, c.dim, c.ladder, opt);
  const double rho0_limit = condensate_app_limit(c.beta, c.mu, c.nu, c.dim);
  std::vector<ReportRow> rows;
  for (const auto& g : rep.rungs) {
    ReportRow r = base_row(c);
    r.set("side", g.side)
        .set("volume", g.volume)
        .set("p_max", g.p_max)
        .set("modes", static_cast<std::int64_t>(g.modes))
        .set("p_id", g.source.total)
        .set("p_app", g.app.total)
        .set("cutoff_bound", g.source.truncation_bound)
        .set("delta_p", g.delta)
        .set("fitted_rate", rep.ladder.fitted_rate.value_or(0.0))
        .set("fit_residual", rep.ladder.fit_residual)
        .set("rho_id", rep.density_source.rho_total)
        .set("rho_app", rep.density_app.rho_total)
        .set("rho_c", rep.density_source.rho_c)
        .set("rho0_id", rep.density_source.rho_0)
        .set("rho0_app", rep.density_app.rho_0)
        .set("rho0_limit", rho0_limit)
        .set("condensate_gap", rep.condensate_gap)
        .set("condensate_bound", rep.condensate_bound)
        .set("rate_passed", rep.rate_passed)
        .set("condensate_passed", rep.condensate_passed)
        .set("passed", rep.passed);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<double> sides_of(const RunConfig& c) {
  return c.ladder.empty() ? std::vector<double>{c.side} : c.ladder;
}

std::vector<ReportRow> run_laplace(const RunConfig& c) {
  std::vector<ReportRow> rows;
  for (double l : sides_of(c)) {
    const double vol = std::pow(l, c.dim);
    const ExponentFunction f{c.mu, c.nu, vol, 0.0, c.coefficient};
    const auto s = zero_mode_pressure_series(c.beta, c.mu, c.nu, vol, c.rel_tol, c.coefficient);
    const double gap_bound = std::log(static_cast<double>(s.terms_used)) / (c.beta * vol);
    ReportRow r = base_row(c);
    r.set("side", l)
        .set("volume", vol)
        .set("maximizer", exponent_maximizer(f))
        .set("sup_value", laplace_sup(f))
        .set("sup_limit", -std::pow(0.5 * c.coefficient * c.nu, 2) / c.mu)
        .set("numeric_log_sum", s.numeric_log_sum)
        .set("gap", s.gap)
        .set("gap_bound", gap_bound)
        .set("terms", static_cast<std::int64_t>(s.terms_used))
        .set("tail_bound", s.tail_bound)
        .set("passed", s.gap <= gap_bound);
    rows.push_back(std::move(r));
  }
  return rows;
}

FockTruncation fock_truncation(const RunConfig& c, double side) {
  const std::size_t m = c.fock_cutoffs.size();
  const double dp = 2.0 * std::numbers::pi / side;
  for (double r = 1.0;; r *= 2.0) {
    const auto lat = build_lattice(c.dim, side, dp * r);
    if (lat.size() >= m) return make_truncation(lat, m, c.fock_cutoffs);
  }
}

std::vector<ReportRow> run_fulldiag(const RunConfig& c) {
  std::vector<FockTruncation> ladder;
  for (double l : sides_of(c)) ladder.push_back(fock_truncation(c, l));
  const DiagonalModel model{c.coupling, {}, c.mu};
  const auto out = verify_theorem3_sandwich(model, ladder, c.beta, c.nu, c.coefficient, c.bound_tol);
  std::vector<ReportRow> rows;
  const auto sides = sides_of(c);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& s = out[i];
    const auto configs = enumerate_configs(ladder[i]);
    const auto q = quasiaverage_fd(add_linear_source(model, ladder[i], configs, c.nu), ladder[i],
                                   configs, c.beta);
    ReportRow r = base_row(c);
    r.set("coupling", c.coupling)
        .set("side", sides[i])
        .set("volume", s.volume)
        .set("modes", static_cast<std::int64_t>(ladder[i].modes()))
        .set("fock_dimension", static_cast<std::int64_t>(s.dimension))
        .set("p_fd", s.p_fd)
        .set("p_app", s.p_app)
        .set("delta_p", s.delta_p)
        .set("sqrt_app", s.sqrt_app)
        .set("sqrt_fd", s.sqrt_fd)
        .set("jensen_sqrt_fd", s.jensen_sqrt_fd)
        .set("eta_fd", s.eta_fd)
        .set("root_density_fd", q.root_density)
        .set("shell_fd", s.shell_fd)
        .set("shell_app", s.shell_app)
        .set("bogoliubov_lower", s.bogoliubov.lower)
        .set("bogoliubov_upper", s.bogoliubov.upper)
        .set("bogoliubov_passed", s.bogoliubov.passed)
        .set("chain_lower", s.chain_lower)
        .set("chain_upper", s.chain_upper)
        .set("chain_nonnegative", s.chain_nonnegative)
        .set("chain_lower_holds", s.chain_lower_holds)
        .set("chain_upper_holds", s.chain_upper_holds)
        .set("passed", s.bogoliubov.passed && s.chain_passed);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<ReportRow> run_single(const RunConfig& c) {
  if (c.command == "pressure") return run_pressure(c);
  if (c.command == "equivalence") return run_equivalence(c);
  if (c.command == "laplace") return run_laplace(c);
  if (c.command == "fulldiag") return run_fulldiag(c);
  throw DomainError("command: unknown command " + c.command);
}

std::vector<ReportRow> run_sweep(const RunConfig& c) {
  const auto betas = c.betas.empty() ? std::vector<double>{c.beta} : c.betas;
  const auto mus = c.mus.empty() ? std::vector<double>{c.mu} : c.mus;
  const auto nus = c.nus.empty() ? std::vector<double>{c.nu} : c.nus;
  std::vector<RunConfig> points;
  for (double b : betas)
    for (double m : mus)
      for (double n : nus) {
        RunConfig p = c;
        p.command = c.target;
        p.beta = b;
        p.mu = m;
        p.nu = n;
        validate(p);
        points.push_back(std::move(p));
      }

  // Each point fills its own slot, so the output order is the grid order no
  // matter how the pool schedules the work.
  std::vector<std::vector<ReportRow>> results(points.size());
  std::vector<std::exception_ptr> errors(points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < points.size();) {
      const auto t0 = Clock::now();
      try {
        results[i] = run_single(points[i]);
        stamp(results[i], t0);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto n_workers = static_cast<std::size_t>(std::max(1, c.workers));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < std::min(n_workers, points.size()); ++w) pool.emplace_back(worker);
    worker();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<ReportRow> rows;
  for (std::size_t i = 0; i < results.size(); ++i)
    for (auto& r : results[i]) {
      ReportRow keyed;
      keyed.set("point", static_cast<std::int64_t>(i));
      for (auto& cell : r.cells) keyed.cells.push_back(std::move(cell));
      keyed.duration_s = r.duration_s;
      rows.push_back(std::move(keyed));
    }
  return rows;
}

bool all_passed(const std::vector<ReportRow>& rows) {
  for (const auto& r : rows) {
    const Cell* p = r.find("passed");
    if (p != nullptr && !std::get<bool>(*p)) return false;
  }
  return true;
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw DomainError(key + ": " + what);
}

}  // namespace

std::vector<double> parse_list(const std::string& text, const char* key) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t[]");
    const auto e = item.find_last_not_of(" \t[]");
    if (b == std::string::npos) throw DomainError(std::string(key) + ": empty list entry");
    item = item.substr(b, e - b + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw DomainError(std::string(key) + ": not a number: " + item);
    out.push_back(v);
  }
  return out;
}

RunConfig parse_config(const std::vector<std::string>& args) {
  RunConfig c;
  CLI::App app{"Finite-volume thermodynamics of Bose gases with condensate sources", "bose-limits"};
  app.set_config("--config", "", "flat key=value file; flags take precedence");
  std::string ladder, cutoffs, betas, mus, nus;
  app.add_option("--command", c.command, "pressure|equivalence|laplace|fulldiag|sweep");
  app.add_option("--beta", c.beta);
  app.add_option("--mu", c.mu);
  app.add_option("--nu", c.nu);
  app.add_option("--phi", c.phi);
  app.add_option("--dim", c.dim);
  app.add_option("--side", c.side);
  app.add_option("--ladder", ladder, "comma-separated sides");
  app.add_option("--pmax", c.pmax);
  app.add_option("--fock-cutoff", cutoffs, "comma-separated per-mode cutoffs, zero mode first");
  app.add_option("--coefficient", c.coefficient);
  app.add_option("--coupling", c.coupling);
  app.add_option("--rel-tol", c.rel_tol);
  app.add_option("--tail-tol", c.tail_tol);
  app.add_option("--fd-step", c.fd_step);
  app.add_option("--rate-threshold", c.rate_threshold);
  app.add_option("--bound-tol", c.bound_tol);
  app.add_option("--target", c.target);
  app.add_option("--betas", betas);
  app.add_option("--mus", mus);
  app.add_option("--nus", nus);
  app.add_option("--workers", c.workers);
  app.add_option("--out", c.out);
  app.add_option("--format", c.format);

  std::vector<const char*> argv{"bose-limits"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested{app.help()};
  } catch (const CLI::ParseError& e) {
    throw DomainError(std::string("arguments: ") + e.what());
  }

  if (!ladder.empty()) c.ladder = parse_list(ladder, "ladder");
  if (!betas.empty()) c.betas = parse_list(betas, "betas");
  if (!mus.empty()) c.mus = parse_list(mus, "mus");
  if (!nus.empty()) c.nus = parse_list(nus, "nus");
  if (!cutoffs.empty()) {
    c.fock_cutoffs.clear();
    for (double x : parse_list(cutoffs, "fock-cutoff")) {
      require(x >= 0.0 && x == std::floor(x) && x < 1e6, "fock-cutoff", "must be nonnegative integers");
      c.fock_cutoffs.push_back(static_cast<int>(x));
    }
  }
  validate(c);
  return c;
}

void validate(const RunConfig& c) {
  const std::string cmds[] = {"pressure", "equivalence", "laplace", "fulldiag", "sweep"};
  require(!c.command.empty(), "command", "--command is required");
  require(std::find(std::begin(cmds), std::end(cmds), c.command) != std::end(cmds), "command",
          "unknown command " + c.command);
  if (c.command == "sweep") {
    require(c.target != "sweep" &&
                std::find(std::begin(cmds), std::end(cmds), c.target) != std::end(cmds),
            "target", "must name a non-sweep command");
    require(c.workers >= 1, "workers", "must be >= 1");
    for (double m : c.mus) require(m < 0.0, "mus", "outside stability domain (mu must be < 0)");
    for (double b : c.betas) require(b > 0.0, "betas", "must be > 0");
    for (double n : c.nus) require(n >= 0.0, "nus", "must be >= 0");
    if (!c.mus.empty()) {
      RunConfig probe = c;
      probe.mu = c.mus.front();
      probe.command = c.target;
      validate(probe);
      return;
    }
  }
  require(!std::isnan(c.mu), "mu", "--mu is required");
  require(c.mu < 0.0, "mu", "outside stability domain (mu must be < 0)");
  require(c.beta > 0.0, "beta", "must be > 0");
  require(c.nu >= 0.0, "nu", "must be >= 0");
  require(c.dim >= 1 && c.dim <= 8, "dim", "must be in 1..8");
  require(c.side > 0.0, "side", "must be > 0");
  require(c.pmax >= 0.0, "pmax", "must be >= 0");
  require(c.coefficient > 0.0, "coefficient", "must be > 0");
  require(c.coupling >= 0.0, "coupling", "must be >= 0");
  require(c.rel_tol > 0.0, "rel-tol", "must be > 0");
  require(c.tail_tol > 0.0, "tail-tol", "must be > 0");
  require(c.fd_step >= 0.0, "fd-step", "must be >= 0");
  require(c.bound_tol > 0.0, "bound-tol", "must be > 0");
  require(c.format == "csv" || c.format == "json", "format", "must be csv or json");
  require(!c.fock_cutoffs.empty(), "fock-cutoff", "needs at least the zero mode");
  for (double l : c.ladder) require(l > 0.0, "ladder", "sides must be > 0");
  if (c.command == "equivalence") require(!c.ladder.empty(), "ladder", "required for equivalence");
}

RunResult run(const RunConfig& c) {
  const auto t0 = Clock::now();
  RunResult res;
  if (c.command == "sweep") {
    res.rows = run_sweep(c);
  } else {
    res.rows = run_single(c);
    stamp(res.rows, t0);
  }
  res.code = all_passed(res.rows) ? ExitCode::ok : ExitCode::checks_failed;
  return res;
}

void write_rows(const RunConfig& c, const std::vector<ReportRow>& rows, std::ostream& out) {
  if (c.format == "json")
    emit_json(rows, out);
  else
    emit_csv(rows, out);
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  auto fail = [&](ExitCode code, const char* kind, const std::string& msg) {
    nlohmann::json rec{{"error", kind}, {"message", msg}, {"exit_code", static_cast<int>(code)}};
    err << rec.dump() << '\n';
    return static_cast<int>(code);
  };
  try {
    const auto cfg = parse_config(args);
    const auto res = run(cfg);
    if (cfg.out.empty()) {
      write_rows(cfg, res.rows, out);
    } else {
      std::ofstream f(cfg.out, std::ios::binary);
      if (!f) throw std::runtime_error("out: cannot open " + cfg.out);
      write_rows(cfg, res.rows, f);
    }
    return static_cast<int>(res.code);
  } catch (const HelpRequested& h) {
    out << h.text;
    return 0;
  } catch (const DomainError& e) {
    return fail(ExitCode::invalid_input, "invalid_input", e.what());
  } catch (const ConvergenceError& e) {
    return fail(ExitCode::not_converged, "not_converged", e.what());
  } catch (const ResourceError& e) {
    return fail(ExitCode::not_converged, "resource_limit", e.what());
  } catch (const std::exception& e) {
    return fail(ExitCode::not_converged, "runtime", e.what());
  }
}

}  // namespace bose::cli
