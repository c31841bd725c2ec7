// Acceptance runner. One PASS/FAIL line per criterion; every tolerance and
// runtime budget is pinned below. Usage: acceptance [--criterion N] [--csv PATH]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/special_functions/zeta.hpp>

#include "bose/cli.hpp"
#include "bose/equivalence.hpp"
#include "bose/errors.hpp"
#include "bose/fockdiag.hpp"
#include "bose/nonlinear_model.hpp"
#include "bose/report.hpp"
#include "bose/source_model.hpp"

using namespace bose;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
  std::vector<ReportRow> rows;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

ReportRow row(int criterion, const std::string& what) {
  ReportRow r;
  r.set("criterion", std::int64_t{criterion}).set("check", what);
  return r;
}

// Shared by the Fock-space criteria.
const std::vector<double> kGridBeta{0.5, 0.75, 1.0, 1.5, 2.0};
const std::vector<double> kGridMu{-2.0, -1.0, -0.5, -0.25, -0.1};
const std::vector<double> kGridNu{0.05, 0.1, 0.3};

struct Shape {
  double side;
  std::vector<int> cutoffs;
};
const std::vector<Shape> kMeanFieldShapes{{1.0, {20}}, {2.0, {20, 6}}, {3.0, {12, 4, 4}}};

FockTruncation truncation(double side, std::vector<int> cutoffs) {
  const double dp = 2.0 * std::numbers::pi / side;
  for (double r = 1.0;; r *= 2.0) {
    const auto lat = build_lattice(3, side, dp * r);
    if (lat.size() >= cutoffs.size()) return make_truncation(lat, cutoffs.size(), cutoffs);
  }
}

// 1. Laplace constant.
Outcome criterion1() {
  constexpr double kSupTol = 1e-6;
  const double mu = -0.5, nu = 0.1, beta = 1.0, expected = 0.02;
  Outcome o;
  const double sup = laplace_sup({mu, nu, 1e6});
  bool ok = std::abs(sup - expected) < kSupTol;
  o.rows.push_back(row(1, "sup_1e6").set("value", sup).set("expected", expected));
  double worst = 0.0;
  for (double vol : {1e2, 1e3, 1e4}) {
    const auto s = zero_mode_pressure_series(beta, mu, nu, vol);
    const double bound = std::log(static_cast<double>(s.terms_used)) / (beta * vol);
    ok = ok && s.gap <= bound;
    worst = std::max(worst, s.gap / bound);
    o.rows.push_back(row(1, "series_gap").set("volume", vol).set("value", s.gap).set("expected", bound));
  }
  o.passed = ok;
  o.detail = fmt("|sup-0.02|=%.3g at V=1e6, max gap/bound=%.3g", std::abs(sup - expected), worst);
  return o;
}

// 2. Finite-volume identity at random points.
Outcome criterion2() {
  constexpr double kRelTol = 1e-12;
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> ub(0.5, 2.0), um(-2.0, -0.1), un(0.0, 0.5);
  Outcome o;
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double beta = ub(rng), mu = um(rng), nu = un(rng);
    ThermoPoint pt{beta, mu, nu, 0.0, lattice_for(beta, mu, 3, 16.0, 1e-15)};
    const double a = delta_pressure(pt);
    const double b = delta_pressure_zero_modes(pt);
    const double rel = std::abs(a - b) / std::max(std::abs(b), 1e-300);
    worst = std::max(worst, rel);
    o.rows.push_back(row(2, "identity").set("beta", beta).set("mu", mu).set("nu", nu).set("value", a).set(
        "expected", b));
  }
  o.passed = worst <= kRelTol;
  o.detail = fmt("max relative mismatch %.3g over 20 points", worst);
  return o;
}

// 3. Rate of |p_id - p_app| on the ladder.
Outcome criterion3() {
  Outcome o;
  const auto rep = verify_theorem2(1.0, -0.5, 0.1, 3, {8, 16, 32, 64});
  for (const auto& g : rep.rungs)
    o.rows.push_back(row(3, "delta_p").set("side", g.side).set("value", g.delta).set("expected", 0.0));
  const double rate = rep.ladder.fitted_rate.value_or(0.0);
  o.rows.push_back(row(3, "rate").set("value", rate).set("expected", 0.9));
  o.passed = rep.rate_passed;
  o.detail = fmt("fitted rate %.4f (threshold 0.9), residual %.3g; condensate gap %.3g <= %.3g: %s",
                 rate, rep.ladder.fit_residual, rep.condensate_gap, rep.condensate_bound,
                 rep.condensate_passed ? "yes" : "no");
  return o;
}

// 4. Condensate nu^2/mu^2 and its temperature independence.
Outcome criterion4() {
  constexpr double kTol = 1e-5, kSpreadTol = 1e-10;
  const double mu = -0.5, nu = 0.1;
  Outcome o;
  const auto scan = condensate_temperature_scan(mu, nu, 3, {0.5, 1.0, 2.0});
  const double at1 = scan.rho0[1];
  for (std::size_t i = 0; i < scan.betas.size(); ++i)
    o.rows.push_back(row(4, "rho0").set("beta", scan.betas[i]).set("value", scan.rho0[i]).set("expected", 0.04));
  o.passed = std::abs(at1 - 0.04) < kTol && scan.spread < kSpreadTol;
  o.detail = fmt("rho0(beta=1)=%.12g, spread %.3g", at1, scan.spread);
  return o;
}

// 5. Critical density.
Outcome criterion5() {
  constexpr double kTol = 1e-6;
  Outcome o;
  const double limit0 = critical_density_limit(1.0, 0.0, 3);
  const double oracle = boost::math::zeta(1.5) / std::pow(2.0 * std::numbers::pi, 1.5);
  bool ok = std::abs(limit0 - oracle) < kTol && std::abs(limit0 - 0.165869) < kTol;
  o.rows.push_back(row(5, "rho_c_mu0").set("value", limit0).set("expected", oracle));

  const double mu = -1e-3;
  const double limit = critical_density_limit(1.0, mu, 3);
  double prev = INFINITY;
  std::string gaps;
  for (double l : {8.0, 16.0, 32.0, 64.0}) {
    ThermoPoint pt{1.0, mu, 0.0, 0.0, lattice_for(1.0, mu, 3, l, 1e-12)};
    const auto r = critical_density_finite(pt, 1e-12);
    const double gap = std::abs(r.value - limit);
    ok = ok && gap < prev;
    prev = gap;
    gaps += fmt(" %.3g", gap);
    o.rows.push_back(row(5, "rho_c_finite").set("side", l).set("value", r.value).set("expected", limit));
  }
  o.passed = ok;
  o.detail = fmt("rho_c(mu=0)=%.9f vs %.9f; gaps to limit at mu=-1e-3:", limit0, oracle) + gaps;
  return o;
}

// 6. mu_l asymptotics.
Outcome criterion6() {
  constexpr double kRateTol = 0.05, kResidualTol = 1e-12;
  const double beta = 1.0, rho0 = 0.04, nu = 0.1;
  const double mu_s = mu_star(rho0, nu);
  Outcome o;
  ConvergenceLadder ladder;
  ladder.dim = 1;
  ladder.limit_ref = mu_s;
  double worst_res = 0.0;
  for (double vol : {1e3, 1e4, 1e5, 1e6}) {
    const double m = solve_mu_finite(beta, vol, rho0, nu);
    const double bv = beta * vol;
    const double scale = std::max(bv * rho0 * m * m, bv * nu * nu);
    worst_res = std::max(worst_res, std::abs(bv * rho0 * m * m + m - bv * nu * nu) / scale);
    ladder.sides.push_back(vol);
    ladder.values.push_back(m);
    o.rows.push_back(row(6, "mu_l").set("volume", vol).set("value", m).set("expected", mu_s));
  }
  const auto fit = fit_rate(ladder);
  o.passed = std::abs(fit.rate - 1.0) < kRateTol && worst_res < kResidualTol && mu_s == -0.5;
  o.detail = fmt("mu*=%.6g, rate %.6f, max relative residual %.3g", mu_s, fit.rate, worst_res);
  return o;
}

struct GridPoint {
  double beta, mu, nu;
  std::size_t shape;
  SandwichRow s;
};

std::vector<GridPoint> mean_field_grid() {
  std::vector<GridPoint> out;
  const DiagonalModel base{1.0, {}, 0.0};
  for (std::size_t k = 0; k < kMeanFieldShapes.size(); ++k) {
    const auto t = truncation(kMeanFieldShapes[k].side, kMeanFieldShapes[k].cutoffs);
    for (double b : kGridBeta)
      for (double m : kGridMu)
        for (double n : kGridNu) {
          DiagonalModel model = base;
          model.mu = m;
          out.push_back({b, m, n, k, verify_theorem3_sandwich(model, {t}, b, n).front()});
        }
  }
  return out;
}

// 7. Bogoliubov sandwich on the mean-field grid.
Outcome criterion7() {
  constexpr double kMargin = -1e-9;
  Outcome o;
  int bad = 0;
  double worst = INFINITY;
  const auto grid = mean_field_grid();
  for (const auto& g : grid) {
    const double m = std::min(g.s.bogoliubov.lower_margin, g.s.bogoliubov.upper_margin);
    worst = std::min(worst, m);
    if (m < kMargin) ++bad;
    o.rows.push_back(row(7, "margin")
                         .set("beta", g.beta)
                         .set("mu", g.mu)
                         .set("nu", g.nu)
                         .set("volume", g.s.volume)
                         .set("value", m)
                         .set("expected", 0.0));
  }
  o.passed = bad == 0;
  o.detail = fmt("%zu evaluations, %d violations, smallest margin %.3g", grid.size(), bad, worst);
  return o;
}

// 8. Two-sided chain at every grid point, and shrinking |delta_p| in V.
Outcome criterion8() {
  Outcome o;
  int chain_bad = 0, nonneg_bad = 0, lower_bad = 0, upper_bad = 0, corrected_bad = 0;
  const auto grid = mean_field_grid();
  for (const auto& g : grid) {
    chain_bad += !g.s.chain_passed;
    nonneg_bad += !g.s.chain_nonnegative;
    lower_bad += !g.s.chain_lower_holds;
    upper_bad += !g.s.chain_upper_holds;
    corrected_bad += !g.s.bogoliubov.passed;
    o.rows.push_back(row(8, "chain")
                         .set("beta", g.beta)
                         .set("mu", g.mu)
                         .set("nu", g.nu)
                         .set("volume", g.s.volume)
                         .set("value", g.s.delta_p)
                         .set("expected", g.s.chain_lower));
  }

  const DiagonalModel model{1.0, {}, -0.5};
  std::vector<FockTruncation> ladder;
  for (double l : {1.0, 2.0, 3.0}) ladder.push_back(truncation(l, {20, 4}));
  const auto rows = verify_theorem3_sandwich(model, ladder, 1.0, 0.1);
  bool shrinking = true;
  std::string trend;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0) shrinking = shrinking && std::abs(rows[i].delta_p) < std::abs(rows[i - 1].delta_p);
    trend += fmt(" %.4g", rows[i].delta_p);
    o.rows.push_back(row(8, "trend").set("volume", rows[i].volume).set("value", rows[i].delta_p).set("expected", 0.0));
  }

  o.passed = chain_bad == 0 && shrinking;
  o.detail = fmt("chain fails at %d/%zu points (0<=lower: %d, lower<=dp: %d, dp<=upper: %d); "
                 "Bogoliubov form fails at %d; delta_p over V=1,8,27:",
                 chain_bad, grid.size(), nonneg_bad, lower_bad, upper_bad, corrected_bad) +
             trend + (shrinking ? " (shrinking)" : " (not shrinking)");
  return o;
}

// 9. Fock-space eigendecomposition against the closed forms.
Outcome criterion9() {
  constexpr double kLinearTol = 1e-8, kSqrtTol = 1e-12;
  constexpr int kCutoff = 200;
  Outcome o;
  const auto t = truncation(1.0, {kCutoff});
  const auto configs = enumerate_configs(t);
  double worst_lin = 0.0, worst_sqrt = 0.0;
  for (auto [beta, mu, nu] : {std::tuple{1.0, -0.5, 0.1}, {0.5, -1.0, 0.5}, {2.0, -0.2, 0.05}}) {
    const DiagonalModel model{0.0, {}, mu};
    const double lin = gibbs_trace(add_linear_source(model, t, configs, nu), beta, t.volume);
    const double closed = -std::log(-std::expm1(beta * mu)) / (beta * t.volume) - nu * nu / mu;
    const double sq = gibbs_trace(add_sqrt_source(model, t, configs, nu), beta, t.volume);
    const double series = zero_mode_pressure_truncated(beta, mu, nu, t.volume, kCutoff);
    worst_lin = std::max(worst_lin, std::abs(lin - closed));
    worst_sqrt = std::max(worst_sqrt, std::abs(sq - series));
    o.rows.push_back(row(9, "linear").set("beta", beta).set("mu", mu).set("nu", nu).set("value", lin).set("expected", closed));
    o.rows.push_back(row(9, "sqrt").set("beta", beta).set("mu", mu).set("nu", nu).set("value", sq).set("expected", series));
  }
  o.passed = worst_lin < kLinearTol && worst_sqrt < kSqrtTol;
  o.detail = fmt("linear source max error %.3g, square-root source max error %.3g", worst_lin, worst_sqrt);
  return o;
}

// 10. Selection rule and sign of the quasi-average.
Outcome criterion10() {
  Outcome o;
  int nonzero = 0, negative = 0, checked = 0;
  for (const auto& shape : kMeanFieldShapes) {
    const auto t = truncation(shape.side, shape.cutoffs);
    const auto configs = enumerate_configs(t);
    const auto field = zero_mode_field(t, configs);
    for (double b : kGridBeta)
      for (double m : kGridMu)
        for (double n : kGridNu) {
          const DiagonalModel model{1.0, {}, m};
          for (const auto& h : {diagonal_operator(diagonal_energies(model, t, configs), t),
                                add_sqrt_source(model, t, configs, n)}) {
            const double a0 = gibbs_expectation(field, gibbs_state(h, b, t.volume));
            nonzero += a0 != 0.0;
            ++checked;
          }
          const auto q = quasiaverage_fd(add_linear_source(model, t, configs, n), t, configs, b);
          negative += q.eta < 0.0 || q.root_density < 0.0;
          o.rows.push_back(row(10, "eta").set("beta", b).set("mu", m).set("nu", n).set("volume", t.volume)
                               .set("value", q.eta).set("expected", q.root_density));
        }
  }
  o.passed = nonzero == 0 && negative == 0;
  o.detail = fmt("<a0> nonzero in %d/%d diagonal states; negative quasi-averages: %d", nonzero, checked, negative);
  return o;
}

// Every criterion reports into one fixed column set.
std::vector<ReportRow> normalize(const std::vector<ReportRow>& in, double duration) {
  std::vector<ReportRow> out;
  for (const auto& r : in) {
    ReportRow fixed;
    for (const char* k : {"criterion", "check"}) fixed.set(k, *r.find(k));
    for (const char* k : {"beta", "mu", "nu", "side", "volume", "value", "expected"}) {
      const Cell* v = r.find(k);
      fixed.set(k, v ? *v : Cell{std::string()});
    }
    fixed.duration_s = duration;
    out.push_back(std::move(fixed));
  }
  return out;
}

std::string csv_without_duration(const std::vector<ReportRow>& rows) {
  std::ostringstream os;
  emit_csv(rows, os, false);
  return os.str();
}

std::vector<ReportRow> sweep_rows(int workers) {
  std::vector<ReportRow> all;
  const auto add = [&](std::vector<std::string> args) {
    args.push_back("--workers");
    args.push_back(std::to_string(workers));
    auto res = cli::run(cli::parse_config(args));
    for (auto& r : res.rows) all.push_back(std::move(r));
  };
  // Different targets have different columns; keep them in separate tables.
  std::vector<ReportRow> out;
  auto flush = [&](const std::string& tag) {
    ReportRow r = row(11, tag);
    r.set("value", csv_without_duration(all));
    out.push_back(std::move(r));
    all.clear();
  };
  add({"--command", "sweep", "--target", "fulldiag", "--betas", "0.5,1,2", "--mus", "-1,-0.5,-0.1",
       "--nus", "0.05,0.3", "--ladder", "1,2", "--fock-cutoff", "12,4"});
  flush("sweep_fulldiag");
  add({"--command", "sweep", "--target", "pressure", "--betas", "0.5,1", "--mus", "-1,-0.5", "--nus",
       "0,0.2", "--side", "8"});
  flush("sweep_pressure");
  add({"--command", "sweep", "--target", "laplace", "--betas", "1,2", "--mus", "-0.5", "--nus",
       "0.1,0.4", "--ladder", "4,8,16"});
  flush("sweep_laplace");
  return out;
}

// 11. Byte-identical CSV across runs and worker counts.
Outcome criterion11() {
  Outcome o;
  const std::vector<std::function<Outcome()>> cheap{criterion1, criterion2, criterion4, criterion5,
                                                    criterion6, criterion9, criterion10};
  std::string first, second;
  for (const auto& c : cheap) first += csv_without_duration(normalize(c().rows, 0.0));
  for (const auto& c : cheap) second += csv_without_duration(normalize(c().rows, 0.0));
  const bool reruns_equal = first == second;

  const auto serial = csv_without_duration(sweep_rows(1));
  const auto parallel = csv_without_duration(sweep_rows(4));
  const auto parallel2 = csv_without_duration(sweep_rows(3));
  const bool workers_equal = serial == parallel && parallel == parallel2;

  o.passed = reruns_equal && workers_equal;
  o.rows.push_back(row(11, "reruns").set("value", std::int64_t{reruns_equal}).set("expected", std::int64_t{1}));
  o.rows.push_back(row(11, "workers").set("value", std::int64_t{workers_equal}).set("expected", std::int64_t{1}));
  o.detail = fmt("repeat runs identical: %s (%zu bytes); sweeps with 1/4/3 workers identical: %s (%zu bytes)",
                 reruns_equal ? "yes" : "no", first.size(), workers_equal ? "yes" : "no", serial.size());
  return o;
}

struct Criterion {
  int id;
  double budget_s;
  Outcome (*run)();
};

const Criterion kCriteria[] = {
    {1, 10.0, criterion1},  {2, 30.0, criterion2},  {3, 120.0, criterion3}, {4, 60.0, criterion4},
    {5, 60.0, criterion5},  {6, 1.0, criterion6},   {7, 300.0, criterion7}, {8, 600.0, criterion8},
    {9, 30.0, criterion9},  {10, 60.0, criterion10}, {11, 600.0, criterion11},
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  std::string csv_path;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--criterion" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else if (a == "--csv" && i + 1 < argc) {
      csv_path = argv[++i];
    } else {
      std::cerr << "usage: acceptance [--criterion N] [--csv PATH]\n";
      return 2;
    }
  }
  if (only < 0 || only > 11) {
    std::cerr << "criterion must be 1..11\n";
    return 2;
  }

  bool all = true;
  std::vector<ReportRow> rows;
  for (const auto& c : kCriteria) {
    if (only != 0 && c.id != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.passed = false;
      o.detail = std::string("error: ") + e.what();
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_budget = dt < c.budget_s;
    const bool ok = o.passed && in_budget;
    all = all && ok;
    std::cout << "criterion " << c.id << ": " << (ok ? "PASS" : "FAIL") << "  " << o.detail
              << fmt("  [%.2fs, budget %.0fs%s]", dt, c.budget_s, in_budget ? "" : " EXCEEDED") << '\n';
    for (auto& r : normalize(o.rows, dt)) rows.push_back(std::move(r));
  }
  if (!csv_path.empty()) {
    std::ofstream f(csv_path, std::ios::binary);
    emit_csv(rows, f);
  }
  return all ? 0 : 1;
}
