// Acceptance suite: one test case per criterion, each printing a single
// [PASS]/[FAIL] line with the measured evidence. Seed loops run under
// OpenMP; doctest assertions stay outside parallel regions.
#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include <Eigen/Dense>

#include "panelaudit/counterfactual.hpp"
#include "panelaudit/logit.hpp"
#include "panelaudit/ranking.hpp"
#include "panelaudit/regress.hpp"
#include "panelaudit/stats.hpp"
#include "panelaudit/synth.hpp"

using namespace panelaudit;
namespace fs = std::filesystem;

namespace {

void report_line(int num, const char *name, bool ok, const std::string &detail) {
  std::printf("[%s] criterion %d (%s): %s\n", ok ? "PASS" : "FAIL", num, name,
              detail.c_str());
  std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

} // namespace

TEST_CASE("criterion 1: planted recovery of the rating equation") {
  const double b1 = 0.436, b2 = 0.165, b3 = -0.493;
  std::atomic<int> hits{0}, failures{0};
  double max_seconds = 0.0;

#pragma omp parallel for schedule(dynamic) reduction(max : max_seconds)
  for (int seed = 1; seed <= 100; ++seed) {
    try {
      const auto t0 = std::chrono::steady_clock::now();
      SynthConfig cfg; // defaults plant (0.436, 0.165, -0.493), ~7,900 records
      cfg.seed = static_cast<uint64_t>(seed);
      auto result = generate(cfg);
      auto fit = fit_strategic_model(result.panel);
      const int ip = fit.index_of("peer");
      const int iq = fit.index_of("qual");
      const int ii = fit.index_of("peer_x_qual");
      const bool ok = ip >= 0 && iq >= 0 && ii >= 0 &&
                      std::abs(fit.beta(ip) - b1) < 3 * fit.se(ip) &&
                      std::abs(fit.beta(iq) - b2) < 3 * fit.se(iq) &&
                      std::abs(fit.beta(ii) - b3) < 3 * fit.se(ii);
      if (ok) ++hits;
      max_seconds = std::max(max_seconds, seconds_since(t0));
    } catch (...) {
      ++failures;
    }
  }

  const bool ok = hits >= 95 && failures == 0 && max_seconds < 10.0;
  std::ostringstream detail;
  detail << hits << "/100 seeds within 3 clustered SEs, slowest seed "
         << max_seconds << " s";
  report_line(1, "planted recovery", ok, detail.str());
  CHECK(ok);
}

TEST_CASE("criterion 2: pivoted QR matches normal equations") {
  std::mt19937_64 rng(202);
  std::normal_distribution<double> gauss;
  int hits = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int p = 2 + static_cast<int>(rng() % 9);      // 2..10
    const int n = p + 5 + static_cast<int>(rng() % (96 - p)); // <= 100
    Eigen::MatrixXd x(n, p);
    Eigen::VectorXd beta(p), y(n);
    for (int j = 0; j < p; ++j) beta(j) = gauss(rng);
    for (int i = 0; i < n; ++i) {
      x(i, 0) = 1.0;
      for (int j = 1; j < p; ++j) x(i, j) = gauss(rng);
      y(i) = x.row(i).dot(beta) + 0.3 * gauss(rng);
    }
    std::vector<std::string> names;
    for (int j = 0; j < p; ++j) names.push_back("x" + std::to_string(j));
    auto fit = ols_fit(x, y, names);
    const Eigen::VectorXd brute =
        (x.transpose() * x).ldlt().solve(x.transpose() * y);
    const double rel = (fit.beta - brute).lpNorm<Eigen::Infinity>() /
                       std::max(1.0, brute.lpNorm<Eigen::Infinity>());
    worst = std::max(worst, rel);
    if (static_cast<int>(fit.beta.size()) == p && rel <= 1e-8) ++hits;
  }
  const bool ok = hits == 200;
  std::ostringstream detail;
  detail << hits << "/200 systems within 1e-8 relative (worst " << worst << ")";
  report_line(2, "OLS oracle", ok, detail.str());
  CHECK(ok);
}

TEST_CASE("criterion 3: Frisch-Waugh within-demeaning equivalence") {
  SynthConfig cfg;
  cfg.seed = 303;
  cfg.n_departments = 2;
  cfg.employees_per_department = 9;
  cfg.n_years = 3; // 9*9*2*3 = 486 rating records
  auto result = generate(cfg);
  Design d = build_design(result.panel, {});
  auto full = ols_fit(d.x, d.y, d.column_names);

  // partial the ratee dummies out by demeaning within ratee groups;
  // they absorb the intercept and the time-invariant rank/dept dummies
  std::vector<Eigen::Index> keep = {1, 2, 3}; // peer, qual, peer_x_qual
  std::vector<std::string> znames = {"peer", "qual", "peer_x_qual"};
  for (size_t j = 0; j < d.column_names.size(); ++j)
    if (d.column_names[j].rfind("year_", 0) == 0) {
      keep.push_back(static_cast<Eigen::Index>(j));
      znames.push_back(d.column_names[j]);
    }
  Eigen::MatrixXd z(d.x.rows(), static_cast<Eigen::Index>(keep.size()));
  for (size_t k = 0; k < keep.size(); ++k) z.col(k) = d.x.col(keep[k]);
  Eigen::VectorXd yd = d.y;

  std::map<std::string, std::vector<Eigen::Index>> groups;
  for (size_t i = 0; i < d.cluster_ratee.size(); ++i)
    groups[d.cluster_ratee[i]].push_back(static_cast<Eigen::Index>(i));
  for (const auto &[label, rows] : groups) {
    Eigen::RowVectorXd zbar = Eigen::RowVectorXd::Zero(z.cols());
    double ybar = 0.0;
    for (Eigen::Index i : rows) {
      zbar += z.row(i);
      ybar += yd(i);
    }
    zbar /= static_cast<double>(rows.size());
    ybar /= static_cast<double>(rows.size());
    for (Eigen::Index i : rows) {
      z.row(i) -= zbar;
      yd(i) -= ybar;
    }
  }
  auto fw = ols_fit(z, yd, znames);

  double worst = 0.0;
  bool ok = true;
  for (const char *name : {"peer", "qual", "peer_x_qual"}) {
    const int a = full.index_of(name);
    const int b = fw.index_of(name);
    if (a < 0 || b < 0) {
      ok = false;
      continue;
    }
    worst = std::max(worst, std::abs(full.beta(a) - fw.beta(b)));
  }
  ok = ok && worst <= 1e-8;
  std::ostringstream detail;
  detail << "max |dummy - demeaned| coefficient gap " << worst << " on "
         << result.panel.records().size() << " records";
  report_line(3, "fixed-effect equivalence", ok, detail.str());
  CHECK(ok);
}

TEST_CASE("criterion 4: two-way cluster covariance oracle") {
  const int n = 50, p = 4;
  std::mt19937_64 rng(404);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd y(n);
  std::vector<std::string> la(n), lb(n);
  std::vector<double> ea(5), eb(5);
  for (auto &v : ea) v = gauss(rng);
  for (auto &v : eb) v = gauss(rng);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    for (int j = 1; j < p; ++j) x(i, j) = gauss(rng);
    la[i] = "a" + std::to_string(i / 10);
    lb[i] = "b" + std::to_string(i % 5);
    y(i) = x(i, 1) - 0.5 * x(i, 2) + ea[i / 10] + eb[i % 5] + 0.4 * gauss(rng);
  }
  auto fit = ols_fit(x, y, {"c0", "c1", "c2", "c3"});
  const Eigen::MatrixXd v = cluster_cov(fit, x, la, lb, true);

  // independent sandwich: V_a + V_b - V_ab, each with the small-sample factor
  auto one_way = [&](const std::vector<std::string> &labels) {
    std::map<std::string, Eigen::VectorXd> scores;
    for (int i = 0; i < n; ++i) {
      auto [it, fresh] =
          scores.try_emplace(labels[i], Eigen::VectorXd::Zero(p));
      it->second += x.row(i).transpose() * fit.residuals(i);
    }
    Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(p, p);
    for (const auto &[label, s] : scores) meat += s * s.transpose();
    const double g = static_cast<double>(scores.size());
    const double c = (g / (g - 1.0)) * ((n - 1.0) / (n - p));
    const Eigen::MatrixXd bread = (x.transpose() * x).inverse();
    return Eigen::MatrixXd(c * bread * meat * bread);
  };
  std::vector<std::string> lab(n);
  for (int i = 0; i < n; ++i) lab[i] = la[i] + "\x1f" + lb[i];
  Eigen::MatrixXd oracle = one_way(la) + one_way(lb) - one_way(lab);
  oracle = 0.5 * (oracle + oracle.transpose().eval());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(oracle);
  if (es.eigenvalues().minCoeff() < 0.0)
    oracle = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).asDiagonal() *
             es.eigenvectors().transpose();

  const double gap = (v - oracle).lpNorm<Eigen::Infinity>();
  const bool ok = gap <= 1e-10;
  std::ostringstream detail;
  detail << "max element gap vs independent Va+Vb-Vab sandwich " << gap;
  report_line(4, "two-way cluster covariance", ok, detail.str());
  CHECK(ok);
}

TEST_CASE("criterion 5: logit oracle and planted recovery") {
  // (a) analytic score and Hessian vs central finite differences
  std::mt19937_64 rng(505);
  std::normal_distribution<double> gauss;
  const int n = 200, p = 3;
  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd y(n);
  std::uniform_real_distribution<double> uniform;
  for (int i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = gauss(rng);
    x(i, 2) = gauss(rng);
    y(i) = uniform(rng) < sigmoid(0.3 - x(i, 1) + 0.5 * x(i, 2)) ? 1.0 : 0.0;
  }
  const double h = 1e-5;
  double worst_fd = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd beta(p);
    for (int j = 0; j < p; ++j) beta(j) = 0.5 * gauss(rng);
    Eigen::VectorXd mu(n);
    for (int i = 0; i < n; ++i) mu(i) = sigmoid(x.row(i).dot(beta));
    const Eigen::VectorXd grad = x.transpose() * (y - mu);
    const Eigen::MatrixXd hess =
        x.transpose() * (mu.array() * (1.0 - mu.array())).matrix().asDiagonal() *
        x;
    for (int j = 0; j < p; ++j) {
      Eigen::VectorXd bp = beta, bm = beta;
      bp(j) += h;
      bm(j) -= h;
      const double fd =
          (log_likelihood(x, y, bp) - log_likelihood(x, y, bm)) / (2 * h);
      worst_fd = std::max(
          worst_fd, std::abs(fd - grad(j)) / std::max(1.0, std::abs(grad(j))));
      for (int k = 0; k < p; ++k) {
        auto grad_at = [&](const Eigen::VectorXd &b) {
          Eigen::VectorXd m(n);
          for (int i = 0; i < n; ++i) m(i) = sigmoid(x.row(i).dot(b));
          return (x.transpose() * (y - m))(k);
        };
        const double fd2 = -(grad_at(bp) - grad_at(bm)) / (2 * h);
        worst_fd = std::max(worst_fd, std::abs(fd2 - hess(k, j)) /
                                          std::max(1.0, std::abs(hess(k, j))));
      }
    }
  }
  const bool fd_ok = worst_fd <= 1e-5;

  // (b)+(c) planted promotion-style coefficients at n = 5000, 100 seeds,
  // with the score checked at every reported optimum
  Eigen::VectorXd truth(5);
  truth << -4.2, 6.721, 1.546, -2.572, 1.373;
  const std::vector<std::string> names = {"intercept", "pr", "qual",
                                          "pr_x_qual", "license"};
  std::atomic<int> hits{0}, grad_fail{0}, errors{0};
#pragma omp parallel for schedule(dynamic)
  for (int seed = 1; seed <= 100; ++seed) {
    try {
      std::mt19937_64 r(5050 + static_cast<uint64_t>(seed));
      std::uniform_real_distribution<double> u;
      const int m = 5000;
      Eigen::MatrixXd xs(m, 5);
      Eigen::VectorXd ys(m);
      for (int i = 0; i < m; ++i) {
        const double pr = u(r);
        const double qual = u(r) < 0.5 ? 1.0 : 0.0;
        const double lic = u(r) < 0.5 ? 1.0 : 0.0;
        xs.row(i) << 1.0, pr, qual, pr * qual, lic;
        ys(i) = u(r) < sigmoid(xs.row(i).dot(truth)) ? 1.0 : 0.0;
      }
      auto fit = logit_fit(xs, ys, names);
      Eigen::VectorXd mu(m);
      for (int i = 0; i < m; ++i) mu(i) = sigmoid(xs.row(i).dot(fit.beta));
      if ((xs.transpose() * (ys - mu)).lpNorm<Eigen::Infinity>() > 1e-8)
        ++grad_fail;
      bool in = fit.converged;
      for (int j = 0; j < 5; ++j)
        in = in && std::abs(fit.beta(j) - truth(j)) < 3 * fit.se(j);
      if (in) ++hits;
    } catch (...) {
      ++errors;
    }
  }
  const bool ok = fd_ok && hits >= 95 && grad_fail == 0 && errors == 0;
  std::ostringstream detail;
  detail << "finite-difference worst rel gap " << worst_fd << "; " << hits
         << "/100 seeds within 3 SEs; " << grad_fail
         << " fits with score above 1e-8";
  report_line(5, "logit oracle", ok, detail.str());
  CHECK(ok);
}

TEST_CASE("criterion 6: premium identity is exact") {
  int exact = 0, total = 0;
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    SynthConfig cfg;
    cfg.seed = 600 + seed;
    cfg.n_departments = 3;
    cfg.employees_per_department = 8;
    cfg.n_years = 3;
    auto result = generate(cfg);
    auto fit = fit_strategic_model(result.panel);
    const double diff = premium_difference(fit, PremiumKind::QualPremiumPeer,
                                           PremiumKind::QualPremiumNonpeer);
    const int ii = fit.index_of("peer_x_qual");
    ++total;
    if (ii >= 0 && diff == fit.beta(ii)) ++exact; // bit-for-bit
  }
  const bool ok = exact == total;
  std::ostringstream detail;
  detail << exact << "/" << total
         << " fits with QualPremiumPeer - QualPremiumNonpeer == beta3 exactly";
  report_line(6, "premium identity", ok, detail.str());
  CHECK(ok);
}

TEST_CASE("criterion 7: null manipulation panel") {
  // beta3 = 0 and honest self ratings; the peer level shift beta1 is also
  // zeroed since a pure level effect displaces the self rating's rank among
  // the ratings an employee gives and would contaminate the self-gap null
  std::atomic<int> rejections{0}, errors{0};
  std::atomic<long> gap_n{0};
  double gap_sum = 0.0;
#pragma omp parallel for schedule(dynamic) reduction(+ : gap_sum)
  for (int seed = 1; seed <= 200; ++seed) {
    try {
      SynthConfig cfg;
      cfg.seed = 700 + static_cast<uint64_t>(seed);
      cfg.beta1 = 0.0;
      cfg.beta3 = 0.0;
      cfg.self_inflation = 0.0;
      auto result = generate(cfg);
      auto fit = fit_strategic_model(result.panel);
      const int ii = fit.index_of("peer_x_qual");
      const double pval =
          stats::normal_two_sided(fit.beta(ii) / fit.se(ii));
      if (pval < 0.05) ++rejections;
      auto table = self_gap_table(result.panel);
      for (const auto &row : table.rows) gap_sum += row.delta;
      gap_n += static_cast<long>(table.rows.size());
    } catch (...) {
      ++errors;
    }
  }
  const double rate = rejections / 200.0;
  const double gap_mean = gap_sum / static_cast<double>(gap_n.load());
  const bool ok = errors == 0 && rate >= 0.01 && rate <= 0.12 &&
                  std::abs(gap_mean) <= 0.02;
  std::ostringstream detail;
  detail << "beta3 rejection rate " << 100.0 * rate
         << "% over 200 seeds; mean self percentile gap " << gap_mean;
  report_line(7, "null manipulation", ok, detail.str());
  CHECK(ok);
}

TEST_CASE("criterion 8: sign reproduction under discriminatory generosity") {
  std::atomic<int> s_premium{0}, s_self{0}, s_peer_qual{0}, s_peer_nonpeer{0},
      errors{0};
#pragma omp parallel for schedule(dynamic)
  for (int seed = 1; seed <= 100; ++seed) {
    try {
      SynthConfig cfg; // defaults: beta3 = -0.493, self_inflation = 0.8
      cfg.seed = 800 + static_cast<uint64_t>(seed);
      auto result = generate(cfg);

      auto fit = fit_strategic_model(result.panel);
      double qpp = 0.0, qpn = 0.0;
      for (const auto &e : premium_estimates(fit)) {
        if (e.kind == PremiumKind::QualPremiumPeer) qpp = e.value;
        if (e.kind == PremiumKind::QualPremiumNonpeer) qpn = e.value;
      }
      if (qpp < 0.0 && qpn > 0.0) ++s_premium;

      auto model = fit_promotion_model(result.panel, true);
      auto self_deltas =
          simulate_deltas(result.panel, model, ScenarioKind::SelfDictated);
      if (delta_summary(self_deltas).mean > 0.0) ++s_self;

      auto m = delta_correlation_matrix(result.panel, model);
      auto idx = [&](const char *label) {
        return std::find(m.labels.begin(), m.labels.end(), label) -
               m.labels.begin();
      };
      const auto qual_peer = m.cells[idx("Qual")][idx("D_peer")];
      const auto peer_nonpeer = m.cells[idx("D_peer")][idx("D_nonpeer")];
      if (qual_peer && qual_peer->r < 0.0) ++s_peer_qual;
      if (peer_nonpeer && peer_nonpeer->r < 0.0) ++s_peer_nonpeer;
    } catch (...) {
      ++errors;
    }
  }
  const bool ok = errors == 0 && s_premium >= 95 && s_self >= 95 &&
                  s_peer_qual >= 95 && s_peer_nonpeer >= 95;
  std::ostringstream detail;
  detail << "premium split " << s_premium << "/100, self delta " << s_self
         << "/100, r(D_peer,Qual)<0 " << s_peer_qual
         << "/100, r(D_peer,D_nonpeer)<0 " << s_peer_nonpeer << "/100";
  report_line(8, "sign reproduction", ok, detail.str());
  CHECK(ok);
}

TEST_CASE("criterion 9: nonpeer scenario is null on a peer-free panel") {
  SynthConfig cfg;
  cfg.seed = 909;
  cfg.n_departments = 4;
  cfg.employees_per_department = 6;
  cfg.n_ranks = 6; // distinct ranks everywhere: no peer relation exists
  auto result = generate(cfg);
  for (const auto &rec : result.panel.records())
    REQUIRE(rec.relation != Relation::Peer);

  auto model = fit_promotion_model(result.panel, true);
  auto deltas = simulate_deltas(result.panel, model, ScenarioKind::Nonpeer);
  size_t present = 0, exact_zero = 0;
  for (const auto &d : deltas)
    if (d.delta) {
      ++present;
      if (*d.delta == 0.0) ++exact_zero;
    }
  const bool ok = !deltas.empty() && present == deltas.size() &&
                  exact_zero == present;
  std::ostringstream detail;
  detail << exact_zero << "/" << deltas.size()
         << " employee-years with delta exactly 0";
  report_line(9, "counterfactual null", ok, detail.str());
  CHECK(ok);
}

namespace {

int run_cli(const std::string &args) {
  const std::string cmd =
      std::string(PANELAUDIT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  return WEXITSTATUS(std::system(cmd.c_str()));
}

std::map<std::string, std::string> dir_bytes(const fs::path &dir) {
  std::map<std::string, std::string> out;
  for (const auto &entry : fs::directory_iterator(dir)) {
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    out[entry.path().filename().string()] = ss.str();
  }
  return out;
}

} // namespace

TEST_CASE("criterion 10: analyze output bundle is deterministic") {
  const fs::path base =
      fs::temp_directory_path() / ("pa_accept_" + std::to_string(getpid()));
  const fs::path in = base / "in", a = base / "a", b = base / "b";
  fs::create_directories(in);
  fs::create_directories(a);
  fs::create_directories(b);
  bool ok = run_cli("synth --seed 12 --out " + in.string()) == 0;
  const std::string io = " --roster " + (in / "roster.csv").string() +
                         " --ratings " + (in / "ratings.csv").string();
  ok = ok && run_cli("analyze" + io + " --out " + a.string()) == 0;
  ok = ok && run_cli("analyze" + io + " --out " + b.string()) == 0;
  size_t files = 0;
  if (ok) {
    const auto ba = dir_bytes(a), bb = dir_bytes(b);
    files = ba.size();
    ok = !ba.empty() && ba == bb;
  }
  std::ostringstream detail;
  detail << files << " output files byte-identical across two runs";
  report_line(10, "determinism", ok, detail.str());
  CHECK(ok);
  fs::remove_all(base);
}

TEST_CASE("criterion 11: percentile rank properties") {
  std::mt19937_64 rng(1111);
  std::normal_distribution<double> gauss;
  bool grid_ok = true, mean_ok = true, invariant_ok = true;
  for (int group = 0; group < 1000; ++group) {
    const size_t n = 2 + rng() % 39;
    std::vector<double> values;
    while (values.size() < n) {
      const double v = gauss(rng);
      if (std::find(values.begin(), values.end(), v) == values.end())
        values.push_back(v); // tie-free by construction
    }
    std::vector<double> pr(n);
    double sum = 0.0;
    for (size_t i = 0; i < n; ++i) {
      pr[i] = stats::percentile_rank(values, i);
      sum += pr[i];
    }
    std::vector<double> sorted = pr;
    std::sort(sorted.begin(), sorted.end());
    for (size_t k = 0; k < n; ++k)
      if (sorted[k] != static_cast<double>(k) / static_cast<double>(n - 1))
        grid_ok = false;
    if (std::abs(sum / static_cast<double>(n) - 0.5) > 1e-12) mean_ok = false;

    std::vector<double> transformed(n);
    for (size_t i = 0; i < n; ++i) {
      const double v = values[i];
      transformed[i] = v * v * v + 2.0 * v; // strictly increasing
    }
    for (size_t i = 0; i < n; ++i)
      if (stats::percentile_rank(transformed, i) != pr[i]) invariant_ok = false;
  }
  const bool ok = grid_ok && mean_ok && invariant_ok;
  std::ostringstream detail;
  detail << "1000 groups: grid " << (grid_ok ? "exact" : "BROKEN") << ", mean "
         << (mean_ok ? "0.5" : "off") << ", monotone-transform invariance "
         << (invariant_ok ? "exact" : "BROKEN");
  report_line(11, "percentile properties", ok, detail.str());
  CHECK(ok);
}
