#include <doctest.h>

#include <cmath>

#include "panelaudit/counterfactual.hpp"
#include "panelaudit/errors.hpp"
#include "panelaudit/synth.hpp"
#include "test_util.hpp"

using namespace panelaudit;
using testutil::employee;
using testutil::rating;

TEST_CASE("head scenario orders a department by the head rating") {
  auto panel = testutil::make_panel(
      {employee("H1", 2010, "D1", 3, false, true),
       employee("E1", 2010, "D1", 2), employee("E2", 2010, "D1", 2),
       employee("E3", 2010, "D1", 1)},
      {rating(2010, "H1", "E1", 5.0), rating(2010, "H1", "E2", 7.0),
       rating(2010, "H1", "E3", 9.0)});
  auto pr = scenario_percentiles(panel, ScenarioKind::Head);
  CHECK(pr.at({"E1", 2010}) == 0.0);
  CHECK(pr.at({"E2", 2010}) == 0.5);
  CHECK(pr.at({"E3", 2010}) == 1.0);
  CHECK(pr.find({"H1", 2010}) == pr.end()); // no head rating of the head
}

TEST_CASE("peer scenario absent for employees without peers") {
  auto panel = testutil::make_panel(
      {employee("E1", 2010, "D1", 2), employee("E2", 2010, "D1", 2),
       employee("E3", 2010, "D1", 1)},
      {rating(2010, "E1", "E2", 7.0), rating(2010, "E2", "E1", 6.0),
       rating(2010, "E3", "E1", 5.0)});
  auto pr = scenario_percentiles(panel, ScenarioKind::Peer);
  CHECK(pr.count({"E1", 2010}) == 1);
  CHECK(pr.count({"E2", 2010}) == 1);
  CHECK(pr.find({"E3", 2010}) == pr.end()); // rank 1, no peers
}

TEST_CASE("nonpeer scenario equals actual on a peer-free panel") {
  SynthConfig cfg;
  cfg.seed = 31;
  cfg.n_departments = 2;
  cfg.employees_per_department = 6;
  cfg.n_ranks = 6; // every employee a distinct rank: no peer records
  auto result = generate(cfg);
  for (const auto &rec : result.panel.records())
    REQUIRE(rec.relation != Relation::Peer);
  auto actual = actual_percentiles(result.panel);
  auto cs = scenario_percentiles(result.panel, ScenarioKind::Nonpeer);
  REQUIRE(cs.size() == actual.size());
  for (const auto &[key, v] : actual) CHECK(cs.at(key) == v);
}

TEST_CASE("self scenario matches self_percentiles") {
  SynthConfig cfg;
  cfg.seed = 32;
  cfg.n_departments = 2;
  cfg.employees_per_department = 6;
  auto result = generate(cfg);
  auto a = scenario_percentiles(result.panel, ScenarioKind::SelfDictated);
  auto b = self_percentiles(result.panel);
  CHECK(a == b);
}

TEST_CASE("simulate_deltas and summary behave on a synthetic panel") {
  SynthConfig cfg;
  cfg.seed = 33;
  auto result = generate(cfg);
  auto model = fit_promotion_model(result.panel, true);

  for (ScenarioKind kind : {ScenarioKind::Head, ScenarioKind::Peer,
                            ScenarioKind::Nonpeer, ScenarioKind::SelfDictated}) {
    auto deltas = simulate_deltas(result.panel, model, kind);
    CHECK(deltas.size() == build_promotion_rows(result.panel).size());
    for (const auto &d : deltas) {
      CHECK(d.delta.has_value() == d.pr_cs.has_value());
      if (d.delta) CHECK(*d.delta == *d.p_cs - d.p_actual);
    }
    auto s = delta_summary(deltas);
    CHECK(s.pct_negative + s.pct_zero + s.pct_positive ==
          doctest::Approx(100.0).epsilon(1e-9));

    // delta sign couples to the percentile move through the combined slope
    for (const auto &d : deltas) {
      if (!d.delta) continue;
      const EmployeeYear *e = result.panel.find(d.employee_id, d.year);
      const double slope =
          model.fit.beta(model.fit.index_of("pr")) +
          (e->qual ? model.fit.beta(model.fit.index_of("pr_x_qual")) : 0.0);
      const auto actual = actual_percentiles(result.panel);
      const double move = *d.pr_cs - actual.at({d.employee_id, d.year});
      if (std::abs(move) > 1e-12 && std::abs(slope) > 1e-12)
        CHECK(*d.delta * move * slope >= 0.0);
      else
        CHECK(std::abs(*d.delta) <= 1e-12);
    }
  }
}

TEST_CASE("present peer deltas equal employees with peer ratings") {
  SynthConfig cfg;
  cfg.seed = 34;
  auto result = generate(cfg);
  auto model = fit_promotion_model(result.panel, true);
  auto deltas = simulate_deltas(result.panel, model, ScenarioKind::Peer);
  size_t present = 0;
  for (const auto &d : deltas)
    if (d.delta) ++present;
  size_t with_peer = 0;
  for (const auto &d : deltas) {
    bool any = false;
    for (size_t idx : result.panel.received_by(d.employee_id, d.year))
      if (result.panel.records()[idx].relation == Relation::Peer) any = true;
    if (any) ++with_peer;
  }
  CHECK(present == with_peer);
}

TEST_CASE("delta_summary arithmetic and edge cases") {
  std::vector<ScenarioDelta> deltas(3);
  deltas[0].delta = -0.1;
  deltas[1].delta = 0.0;
  deltas[2].delta = 0.1;
  for (auto &d : deltas) {
    d.pr_cs = 0.5;
    d.p_cs = 0.5;
  }
  auto s = delta_summary(deltas);
  CHECK(s.mean == doctest::Approx(0.0));
  CHECK(s.pct_negative == doctest::Approx(100.0 / 3));
  CHECK(s.pct_zero == doctest::Approx(100.0 / 3));
  CHECK(s.pct_positive == doctest::Approx(100.0 / 3));

  std::vector<ScenarioDelta> all_zero(2);
  for (auto &d : all_zero) {
    d.delta = 0.0;
    d.pr_cs = 0.5;
    d.p_cs = 0.5;
  }
  auto z = delta_summary(all_zero);
  CHECK(z.pct_zero == 100.0);
  CHECK(z.mean == 0.0);

  CHECK_THROWS_AS(delta_summary({}), Error);
}

TEST_CASE("self-inflation pushes mean self delta positive") {
  SynthConfig cfg;
  cfg.seed = 35;
  cfg.self_inflation = 1.5;
  auto result = generate(cfg);
  auto model = fit_promotion_model(result.panel, true);
  auto deltas =
      simulate_deltas(result.panel, model, ScenarioKind::SelfDictated);
  CHECK(delta_summary(deltas).mean > 0.0);
}

TEST_CASE("delta correlation matrix shape and degenerate cells") {
  SynthConfig cfg;
  cfg.seed = 36;
  auto result = generate(cfg);
  auto model = fit_promotion_model(result.panel, true);
  auto m = delta_correlation_matrix(result.panel, model);
  REQUIRE(m.labels == std::vector<std::string>{"Qual", "D_head", "D_peer",
                                               "D_nonpeer", "D_self"});
  for (size_t a = 0; a < 5; ++a)
    for (size_t b = 0; b < 5; ++b)
      if (m.cells[a][b]) {
        CHECK(m.cells[a][b]->r == m.cells[b][a]->r);
        CHECK(std::abs(m.cells[a][b]->r) <= 1.0);
      }
}
