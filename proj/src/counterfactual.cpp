#include "panelaudit/counterfactual.hpp"

#include <algorithm>
#include <cmath>

#include "panelaudit/errors.hpp"

namespace panelaudit {

const char *scenario_name(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::Head: return "head";
    case ScenarioKind::Peer: return "peer";
    case ScenarioKind::Nonpeer: return "nonpeer";
    case ScenarioKind::SelfDictated: return "self";
  }
  return "?";
}

namespace {

// Mean of the employee-year's received ratings restricted to one scenario's
// subset; absent if the subset is empty.
std::optional<double> scenario_mean(const AssessmentPanel &panel,
                                    const EmployeeYear &e, ScenarioKind kind,
                                    const AggregationConfig &config) {
  double sum = 0.0;
  size_t n = 0;
  for (size_t idx : panel.received_by(e.employee_id, e.year)) {
    const auto &rec = panel.records()[idx];
    bool use = false;
    switch (kind) {
      case ScenarioKind::Head:
        use = rec.relation == Relation::Head;
        break;
      case ScenarioKind::Peer:
        use = rec.relation == Relation::Peer;
        break;
      case ScenarioKind::Nonpeer:
        // Only peer evaluations are dropped; self/head follow the same
        // aggregation switches as mean_all.
        use = rec.relation == Relation::Nonpeer ||
              (rec.relation == Relation::Self && config.include_self_in_all) ||
              (rec.relation == Relation::Head && config.include_head_in_all);
        break;
      case ScenarioKind::SelfDictated:
        break; // handled via self_percentiles
    }
    if (use) {
      sum += rec.rating;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

} // namespace

PersonYearMap scenario_percentiles(const AssessmentPanel &panel,
                                   ScenarioKind kind,
                                   const AggregationConfig &config) {
  if (kind == ScenarioKind::SelfDictated) return self_percentiles(panel);

  PersonYearMap out;
  for (const auto &dept : panel.departments()) {
    for (int year : panel.years()) {
      std::vector<double> values;
      std::vector<std::pair<std::string, int>> keys;
      for (const auto &py : panel.members(dept, year)) {
        const EmployeeYear *e = panel.find(py.first, py.second);
        const auto m = scenario_mean(panel, *e, kind, config);
        if (!m) continue;
        keys.push_back(py);
        values.push_back(*m);
      }
      for (size_t i = 0; i < keys.size(); ++i)
        out[keys[i]] = stats::percentile_rank(values, i);
    }
  }
  return out;
}

std::vector<ScenarioDelta> simulate_deltas(const AssessmentPanel &panel,
                                           const PromotionModel &model,
                                           ScenarioKind kind,
                                           const AggregationConfig &config) {
  if (!model.fit.converged)
    throw make_error("NotConverged", "promotion model did not converge");
  const auto pr_cs = scenario_percentiles(panel, kind, config);
  const auto rows = build_promotion_rows(panel, config);

  std::vector<ScenarioDelta> out;
  out.reserve(rows.size());
  for (const auto &row : rows) {
    ScenarioDelta d;
    d.employee_id = row.employee_id;
    d.year = row.year;
    d.p_actual = predict_prob(model, row);
    auto it = pr_cs.find({row.employee_id, row.year});
    if (it != pr_cs.end()) {
      d.pr_cs = it->second;
      d.p_cs = predict_prob_with_pr(model, row, it->second);
      d.delta = *d.p_cs - d.p_actual;
    }
    out.push_back(std::move(d));
  }
  return out;
}

DeltaSummary delta_summary(const std::vector<ScenarioDelta> &deltas) {
  std::vector<double> present;
  for (const auto &d : deltas)
    if (d.delta) present.push_back(*d.delta);
  if (present.empty()) throw make_error("EmptyInput", "no present deltas");

  const auto s = stats::summarize(present);
  DeltaSummary out;
  out.n = s.n;
  out.mean = s.mean;
  out.median = s.median;
  out.sd = s.sd;
  size_t neg = 0, zero = 0, pos = 0;
  for (double d : present) {
    if (std::fabs(d) <= 1e-12) ++zero;
    else if (d < 0.0) ++neg;
    else ++pos;
  }
  const double n = static_cast<double>(present.size());
  out.pct_negative = 100.0 * neg / n;
  out.pct_zero = 100.0 * zero / n;
  out.pct_positive = 100.0 * pos / n;
  return out;
}

CorrelationMatrix delta_correlation_matrix(const AssessmentPanel &panel,
                                           const PromotionModel &model,
                                           const AggregationConfig &config) {
  const auto rows = build_promotion_rows(panel, config);
  std::vector<std::vector<std::optional<double>>> cols(5);
  for (const auto &row : rows)
    cols[0].push_back(static_cast<double>(row.qual));
  int c = 1;
  for (ScenarioKind kind : {ScenarioKind::Head, ScenarioKind::Peer,
                            ScenarioKind::Nonpeer, ScenarioKind::SelfDictated}) {
    const auto deltas = simulate_deltas(panel, model, kind, config);
    for (const auto &d : deltas) cols[c].push_back(d.delta);
    ++c;
  }
  return correlation_matrix({"Qual", "D_head", "D_peer", "D_nonpeer", "D_self"},
                            cols);
}

} // namespace panelaudit
