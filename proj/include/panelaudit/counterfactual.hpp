#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "panelaudit/logit.hpp"
#include "panelaudit/panel.hpp"
#include "panelaudit/ranking.hpp"

namespace panelaudit {

enum class ScenarioKind { Head, Peer, Nonpeer, SelfDictated };

const char *scenario_name(ScenarioKind kind);

struct ScenarioDelta {
  std::string employee_id;
  int year = 0;
  std::optional<double> pr_cs;
  std::optional<double> p_cs;
  double p_actual = 0.0;
  std::optional<double> delta; // p_cs - p_actual
};

struct DeltaSummary {
  size_t n = 0;
  double mean = 0.0;
  double median = 0.0;
  double sd = 0.0;
  double pct_negative = 0.0;
  double pct_zero = 0.0;
  double pct_positive = 0.0;
};

// Counterfactual percentile ranks; an employee-year missing the ratings a
// scenario requires is simply absent from the map.
PersonYearMap scenario_percentiles(const AssessmentPanel &panel,
                                   ScenarioKind kind,
                                   const AggregationConfig &config = {});

// One entry per promotion-sample row. Qual, License, and fixed effects are
// held at their actual values; only PR (and the interaction) is replaced.
std::vector<ScenarioDelta> simulate_deltas(const AssessmentPanel &panel,
                                           const PromotionModel &model,
                                           ScenarioKind kind,
                                           const AggregationConfig &config = {});

// Summary over present deltas; |delta| <= 1e-12 counts as zero.
DeltaSummary delta_summary(const std::vector<ScenarioDelta> &deltas);

// Pairwise-deleted Pearson over (Qual, D_head, D_peer, D_nonpeer, D_self).
CorrelationMatrix delta_correlation_matrix(const AssessmentPanel &panel,
                                           const PromotionModel &model,
                                           const AggregationConfig &config = {});

} // namespace panelaudit
