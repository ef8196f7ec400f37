#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "panelaudit/panel.hpp"
#include "panelaudit/stats.hpp"

namespace panelaudit {

struct AggregationConfig {
  bool include_self_in_all = true;
  bool include_head_in_all = true;
};

struct ComponentMeans {
  std::string employee_id;
  int year = 0;
  std::optional<double> mean_all;
  std::optional<double> mean_head;
  std::optional<double> mean_peer;
  std::optional<double> mean_nonpeer;
  std::optional<double> mean_self;
};

struct SelfGapRow {
  std::string employee_id;
  int year = 0;
  double pr_self = 0.0;
  double pr_actual = 0.0;
  double delta = 0.0; // pr_self - pr_actual
};

struct SelfGapTable {
  std::vector<SelfGapRow> rows;
  stats::Summary delta;
  stats::Summary pr_self;
  stats::Summary pr_actual;
};

struct CorrelationMatrix {
  std::vector<std::string> labels;
  // Cells below n=3 or with zero variance are absent.
  std::vector<std::vector<std::optional<stats::Correlation>>> cells;
};

using PersonYearMap = std::map<std::pair<std::string, int>, double>;

// Per ratee-year arithmetic means within each relation class. mean_all
// averages every received rating, subject to the aggregation switches.
std::vector<ComponentMeans> component_means(
    const AssessmentPanel &panel, const AggregationConfig &config = {});

// PR_actual: percentile of mean_all within the department-year group.
PersonYearMap actual_percentiles(const AssessmentPanel &panel,
                                 const AggregationConfig &config = {});

// PR_self: percentile of the employee's self-rating within the multiset of
// ratings she gives that year (self included). Omitted without a self-record.
PersonYearMap self_percentiles(const AssessmentPanel &panel);

SelfGapTable self_gap_table(const AssessmentPanel &panel,
                            const AggregationConfig &config = {});

// Pairwise-deleted Pearson over component means; labels
// All, Head, Peers, Nonpeers, Self.
CorrelationMatrix component_correlation_matrix(
    const AssessmentPanel &panel, const AggregationConfig &config = {});

// Pairwise-deleted correlation matrix over arbitrary labeled columns
// (entries may be absent per row).
CorrelationMatrix correlation_matrix(
    const std::vector<std::string> &labels,
    const std::vector<std::vector<std::optional<double>>> &columns);

} // namespace panelaudit
