#include "panelaudit/ranking.hpp"

#include <algorithm>

#include "panelaudit/errors.hpp"

namespace panelaudit {

std::vector<ComponentMeans> component_means(const AssessmentPanel &panel,
                                            const AggregationConfig &config) {
  std::vector<ComponentMeans> out;
  for (const auto *e : panel.sorted_roster()) {
    ComponentMeans m;
    m.employee_id = e->employee_id;
    m.year = e->year;
    double sum_all = 0.0;
    size_t n_all = 0;
    double sums[4] = {0, 0, 0, 0};
    size_t counts[4] = {0, 0, 0, 0};
    for (size_t idx : panel.received_by(e->employee_id, e->year)) {
      const auto &rec = panel.records()[idx];
      const int k = static_cast<int>(rec.relation);
      sums[k] += rec.rating;
      ++counts[k];
      if (rec.relation == Relation::Self && !config.include_self_in_all)
        continue;
      if (rec.relation == Relation::Head && !config.include_head_in_all)
        continue;
      sum_all += rec.rating;
      ++n_all;
    }
    auto cls = [&](Relation r) -> std::optional<double> {
      const int k = static_cast<int>(r);
      if (counts[k] == 0) return std::nullopt;
      return sums[k] / static_cast<double>(counts[k]);
    };
    if (n_all > 0) m.mean_all = sum_all / static_cast<double>(n_all);
    m.mean_self = cls(Relation::Self);
    m.mean_head = cls(Relation::Head);
    m.mean_peer = cls(Relation::Peer);
    m.mean_nonpeer = cls(Relation::Nonpeer);
    out.push_back(std::move(m));
  }
  return out;
}

PersonYearMap actual_percentiles(const AssessmentPanel &panel,
                                 const AggregationConfig &config) {
  std::map<std::pair<std::string, int>, double> means;
  for (const auto &m : component_means(panel, config))
    if (m.mean_all) means[{m.employee_id, m.year}] = *m.mean_all;

  PersonYearMap out;
  for (const auto &dept : panel.departments()) {
    for (int year : panel.years()) {
      const auto &people = panel.members(dept, year);
      std::vector<double> values;
      std::vector<std::pair<std::string, int>> keys;
      for (const auto &py : people) {
        auto it = means.find(py);
        if (it == means.end()) continue;
        keys.push_back(py);
        values.push_back(it->second);
      }
      for (size_t i = 0; i < keys.size(); ++i)
        out[keys[i]] = stats::percentile_rank(values, i);
    }
  }
  return out;
}

PersonYearMap self_percentiles(const AssessmentPanel &panel) {
  PersonYearMap out;
  for (const auto *e : panel.sorted_roster()) {
    std::vector<double> given;
    std::optional<size_t> self_pos;
    for (size_t idx : panel.given_by(e->employee_id, e->year)) {
      const auto &rec = panel.records()[idx];
      if (rec.relation == Relation::Self) self_pos = given.size();
      given.push_back(rec.rating);
    }
    if (!self_pos) continue;
    out[{e->employee_id, e->year}] = stats::percentile_rank(given, *self_pos);
  }
  return out;
}

SelfGapTable self_gap_table(const AssessmentPanel &panel,
                            const AggregationConfig &config) {
  const auto pr_actual = actual_percentiles(panel, config);
  const auto pr_self = self_percentiles(panel);
  SelfGapTable table;
  std::vector<double> deltas, selfs, actuals;
  for (const auto *e : panel.sorted_roster()) {
    const std::pair<std::string, int> key{e->employee_id, e->year};
    auto is = pr_self.find(key);
    auto ia = pr_actual.find(key);
    if (is == pr_self.end() || ia == pr_actual.end()) continue;
    SelfGapRow row;
    row.employee_id = e->employee_id;
    row.year = e->year;
    row.pr_self = is->second;
    row.pr_actual = ia->second;
    row.delta = row.pr_self - row.pr_actual;
    deltas.push_back(row.delta);
    selfs.push_back(row.pr_self);
    actuals.push_back(row.pr_actual);
    table.rows.push_back(std::move(row));
  }
  if (!table.rows.empty()) {
    table.delta = stats::summarize(deltas);
    table.pr_self = stats::summarize(selfs);
    table.pr_actual = stats::summarize(actuals);
  }
  return table;
}

CorrelationMatrix correlation_matrix(
    const std::vector<std::string> &labels,
    const std::vector<std::vector<std::optional<double>>> &columns) {
  CorrelationMatrix m;
  m.labels = labels;
  const size_t k = labels.size();
  m.cells.assign(k, std::vector<std::optional<stats::Correlation>>(k));
  for (size_t a = 0; a < k; ++a) {
    for (size_t b = 0; b <= a; ++b) {
      std::vector<double> xa, xb;
      const size_t rows = std::min(columns[a].size(), columns[b].size());
      for (size_t i = 0; i < rows; ++i) {
        if (columns[a][i] && columns[b][i]) {
          xa.push_back(*columns[a][i]);
          xb.push_back(*columns[b][i]);
        }
      }
      if (a == b) {
        if (xa.size() >= 3)
          m.cells[a][a] = stats::Correlation{1.0, 0.0, xa.size()};
        continue;
      }
      try {
        auto c = stats::pearson(xa, xb);
        m.cells[a][b] = c;
        m.cells[b][a] = c;
      } catch (const Error &) {
        // n < 3 or zero variance: cell stays absent
      }
    }
  }
  return m;
}

CorrelationMatrix component_correlation_matrix(
    const AssessmentPanel &panel, const AggregationConfig &config) {
  const auto means = component_means(panel, config);
  std::vector<std::vector<std::optional<double>>> cols(5);
  for (const auto &m : means) {
    cols[0].push_back(m.mean_all);
    cols[1].push_back(m.mean_head);
    cols[2].push_back(m.mean_peer);
    cols[3].push_back(m.mean_nonpeer);
    cols[4].push_back(m.mean_self);
  }
  return correlation_matrix({"All", "Head", "Peers", "Nonpeers", "Self"}, cols);
}

} // namespace panelaudit
