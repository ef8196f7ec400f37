#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "panelaudit/counterfactual.hpp"
#include "panelaudit/csv.hpp"
#include "panelaudit/logit.hpp"
#include "panelaudit/panel.hpp"
#include "panelaudit/ranking.hpp"
#include "panelaudit/regress.hpp"
#include "panelaudit/synth.hpp"

namespace panelaudit::report {

using json = nlohmann::ordered_json;

struct RunConfig {
  std::string roster_path;
  std::string ratings_path;
  std::string out_dir = ".";
  AggregationConfig agg;
  SampleFilter sample_filter = SampleFilter::ExcludeSelf;
  bool small_sample_correction = true;
  bool write_csv = true;
  bool write_json = true;
};

// Deterministic decimal formatting shared by every emitter.
std::string fmt(double v);

json to_json(const ValidationReport &report);
json to_json(const CorrelationMatrix &m);
json to_json(const LinearFit &fit);
json to_json(const LogitFit &fit);

csv::Table to_csv(const CorrelationMatrix &m);

// Roster/ratings emission in the loader formats (synth output, round-trips).
csv::Table roster_to_csv(const std::vector<EmployeeYear> &roster);
csv::Table ratings_to_csv(const std::vector<RatingRecord> &records);

uint64_t fnv1a_file(const std::string &path);

// Writes table1..table6, figure1_premiums, and manifest.json under
// config.out_dir in the selected formats.
void write_analysis(const RunConfig &config, const AssessmentPanel &panel);

void write_validation(const RunConfig &config, const ValidationReport &report);

void write_synth_files(const SynthConfig &config, const std::string &roster_path,
                       const std::string &ratings_path,
                       const std::string &truth_path);

} // namespace panelaudit::report
