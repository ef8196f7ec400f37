#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "panelaudit/panel.hpp"

namespace panelaudit {

struct PromoCoeffs {
  double intercept = -4.2;
  double pr = 6.721;
  double qual = 1.546;
  double pr_x_qual = -2.572;
  double license = 1.373;
};

struct SynthConfig {
  uint64_t seed = 1;
  int n_departments = 7;
  int employees_per_department = 15;
  int n_years = 5;
  int n_ranks = 3;
  int first_year = 2010;

  // Rating equation coefficients.
  double beta0 = 6.0;
  double beta1 = 0.436;
  double beta2 = 0.165;
  double beta3 = -0.493;

  double fe_scale_ratee = 0.5;
  double fe_scale_year = 0.2;
  double fe_scale_dept = 0.3;
  double noise_sd = 0.5;

  double qual_pass_prob_per_year = 0.25;
  double self_inflation = 0.8;
  double license_prob = 0.5;
  PromoCoeffs promo;
};

struct GroundTruth {
  SynthConfig config; // the planted coefficients travel with the truth
  std::map<std::string, double> ratee_effects; // doubles as latent quality
  std::map<std::string, double> dept_effects;
  std::map<int, double> year_effects;
};

struct SynthResult {
  AssessmentPanel panel;
  GroundTruth truth;
  double clamp_rate = 0.0; // share of ratings clamped to [0,10]
};

// Deterministic in the config. Draw order: department effects, year
// effects, per-employee ratee effects (by department then employee index);
// then per-employee license and per-year qual draws; then one noise draw
// per rating record in (year, department, rater, ratee) order; then one
// uniform per roster row in (department, employee, year) order for the
// promotion outcome.
SynthResult generate(const SynthConfig &config);

// Phase-one draws only; identical to the truth embedded in generate().
GroundTruth planted_truth(const SynthConfig &config);

void validate_config(const SynthConfig &config); // throws ConfigInvalid

} // namespace panelaudit
