#include "panelaudit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "panelaudit/errors.hpp"
#include "panelaudit/ranking.hpp"

namespace panelaudit {

namespace {

std::string dept_id(int d) { return "D" + std::to_string(d + 1); }

std::string employee_id(int d, int e) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "D%dE%02d", d + 1, e + 1);
  return buf;
}

double logistic(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

GroundTruth draw_effects(const SynthConfig &cfg, std::mt19937_64 &rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  GroundTruth truth;
  truth.config = cfg;
  for (int d = 0; d < cfg.n_departments; ++d)
    truth.dept_effects[dept_id(d)] = cfg.fe_scale_dept * gauss(rng);
  for (int t = 0; t < cfg.n_years; ++t)
    truth.year_effects[cfg.first_year + t] = cfg.fe_scale_year * gauss(rng);
  for (int d = 0; d < cfg.n_departments; ++d)
    for (int e = 0; e < cfg.employees_per_department; ++e)
      truth.ratee_effects[employee_id(d, e)] = cfg.fe_scale_ratee * gauss(rng);
  return truth;
}

} // namespace

void validate_config(const SynthConfig &cfg) {
  auto fail = [](const std::string &what) {
    throw make_error("ConfigInvalid", what);
  };
  if (cfg.n_departments < 1) fail("n_departments must be positive");
  if (cfg.employees_per_department < 1)
    fail("employees_per_department must be positive");
  if (cfg.n_years < 1) fail("n_years must be positive");
  if (cfg.n_ranks < 1) fail("n_ranks must be positive");
  if (cfg.fe_scale_ratee < 0 || cfg.fe_scale_year < 0 || cfg.fe_scale_dept < 0)
    fail("fixed-effect scales must be nonnegative");
  if (cfg.noise_sd < 0) fail("noise_sd must be nonnegative");
  if (cfg.qual_pass_prob_per_year < 0 || cfg.qual_pass_prob_per_year > 1)
    fail("qual_pass_prob_per_year must be in [0,1]");
  if (cfg.license_prob < 0 || cfg.license_prob > 1)
    fail("license_prob must be in [0,1]");
}

GroundTruth planted_truth(const SynthConfig &cfg) {
  validate_config(cfg);
  std::mt19937_64 rng(cfg.seed);
  return draw_effects(cfg, rng);
}

SynthResult generate(const SynthConfig &cfg) {
  validate_config(cfg);
  std::mt19937_64 rng(cfg.seed);
  GroundTruth truth = draw_effects(cfg, rng);

  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // Roster. Employee 0 of each department is its head; ranks round-robin.
  // Qual is absorbing: once passed it stays passed.
  std::vector<EmployeeYear> roster;
  std::map<std::pair<std::string, int>, const EmployeeYear *> lookup;
  for (int d = 0; d < cfg.n_departments; ++d) {
    for (int e = 0; e < cfg.employees_per_department; ++e) {
      const std::string id = employee_id(d, e);
      const bool license = uniform(rng) < cfg.license_prob;
      bool qual = false;
      for (int t = 0; t < cfg.n_years; ++t) {
        const double u = uniform(rng); // always drawn, keeps order fixed
        if (!qual && u < cfg.qual_pass_prob_per_year) qual = true;
        EmployeeYear row;
        row.employee_id = id;
        row.year = cfg.first_year + t;
        row.department_id = dept_id(d);
        row.rank = 1 + e % cfg.n_ranks;
        row.qual = qual;
        row.license = license;
        row.is_head = e == 0;
        roster.push_back(std::move(row));
      }
    }
  }
  for (const auto &row : roster) lookup[{row.employee_id, row.year}] = &row;

  // Ratings: everyone rates everyone (self included) within department.
  std::vector<RatingRecord> records;
  long clamped = 0;
  for (int t = 0; t < cfg.n_years; ++t) {
    const int year = cfg.first_year + t;
    for (int d = 0; d < cfg.n_departments; ++d) {
      for (int ri = 0; ri < cfg.employees_per_department; ++ri) {
        const EmployeeYear *rater = lookup.at({employee_id(d, ri), year});
        for (int ei = 0; ei < cfg.employees_per_department; ++ei) {
          const EmployeeYear *ratee = lookup.at({employee_id(d, ei), year});
          const bool self = ri == ei;
          const bool peer =
              !self && !rater->is_head && rater->rank == ratee->rank;
          const double qual = ratee->qual ? 1.0 : 0.0;
          const double p = peer ? 1.0 : 0.0;
          double r = cfg.beta0 + cfg.beta1 * p + cfg.beta2 * qual +
                     cfg.beta3 * p * qual +
                     truth.ratee_effects.at(ratee->employee_id) +
                     truth.year_effects.at(year) +
                     truth.dept_effects.at(ratee->department_id) +
                     cfg.noise_sd * gauss(rng);
          if (self) r += cfg.self_inflation;
          if (r < 0.0 || r > 10.0) {
            r = std::clamp(r, 0.0, 10.0);
            ++clamped;
          }
          RatingRecord rec;
          rec.year = year;
          rec.rater_id = rater->employee_id;
          rec.ratee_id = ratee->employee_id;
          rec.rating = r;
          rec.relation = self  ? Relation::Self
                         : rater->is_head ? Relation::Head
                         : peer           ? Relation::Peer
                                          : Relation::Nonpeer;
          records.push_back(std::move(rec));
        }
      }
    }
  }

  AssessmentPanel rating_panel(roster, std::move(records));
  const auto pr = actual_percentiles(rating_panel);

  // Promotion outcomes from the planted logit on realized percentiles,
  // in (department, employee, year) order.
  std::vector<EmployeeYear> final_roster = rating_panel.roster();
  for (auto &row : final_roster) {
    const double u = uniform(rng);
    auto it = pr.find({row.employee_id, row.year});
    const double pr_val = it != pr.end() ? it->second : 0.5;
    const double qual = row.qual ? 1.0 : 0.0;
    const double eta = cfg.promo.intercept + cfg.promo.pr * pr_val +
                       cfg.promo.qual * qual +
                       cfg.promo.pr_x_qual * pr_val * qual +
                       cfg.promo.license * (row.license ? 1.0 : 0.0);
    row.promoted = u < logistic(eta);
  }

  std::vector<RatingRecord> final_records = rating_panel.records();
  const double total = static_cast<double>(final_records.size());
  SynthResult result{
      AssessmentPanel(std::move(final_roster), std::move(final_records)),
      std::move(truth), total > 0 ? clamped / total : 0.0};
  return result;
}

} // namespace panelaudit
