#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "panelaudit/panel.hpp"
#include "panelaudit/ranking.hpp"
#include "panelaudit/regress.hpp"

namespace panelaudit {

struct LogitOptions {
  double grad_tol = 1e-10;
  double step_tol = 1e-12;
  int max_iterations = 100;
  double separation_threshold = 30.0; // |x'beta| beyond this flags separation
};

struct LogitFit {
  std::vector<std::string> column_names;
  Eigen::VectorXd beta;
  Eigen::MatrixXd covariance; // inverse observed information
  double log_likelihood = 0.0;
  double null_log_likelihood = 0.0;
  double pseudo_r2 = 0.0; // McFadden
  long n_obs = 0;
  bool converged = false;
  int iterations = 0;

  int index_of(const std::string &name) const;
  double se(int index) const;
};

// Newton-Raphson MLE from beta = 0 with step-halving.
// Throws OneClassOnly, Separation, or NotConverged.
LogitFit logit_fit(const Eigen::MatrixXd &x, const Eigen::VectorXd &y,
                   const std::vector<std::string> &column_names,
                   const LogitOptions &options = {});

double log_likelihood(const Eigen::MatrixXd &x, const Eigen::VectorXd &y,
                      const Eigen::VectorXd &beta);

struct PromotionRow {
  std::string employee_id;
  int year = 0;
  double pr = 0.0; // within-department percentile of the average rating
  int qual = 0;
  double pr_x_qual = 0.0;
  int license = 0;
  int promoted = 0;
  std::string rank_level;
  std::string year_level;
  std::string dept_level;
};

// One row per employee-year with a recorded promotion outcome.
std::vector<PromotionRow> build_promotion_rows(
    const AssessmentPanel &panel, const AggregationConfig &config = {});

struct PromotionModel {
  LogitFit fit;
  bool with_interaction = true;
  FactorEncoding rank_enc, year_enc, dept_enc;
};

PromotionModel fit_promotion_model(const AssessmentPanel &panel,
                                   bool with_interaction,
                                   const AggregationConfig &config = {},
                                   const LogitOptions &options = {});

// Logistic of the linear predictor. Throws UnseenLevel for a fixed-effect
// level absent from training.
double predict_prob(const PromotionModel &model, const PromotionRow &row);

// Same row with PR replaced (interaction recomputed), everything else fixed.
double predict_prob_with_pr(const PromotionModel &model,
                            const PromotionRow &row, double pr);

} // namespace panelaudit
