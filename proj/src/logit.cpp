#include "panelaudit/logit.hpp"

#include <cmath>

#include "panelaudit/errors.hpp"

namespace panelaudit {

int LogitFit::index_of(const std::string &name) const {
  for (size_t i = 0; i < column_names.size(); ++i)
    if (column_names[i] == name) return static_cast<int>(i);
  return -1;
}

double LogitFit::se(int index) const {
  return std::sqrt(covariance(index, index));
}

namespace {

double logistic(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

} // namespace

double log_likelihood(const Eigen::MatrixXd &x, const Eigen::VectorXd &y,
                      const Eigen::VectorXd &beta) {
  const Eigen::VectorXd eta = x * beta;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    // log p = -log(1+exp(-eta)), log(1-p) = -log(1+exp(eta))
    const double t = y(i) > 0.5 ? eta(i) : -eta(i);
    ll -= t >= 0.0 ? std::log1p(std::exp(-t)) - 0.0
                   : -t + std::log1p(std::exp(t));
  }
  return ll;
}

LogitFit logit_fit(const Eigen::MatrixXd &x, const Eigen::VectorXd &y,
                   const std::vector<std::string> &column_names,
                   const LogitOptions &options) {
  const Eigen::Index n = x.rows(), p = x.cols();
  if (static_cast<size_t>(p) != column_names.size())
    throw make_error("DimensionMismatch", "column names vs design width");
  const double ybar = y.mean();
  if (ybar <= 0.0 || ybar >= 1.0)
    throw make_error("OneClassOnly", "outcome has a single class");

  LogitFit fit;
  fit.column_names = column_names;
  fit.n_obs = static_cast<long>(n);
  fit.null_log_likelihood =
      static_cast<double>(n) *
      (ybar * std::log(ybar) + (1.0 - ybar) * std::log(1.0 - ybar));

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  double ll = log_likelihood(x, y, beta);
  double prev_norm = 0.0;
  bool converged = false;
  int iter = 0;

  Eigen::VectorXd mu(n), w(n);
  for (; iter < options.max_iterations; ++iter) {
    const Eigen::VectorXd eta = x * beta;
    for (Eigen::Index i = 0; i < n; ++i) {
      mu(i) = logistic(eta(i));
      w(i) = mu(i) * (1.0 - mu(i));
    }
    const Eigen::VectorXd grad = x.transpose() * (y - mu);
    if (grad.lpNorm<Eigen::Infinity>() < options.grad_tol) {
      converged = true;
      break;
    }
    const double norm = beta.lpNorm<Eigen::Infinity>();
    if (eta.lpNorm<Eigen::Infinity>() > options.separation_threshold &&
        norm > prev_norm)
      throw make_error("Separation",
                       "linear predictor diverging; data are separated");
    prev_norm = norm;

    const Eigen::MatrixXd hessian =
        x.transpose() * w.asDiagonal() * x; // observed information
    Eigen::VectorXd step = hessian.ldlt().solve(grad);
    double scale = 1.0;
    Eigen::VectorXd candidate = beta + step;
    double cand_ll = log_likelihood(x, y, candidate);
    // Near the optimum the likelihood is flat to machine precision; halving
    // only on decreases beyond rounding lets the final Newton steps through.
    const double ll_tol = 1e-12 * (1.0 + std::abs(ll));
    while (cand_ll < ll - ll_tol && scale > 1e-10) {
      scale *= 0.5;
      candidate = beta + scale * step;
      cand_ll = log_likelihood(x, y, candidate);
    }
    const double step_size = (scale * step).lpNorm<Eigen::Infinity>();
    beta = candidate;
    ll = cand_ll;
    if (step_size < options.step_tol) {
      // Step-converged; guard the score against the documented optimum
      // bound (a vanishing step with a large score would be a false stop).
      const Eigen::VectorXd eta2 = x * beta;
      Eigen::VectorXd mu2(n);
      for (Eigen::Index i = 0; i < n; ++i) mu2(i) = logistic(eta2(i));
      converged =
          (x.transpose() * (y - mu2)).lpNorm<Eigen::Infinity>() <= 1e-8;
      ++iter;
      break;
    }
  }
  if (!converged) throw make_error("NotConverged", "Newton-Raphson stalled");

  const Eigen::VectorXd eta = x * beta;
  for (Eigen::Index i = 0; i < n; ++i) {
    mu(i) = logistic(eta(i));
    w(i) = mu(i) * (1.0 - mu(i));
  }
  const Eigen::MatrixXd info = x.transpose() * w.asDiagonal() * x;
  fit.covariance = info.ldlt().solve(Eigen::MatrixXd::Identity(p, p));
  fit.beta = beta;
  fit.log_likelihood = log_likelihood(x, y, beta);
  fit.pseudo_r2 = 1.0 - fit.log_likelihood / fit.null_log_likelihood;
  fit.converged = true;
  fit.iterations = iter;
  return fit;
}

std::vector<PromotionRow> build_promotion_rows(
    const AssessmentPanel &panel, const AggregationConfig &config) {
  const auto pr = actual_percentiles(panel, config);
  std::vector<PromotionRow> rows;
  for (const auto *e : panel.sorted_roster()) {
    if (!e->promoted) continue;
    auto it = pr.find({e->employee_id, e->year});
    if (it == pr.end()) continue;
    PromotionRow row;
    row.employee_id = e->employee_id;
    row.year = e->year;
    row.pr = it->second;
    row.qual = e->qual ? 1 : 0;
    row.pr_x_qual = row.pr * row.qual;
    row.license = e->license ? 1 : 0;
    row.promoted = *e->promoted ? 1 : 0;
    row.rank_level = std::to_string(e->rank);
    row.year_level = std::to_string(e->year);
    row.dept_level = e->department_id;
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

void append_dummies(const FactorEncoding &enc, const std::string &value,
                    std::vector<double> &x, bool allow_unseen = false) {
  bool seen = value == (enc.levels.empty() ? value : enc.levels[0]);
  for (size_t k = 1; k < enc.levels.size(); ++k) {
    const bool hit = enc.levels[k] == value;
    x.push_back(hit ? 1.0 : 0.0);
    seen = seen || hit;
  }
  if (!seen && !allow_unseen)
    throw make_error("UnseenLevel", "fixed-effect level not in training: " + value);
}

std::vector<double> promotion_design_row(const PromotionModel &model,
                                         const PromotionRow &row, double pr) {
  std::vector<double> x;
  x.push_back(1.0);
  x.push_back(pr);
  x.push_back(static_cast<double>(row.qual));
  if (model.with_interaction) x.push_back(pr * row.qual);
  x.push_back(static_cast<double>(row.license));
  append_dummies(model.rank_enc, row.rank_level, x);
  append_dummies(model.year_enc, row.year_level, x);
  append_dummies(model.dept_enc, row.dept_level, x);
  return x;
}

} // namespace

PromotionModel fit_promotion_model(const AssessmentPanel &panel,
                                   bool with_interaction,
                                   const AggregationConfig &config,
                                   const LogitOptions &options) {
  const auto rows = build_promotion_rows(panel, config);
  if (rows.empty())
    throw make_error("EmptySample", "no rows with a promotion outcome");

  PromotionModel model;
  model.with_interaction = with_interaction;
  std::vector<std::string> rank_vals, year_vals, dept_vals;
  for (const auto &r : rows) {
    rank_vals.push_back(r.rank_level);
    year_vals.push_back(r.year_level);
    dept_vals.push_back(r.dept_level);
  }
  model.rank_enc = encode_factor("rank_", rank_vals);
  model.year_enc = encode_factor("year_", year_vals);
  model.dept_enc = encode_factor("dept_", dept_vals);

  std::vector<std::string> names = {"intercept", "pr", "qual"};
  if (with_interaction) names.push_back("pr_x_qual");
  names.push_back("license");
  for (const auto *enc : {&model.rank_enc, &model.year_enc, &model.dept_enc})
    names.insert(names.end(), enc->column_names.begin(),
                 enc->column_names.end());

  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index p = static_cast<Eigen::Index>(names.size());
  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto &row = rows[static_cast<size_t>(i)];
    const auto xr = promotion_design_row(model, row, row.pr);
    for (Eigen::Index j = 0; j < p; ++j) x(i, j) = xr[static_cast<size_t>(j)];
    y(i) = row.promoted;
  }
  model.fit = logit_fit(x, y, names, options);
  return model;
}

double predict_prob(const PromotionModel &model, const PromotionRow &row) {
  return predict_prob_with_pr(model, row, row.pr);
}

double predict_prob_with_pr(const PromotionModel &model,
                            const PromotionRow &row, double pr) {
  const auto x = promotion_design_row(model, row, pr);
  if (x.size() != static_cast<size_t>(model.fit.beta.size()))
    throw make_error("MissingRegressor", "design row width mismatch");
  double eta = 0.0;
  for (size_t j = 0; j < x.size(); ++j)
    eta += x[j] * model.fit.beta(static_cast<Eigen::Index>(j));
  return logistic(eta);
}

} // namespace panelaudit
