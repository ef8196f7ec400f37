#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "panelaudit/panel.hpp"

namespace panelaudit {

enum class SampleFilter { ExcludeSelf, All, ExcludeSelfAndHead };

const char *sample_filter_name(SampleFilter f);

struct DesignSpec {
  SampleFilter sample_filter = SampleFilter::ExcludeSelf;
  bool small_sample_correction = true;
};

struct Design {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  std::vector<std::string> column_names;
  std::vector<std::string> cluster_ratee; // per row
  std::vector<std::string> cluster_year;  // per row
};

struct LinearFit {
  std::vector<std::string> column_names; // retained, in design order
  Eigen::VectorXd beta;
  std::vector<std::string> dropped_columns;
  Eigen::VectorXd residuals;
  Eigen::MatrixXd covariance; // cluster-robust; empty until cluster_cov
  bool cov_clipped = false;   // negative CGM eigenvalues were clipped
  long n_obs = 0;
  double r2 = 0.0;
  double adj_r2 = 0.0;

  int index_of(const std::string &name) const; // -1 if dropped/absent
  double se(int index) const;
};

struct WaldResult {
  double estimate = 0.0;
  double std_error = 0.0;
  double z = 0.0;
  double p = 1.0;
};

enum class PremiumKind {
  QualPremiumPeer,    // beta2 + beta3
  QualPremiumNonpeer, // beta2
  PeerDiffQualified,  // beta1 + beta3
  PeerDiffUnqualified // beta1
};

struct PremiumEstimate {
  PremiumKind kind;
  double value = 0.0;
  double std_error = 0.0;
  double z = 0.0;
  double p = 1.0;
};

// One-hot encoder with the lexicographically smallest level dropped;
// shared by the OLS and logit designs.
struct FactorEncoding {
  std::vector<std::string> levels;       // sorted, levels[0] is dropped
  std::vector<std::string> column_names; // prefix + level, one per dummy
};

FactorEncoding encode_factor(const std::string &prefix,
                             const std::vector<std::string> &values);

// Rows filtered per spec; columns: intercept, peer, qual, peer_x_qual,
// then rank/ratee/dept/year dummies in a fixed order.
Design build_design(const AssessmentPanel &panel, const DesignSpec &spec);

// Rank-revealing pivoted QR; columns with pivot below 1e-10 * max pivot
// are dropped and recorded. Covariance left empty.
LinearFit ols_fit(const Eigen::MatrixXd &x, const Eigen::VectorXd &y,
                  const std::vector<std::string> &column_names);

// Two-way Cameron-Gelbach-Miller covariance over the retained columns:
// V_a + V_b - V_ab, each a one-way cluster sandwich with the
// G/(G-1)*(n-1)/(n-p) factor when enabled. x_retained must be the design
// restricted to fit.column_names.
Eigen::MatrixXd cluster_cov(LinearFit &fit, const Eigen::MatrixXd &x_retained,
                            const std::vector<std::string> &labels_a,
                            const std::vector<std::string> &labels_b,
                            bool small_sample_correction = true);

// build_design -> ols_fit -> cluster_cov on (ratee, year).
LinearFit fit_strategic_model(const AssessmentPanel &panel,
                              const DesignSpec &spec = {});

WaldResult wald_linear_test(const LinearFit &fit,
                            const Eigen::VectorXd &weights);

std::vector<PremiumEstimate> premium_estimates(const LinearFit &fit);

// w'beta where w is the algebraic difference of two premium definitions;
// for QualPremiumPeer - QualPremiumNonpeer this selects beta3 exactly.
double premium_difference(const LinearFit &fit, PremiumKind a, PremiumKind b);

} // namespace panelaudit
