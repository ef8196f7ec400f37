#include "panelaudit/regress.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <set>

#include "panelaudit/errors.hpp"
#include "panelaudit/kernels.hpp"
#include "panelaudit/stats.hpp"

namespace panelaudit {

const char *sample_filter_name(SampleFilter f) {
  switch (f) {
    case SampleFilter::ExcludeSelf: return "exclude_self";
    case SampleFilter::All: return "all";
    case SampleFilter::ExcludeSelfAndHead: return "exclude_self_and_head";
  }
  return "?";
}

int LinearFit::index_of(const std::string &name) const {
  for (size_t i = 0; i < column_names.size(); ++i)
    if (column_names[i] == name) return static_cast<int>(i);
  return -1;
}

double LinearFit::se(int index) const {
  return std::sqrt(covariance(index, index));
}

FactorEncoding encode_factor(const std::string &prefix,
                             const std::vector<std::string> &values) {
  FactorEncoding enc;
  std::set<std::string> levels(values.begin(), values.end());
  enc.levels.assign(levels.begin(), levels.end());
  for (size_t i = 1; i < enc.levels.size(); ++i)
    enc.column_names.push_back(prefix + enc.levels[i]);
  return enc;
}

Design build_design(const AssessmentPanel &panel, const DesignSpec &spec) {
  std::vector<size_t> rows;
  for (size_t i = 0; i < panel.records().size(); ++i) {
    const Relation rel = panel.records()[i].relation;
    if (rel == Relation::Self && spec.sample_filter != SampleFilter::All)
      continue;
    if (rel == Relation::Head &&
        spec.sample_filter == SampleFilter::ExcludeSelfAndHead)
      continue;
    rows.push_back(i);
  }
  if (rows.empty())
    throw make_error("EmptySample", "sample filter removed every record");

  std::vector<std::string> rank_vals, ratee_vals, dept_vals, year_vals;
  for (size_t i : rows) {
    const auto &rec = panel.records()[i];
    const EmployeeYear *ratee = panel.find(rec.ratee_id, rec.year);
    rank_vals.push_back(std::to_string(ratee->rank));
    ratee_vals.push_back(rec.ratee_id);
    dept_vals.push_back(ratee->department_id);
    year_vals.push_back(std::to_string(rec.year));
  }
  const auto f_rank = encode_factor("rank_", rank_vals);
  const auto f_ratee = encode_factor("ratee_", ratee_vals);
  const auto f_dept = encode_factor("dept_", dept_vals);
  const auto f_year = encode_factor("year_", year_vals);

  Design d;
  d.column_names = {"intercept", "peer", "qual", "peer_x_qual"};
  for (const auto *f : {&f_rank, &f_ratee, &f_dept, &f_year})
    d.column_names.insert(d.column_names.end(), f->column_names.begin(),
                          f->column_names.end());

  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index p = static_cast<Eigen::Index>(d.column_names.size());
  d.x = Eigen::MatrixXd::Zero(n, p);
  d.y.resize(n);
  d.cluster_ratee.reserve(rows.size());
  d.cluster_year.reserve(rows.size());

  auto dummy_block = [](const FactorEncoding &enc, const std::string &value,
                        Eigen::MatrixXd &x, Eigen::Index row,
                        Eigen::Index offset) {
    for (size_t k = 1; k < enc.levels.size(); ++k)
      if (enc.levels[k] == value) {
        x(row, offset + static_cast<Eigen::Index>(k) - 1) = 1.0;
        break;
      }
  };

  for (Eigen::Index r = 0; r < n; ++r) {
    const auto &rec = panel.records()[rows[static_cast<size_t>(r)]];
    const EmployeeYear *ratee = panel.find(rec.ratee_id, rec.year);
    const double peer = rec.relation == Relation::Peer ? 1.0 : 0.0;
    const double qual = ratee->qual ? 1.0 : 0.0;
    d.x(r, 0) = 1.0;
    d.x(r, 1) = peer;
    d.x(r, 2) = qual;
    d.x(r, 3) = peer * qual;
    Eigen::Index off = 4;
    dummy_block(f_rank, rank_vals[static_cast<size_t>(r)], d.x, r, off);
    off += static_cast<Eigen::Index>(f_rank.column_names.size());
    dummy_block(f_ratee, rec.ratee_id, d.x, r, off);
    off += static_cast<Eigen::Index>(f_ratee.column_names.size());
    dummy_block(f_dept, ratee->department_id, d.x, r, off);
    off += static_cast<Eigen::Index>(f_dept.column_names.size());
    dummy_block(f_year, std::to_string(rec.year), d.x, r, off);
    d.y(r) = rec.rating;
    d.cluster_ratee.push_back(rec.ratee_id);
    d.cluster_year.push_back(std::to_string(rec.year));
  }
  return d;
}

LinearFit ols_fit(const Eigen::MatrixXd &x, const Eigen::VectorXd &y,
                  const std::vector<std::string> &column_names) {
  if (static_cast<size_t>(x.cols()) != column_names.size())
    throw make_error("DimensionMismatch", "column names vs design width");

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-10); // pivot below 1e-10 * max pivot is rank-deficient
  const Eigen::Index rank = qr.rank();
  if (rank >= x.rows())
    throw make_error("Underdetermined",
                     "retained columns >= rows (" + std::to_string(rank) +
                         " >= " + std::to_string(x.rows()) + ")");

  const auto &perm = qr.colsPermutation().indices();
  std::vector<Eigen::Index> retained(perm.data(), perm.data() + rank);
  std::sort(retained.begin(), retained.end()); // keep design column order

  LinearFit fit;
  std::set<Eigen::Index> retained_set(retained.begin(), retained.end());
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    if (!retained_set.count(j)) fit.dropped_columns.push_back(column_names[j]);

  Eigen::MatrixXd xr(x.rows(), rank);
  for (Eigen::Index k = 0; k < rank; ++k) xr.col(k) = x.col(retained[k]);
  for (Eigen::Index k = 0; k < rank; ++k)
    fit.column_names.push_back(column_names[retained[k]]);

  fit.beta = xr.householderQr().solve(y);
  fit.residuals = y - xr * fit.beta;
  fit.n_obs = static_cast<long>(x.rows());

  const double ybar = y.mean();
  const double sst = (y.array() - ybar).square().sum();
  const double ssr = fit.residuals.squaredNorm();
  fit.r2 = sst > 0.0 ? 1.0 - ssr / sst : 1.0;
  // p = retained non-intercept columns
  const double p_slopes =
      static_cast<double>(rank) -
      (std::find(fit.column_names.begin(), fit.column_names.end(),
                 "intercept") != fit.column_names.end()
           ? 1.0
           : 0.0);
  const double n = static_cast<double>(fit.n_obs);
  fit.adj_r2 = 1.0 - (1.0 - fit.r2) * (n - 1.0) / (n - p_slopes - 1.0);
  return fit;
}

namespace {

Eigen::MatrixXd one_way_sandwich(const Eigen::MatrixXd &bread,
                                 const Eigen::MatrixXd &x_retained,
                                 const Eigen::VectorXd &residuals,
                                 const std::vector<std::string> &labels,
                                 bool correction, const char *factor_name) {
  std::vector<int> ids;
  const int g = kernels::densify_labels(labels, ids);
  if (g <= 1)
    throw make_error("SingleCluster",
                     std::string("factor ") + factor_name + " has one cluster");
  const Eigen::MatrixXd meat =
      kernels::cluster_meat(x_retained, residuals, ids, g);
  double c = 1.0;
  if (correction) {
    const double n = static_cast<double>(x_retained.rows());
    const double p = static_cast<double>(x_retained.cols());
    c = (static_cast<double>(g) / (g - 1.0)) * ((n - 1.0) / (n - p));
  }
  return c * bread * meat * bread;
}

} // namespace

Eigen::MatrixXd cluster_cov(LinearFit &fit, const Eigen::MatrixXd &x_retained,
                            const std::vector<std::string> &labels_a,
                            const std::vector<std::string> &labels_b,
                            bool small_sample_correction) {
  if (static_cast<size_t>(x_retained.rows()) != labels_a.size() ||
      labels_a.size() != labels_b.size())
    throw make_error("DimensionMismatch", "cluster labels vs rows");

  const Eigen::MatrixXd xtx = kernels::crossprod(x_retained);
  const Eigen::MatrixXd bread =
      xtx.ldlt().solve(Eigen::MatrixXd::Identity(xtx.rows(), xtx.cols()));

  std::vector<std::string> labels_ab(labels_a.size());
  for (size_t i = 0; i < labels_a.size(); ++i)
    labels_ab[i] = labels_a[i] + "\x1f" + labels_b[i];

  Eigen::MatrixXd v =
      one_way_sandwich(bread, x_retained, fit.residuals, labels_a,
                       small_sample_correction, "a") +
      one_way_sandwich(bread, x_retained, fit.residuals, labels_b,
                       small_sample_correction, "b") -
      one_way_sandwich(bread, x_retained, fit.residuals, labels_ab,
                       small_sample_correction, "a*b");
  v = 0.5 * (v + v.transpose().eval());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(v);
  if (es.eigenvalues().minCoeff() < 0.0) {
    Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
    v = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose();
    fit.cov_clipped = true;
  }
  fit.covariance = v;
  return v;
}

LinearFit fit_strategic_model(const AssessmentPanel &panel,
                              const DesignSpec &spec) {
  Design d = build_design(panel, spec);
  LinearFit fit = ols_fit(d.x, d.y, d.column_names);

  Eigen::MatrixXd xr(d.x.rows(),
                     static_cast<Eigen::Index>(fit.column_names.size()));
  Eigen::Index k = 0;
  for (size_t j = 0; j < d.column_names.size(); ++j) {
    if (std::find(fit.dropped_columns.begin(), fit.dropped_columns.end(),
                  d.column_names[j]) != fit.dropped_columns.end())
      continue;
    xr.col(k++) = d.x.col(static_cast<Eigen::Index>(j));
  }
  cluster_cov(fit, xr, d.cluster_ratee, d.cluster_year,
              spec.small_sample_correction);
  return fit;
}

WaldResult wald_linear_test(const LinearFit &fit,
                            const Eigen::VectorXd &weights) {
  if (weights.size() != fit.beta.size())
    throw make_error("DimensionMismatch", "weights vs retained coefficients");
  if (weights.isZero(0.0))
    throw make_error("DegenerateWeights", "all-zero weight vector");
  if (fit.covariance.size() == 0)
    throw make_error("MissingCovariance", "fit has no covariance");
  WaldResult w;
  // Sum only the selected terms so unit weight vectors return the
  // coefficient itself, bit-for-bit.
  for (Eigen::Index i = 0; i < weights.size(); ++i)
    if (weights(i) != 0.0) w.estimate += weights(i) * fit.beta(i);
  w.std_error = std::sqrt(weights.dot(fit.covariance * weights));
  w.z = w.std_error > 0.0 ? w.estimate / w.std_error
                          : std::numeric_limits<double>::infinity();
  w.p = stats::normal_two_sided(w.z);
  return w;
}

namespace {

Eigen::VectorXd premium_weights(const LinearFit &fit, PremiumKind kind) {
  const int i_peer = fit.index_of("peer");
  const int i_qual = fit.index_of("qual");
  const int i_int = fit.index_of("peer_x_qual");
  if (i_peer < 0 || i_qual < 0 || i_int < 0)
    throw make_error("MissingCoefficient",
                     "peer/qual/interaction dropped from the fit");
  Eigen::VectorXd w = Eigen::VectorXd::Zero(fit.beta.size());
  switch (kind) {
    case PremiumKind::QualPremiumPeer:
      w(i_qual) = 1.0;
      w(i_int) = 1.0;
      break;
    case PremiumKind::QualPremiumNonpeer:
      w(i_qual) = 1.0;
      break;
    case PremiumKind::PeerDiffQualified:
      w(i_peer) = 1.0;
      w(i_int) = 1.0;
      break;
    case PremiumKind::PeerDiffUnqualified:
      w(i_peer) = 1.0;
      break;
  }
  return w;
}

} // namespace

std::vector<PremiumEstimate> premium_estimates(const LinearFit &fit) {
  std::vector<PremiumEstimate> out;
  for (PremiumKind kind :
       {PremiumKind::QualPremiumPeer, PremiumKind::QualPremiumNonpeer,
        PremiumKind::PeerDiffQualified, PremiumKind::PeerDiffUnqualified}) {
    const WaldResult w = wald_linear_test(fit, premium_weights(fit, kind));
    out.push_back({kind, w.estimate, w.std_error, w.z, w.p});
  }
  return out;
}

double premium_difference(const LinearFit &fit, PremiumKind a, PremiumKind b) {
  const Eigen::VectorXd w = premium_weights(fit, a) - premium_weights(fit, b);
  double value = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (w(i) != 0.0) value += w(i) * fit.beta(i);
  return value;
}

} // namespace panelaudit
