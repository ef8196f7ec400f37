#include "panelaudit/kernels.hpp"

#include <map>

namespace panelaudit::kernels {

Eigen::MatrixXd crossprod_serial(const Eigen::MatrixXd &x) {
  const Eigen::Index p = x.cols();
  Eigen::MatrixXd out(p, p);
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = j; i < p; ++i) {
      const double v = x.col(i).dot(x.col(j));
      out(i, j) = v;
      out(j, i) = v;
    }
  return out;
}

Eigen::MatrixXd crossprod_omp(const Eigen::MatrixXd &x) {
  const Eigen::Index p = x.cols();
  Eigen::MatrixXd out(p, p);
  // Each (i,j) cell is an independent serial dot product, so the result
  // does not depend on the thread count.
#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index i = j; i < p; ++i) {
      const double v = x.col(i).dot(x.col(j));
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

namespace {

Eigen::MatrixXd cluster_scores(const Eigen::MatrixXd &x,
                               const Eigen::VectorXd &residuals,
                               const std::vector<int> &cluster, int n_clusters,
                               bool parallel) {
  const Eigen::Index n = x.rows(), p = x.cols();
  // Per-cluster score vectors s_g = X_g' e_g, accumulated serially per
  // cluster; rows are grouped by cluster first so each column of the
  // score matrix is owned by exactly one task.
  std::vector<std::vector<Eigen::Index>> rows_of(n_clusters);
  for (Eigen::Index i = 0; i < n; ++i)
    rows_of[cluster[static_cast<size_t>(i)]].push_back(i);

  Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(p, n_clusters);
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int g = 0; g < n_clusters; ++g)
    for (Eigen::Index i : rows_of[static_cast<size_t>(g)])
      scores.col(g) += x.row(i).transpose() * residuals(i);
  return scores;
}

} // namespace

Eigen::MatrixXd cluster_meat_serial(const Eigen::MatrixXd &x,
                                    const Eigen::VectorXd &residuals,
                                    const std::vector<int> &cluster,
                                    int n_clusters) {
  const Eigen::MatrixXd s =
      cluster_scores(x, residuals, cluster, n_clusters, false);
  return crossprod_serial(s.transpose());
}

Eigen::MatrixXd cluster_meat_omp(const Eigen::MatrixXd &x,
                                 const Eigen::VectorXd &residuals,
                                 const std::vector<int> &cluster,
                                 int n_clusters) {
  const Eigen::MatrixXd s =
      cluster_scores(x, residuals, cluster, n_clusters, true);
  return crossprod_omp(s.transpose());
}

Eigen::MatrixXd crossprod(const Eigen::MatrixXd &x) {
  return x.cols() >= 32 ? crossprod_omp(x) : crossprod_serial(x);
}

Eigen::MatrixXd cluster_meat(const Eigen::MatrixXd &x,
                             const Eigen::VectorXd &residuals,
                             const std::vector<int> &cluster, int n_clusters) {
  return n_clusters >= 16
             ? cluster_meat_omp(x, residuals, cluster, n_clusters)
             : cluster_meat_serial(x, residuals, cluster, n_clusters);
}

int densify_labels(const std::vector<std::string> &labels,
                   std::vector<int> &out) {
  std::map<std::string, int> ids;
  out.clear();
  out.reserve(labels.size());
  for (const auto &label : labels) {
    auto [it, inserted] = ids.try_emplace(label, static_cast<int>(ids.size()));
    out.push_back(it->second);
  }
  return static_cast<int>(ids.size());
}

} // namespace panelaudit::kernels
