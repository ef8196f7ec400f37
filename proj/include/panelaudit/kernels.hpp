#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace panelaudit::kernels {

// Hot dense kernels behind the regression path. Each has a serial
// reference version; the OpenMP versions partition work over output
// cells or clusters so results are bit-identical to the serial ones
// regardless of thread count.

Eigen::MatrixXd crossprod_serial(const Eigen::MatrixXd &x);
Eigen::MatrixXd crossprod_omp(const Eigen::MatrixXd &x);

// Sum over clusters g of (X_g' e_g)(X_g' e_g)'. `cluster` maps each row
// to a cluster id in [0, n_clusters).
Eigen::MatrixXd cluster_meat_serial(const Eigen::MatrixXd &x,
                                    const Eigen::VectorXd &residuals,
                                    const std::vector<int> &cluster,
                                    int n_clusters);
Eigen::MatrixXd cluster_meat_omp(const Eigen::MatrixXd &x,
                                 const Eigen::VectorXd &residuals,
                                 const std::vector<int> &cluster,
                                 int n_clusters);

// Dispatchers used by the regression code.
Eigen::MatrixXd crossprod(const Eigen::MatrixXd &x);
Eigen::MatrixXd cluster_meat(const Eigen::MatrixXd &x,
                             const Eigen::VectorXd &residuals,
                             const std::vector<int> &cluster, int n_clusters);

// Densifies string cluster labels to [0, n) preserving first-appearance
// order; returns the number of distinct clusters.
int densify_labels(const std::vector<std::string> &labels,
                   std::vector<int> &out);

} // namespace panelaudit::kernels
