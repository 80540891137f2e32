#pragma once

#include <Eigen/Dense>
#include <vector>

namespace walkdrift::wedge {

// k-element subsets of {0..d-1} in lexicographic order; the index set of the
// exterior-power coordinates.
std::vector<std::vector<int>> subsets(int d, int k);

// Compound matrix: the action of g on wedge^k R^d in the lexicographic minor
// basis, materialized densely (C(d,k) square).
Eigen::MatrixXd wedge_matrix(const Eigen::MatrixXd& g, int k);

// Plucker coordinates of v_1 ^ ... ^ v_k for the d x k matrix of columns.
Eigen::VectorXd wedge_of_columns(const Eigen::MatrixXd& vectors);

// log of the operator norm (largest singular value).
double log_opnorm(const Eigen::MatrixXd& m);

// Sum of the top k log singular values of g; equals log||wedge^k g||_op by
// Cauchy-Binet (cross-checked in tests against the dense compound matrix).
double log_opnorm_wedge(const Eigen::MatrixXd& g, int k);

}  // namespace walkdrift::wedge
