#pragma once

#include <Eigen/Core>
#include <vector>

namespace gestid {

struct EigenResult {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // orthonormal columns, values(i) <-> vectors.col(i)
  int sweeps = 0;
};

constexpr int kJacobiMaxSweeps = 100;

// Cyclic Jacobi. Stops when the off-diagonal Frobenius norm drops below
// 1e-12 * ||A||_F. Each eigenvector is signed so that its largest-magnitude
// entry is positive. Throws UsageError on a non-symmetric input and
// NumericalError when the sweep cap is reached.
EigenResult eig_symmetric(const Eigen::MatrixXd& a);

// Flips v so that its largest-magnitude entry (first one on ties) is positive.
void canonicalize_sign(Eigen::Ref<Eigen::VectorXd> v);

constexpr double kDefaultRankTol = 1e-10;

// Moore-Penrose pseudoinverse of a symmetric positive semidefinite matrix.
// Eigenvalues at or below rank_tol * lambda_max are treated as zero.
Eigen::MatrixXd pinv(const Eigen::MatrixXd& a, double rank_tol = kDefaultRankTol);

struct QpOptions {
  double tol = 1e-3;
  long max_iterations = 0;  // 0: max(1000000, 100 n)
  bool record_objective = false;
};

struct QpSolution {
  Eigen::VectorXd alpha;
  double bias = 0.0;
  long iterations = 0;
  bool converged = false;
  std::vector<double> objective_trace;  // dual objective after each update
};

// Soft-margin SVM dual:
//   max  sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij
//   s.t. 0 <= alpha_i <= C,  sum_i alpha_i y_i = 0
// solved by SMO with maximal-violating-pair selection. The decision function
// is f(x_i) = sum_j alpha_j y_j K_ij + bias.
QpSolution solve_box_qp(const Eigen::MatrixXd& kernel, const Eigen::VectorXd& labels, double c,
                        const QpOptions& options = {});

}  // namespace gestid
