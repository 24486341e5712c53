#pragma once

// Reference implementations used only by the tests. They are deliberately
// naive (explicit loops, long double accumulation, Eigen's own solvers) and
// share no code with the library beyond the Rng used to draw inputs.

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "classifiers.hpp"
#include "dataset.hpp"
#include "rng.hpp"

namespace oracle {

// ---- generators ----

Eigen::MatrixXd random_matrix(gestid::Rng& rng, Eigen::Index rows, Eigen::Index cols, double scale = 1.0);
Eigen::MatrixXd random_symmetric(gestid::Rng& rng, Eigen::Index n);
// A = G G^T with G n x rank, so rank(A) = rank almost surely.
Eigen::MatrixXd random_psd(gestid::Rng& rng, Eigen::Index n, Eigen::Index rank);

struct Labeled {
  Eigen::MatrixXd x;  // d x n
  std::vector<int> labels;
};

// k Gaussian blobs with centres drawn at the given spread.
Labeled blobs(gestid::Rng& rng, int classes, int per_class, int dims, double spread, double sigma = 1.0);
// Coordinates drawn from {0, .., levels-1}; produces many exact distance ties.
Labeled integer_grid(gestid::Rng& rng, int classes, int n, int dims, int levels);

gestid::Recording random_recording(gestid::Rng& rng, int sensors, int steps);

// ---- oracles ----

// Linear interpolation at time `at` by scanning for the enclosing segment.
double interpolate(const std::vector<double>& times, const std::vector<double>& values, double at);

struct Moments {
  double mean = 0.0;
  double stddev = 0.0;
};
// Population statistics of row `row` pooled over every matrix.
Moments pooled_row(const std::vector<Eigen::MatrixXd>& mats, Eigen::Index row);

// Exhaustive scan: sort all references by (squared distance, index), vote
// over the first k, ties to the smallest label.
int knn_label(const Eigen::MatrixXd& refs, const std::vector<int>& labels, int k, const Eigen::VectorXd& q);

// Largest violation of the soft-margin KKT conditions, in units of the
// functional margin y_i f(x_i), plus the equality and box constraints.
double kkt_violation(const Eigen::MatrixXd& kernel, const Eigen::VectorXd& y, double c, const Eigen::VectorXd& alpha,
                     double bias);

// W^{-1} (mean_0 - mean_1) for a two-class problem.
Eigen::VectorXd fisher_direction(const Eigen::MatrixXd& x, const std::vector<int>& labels);

// Projections of x onto the top `dims` covariance eigenvectors, from the
// explicitly formed covariance matrix and Eigen's solver.
Eigen::MatrixXd pca_scores(const Eigen::MatrixXd& x, int dims);

// Decision value rebuilt from the support vectors with an independently
// coded kernel.
double svm_decision(const gestid::BinaryMachine& m, gestid::KernelType type, double gamma, const Eigen::VectorXd& q);

std::vector<std::size_t> count_confusion(const std::vector<int>& truth, const std::vector<int>& pred,
                                         std::size_t classes);

struct Penrose {
  double axa, xax, ax_sym, xa_sym;  // relative residuals of the four identities
  double worst() const;
};
Penrose penrose(const Eigen::MatrixXd& a, const Eigen::MatrixXd& x);

double reconstruction_residual(const Eigen::MatrixXd& a, const Eigen::VectorXd& values, const Eigen::MatrixXd& vectors);

}  // namespace oracle
