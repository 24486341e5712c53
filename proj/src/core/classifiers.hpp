#pragma once

#include <Eigen/Core>
#include <span>
#include <string>
#include <vector>

namespace gestid {

// Samples are stored as matrix columns throughout: X is (dimension x count).

struct PcaModel {
  Eigen::VectorXd mean;        // p
  Eigen::MatrixXd components;  // p' x p, orthonormal rows
  Eigen::VectorXd eigenvalues; // p', descending, non-negative

  Eigen::Index input_dim() const { return mean.size(); }
  Eigen::Index output_dim() const { return components.rows(); }

  Eigen::VectorXd transform(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd transform_all(const Eigen::MatrixXd& x) const;
};

// Centers the data and keeps the top p' eigenvectors of the sample
// covariance (divisor n - 1). When n < p the n x n Gram matrix is
// decomposed instead and its eigenvectors mapped back.
PcaModel pca_fit(const Eigen::MatrixXd& x, int output_dim);

struct LdaModel {
  Eigen::MatrixXd projection;      // d x p', canonical vectors as rows
  Eigen::VectorXd eigenvalues;     // all canonical eigenvalues, descending
  std::vector<int> classes;        // ascending
  Eigen::MatrixXd class_means;     // p' x k, input space
  Eigen::MatrixXd projected_means; // d x k
  bool used_pseudoinverse = false;

  int dims() const { return static_cast<int>(projection.rows()); }
  Eigen::MatrixXd project(const Eigen::MatrixXd& x) const;
  // Nearest projected class mean; ties go to the smaller label.
  int predict(const Eigen::VectorXd& x) const;
};

LdaModel lda_fit(const Eigen::MatrixXd& x, std::span<const int> labels, int dims);

struct KnnModel {
  Eigen::MatrixXd references;
  std::vector<int> labels;
  int k = 1;

  // Indices of the `count` nearest references ordered by (distance, index).
  std::vector<Eigen::Index> nearest(const Eigen::VectorXd& x, int count) const;
  // Majority label among the first `k` of `neighbours`; ties go to the smaller label.
  int vote(std::span<const Eigen::Index> neighbours, int k) const;
  int predict(const Eigen::VectorXd& x) const;
};

KnnModel knn_fit(const Eigen::MatrixXd& x, std::span<const int> labels, int k);

enum class KernelType { linear, rbf };

struct Kernel {
  KernelType type = KernelType::rbf;
  double gamma = 1.0;

  double operator()(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;
  // Kernel value from a precomputed squared distance (rbf) or dot product (linear).
  double from_sq_distance(double sq) const;
};

struct BinaryMachine {
  int negative_class = 0;  // the smaller label, y = -1
  int positive_class = 0;  // y = +1
  Eigen::MatrixXd support_vectors;
  Eigen::VectorXd alpha;  // 0 <= alpha <= C
  Eigen::VectorXd coef;   // alpha * y
  double bias = 0.0;
  bool converged = true;
  long iterations = 0;

  double decision(const Kernel& kernel, const Eigen::VectorXd& x) const;
};

struct SvmModel {
  Kernel kernel;
  double c = 1.0;
  std::vector<int> classes;
  std::vector<BinaryMachine> machines;  // one per unordered class pair

  // One-vs-one vote. Ties go to the class with the largest summed |decision|
  // over the machines it won, then to the smaller label.
  int predict(const Eigen::VectorXd& x) const;
};

struct SvmOptions {
  double tol = 1e-3;
};

// Squared Euclidean distances between all columns of x.
Eigen::MatrixXd pairwise_sq_distances(const Eigen::MatrixXd& x);

// sq_distances, when given, must be pairwise_sq_distances(x); it lets callers
// share the distance computation across many rbf fits.
SvmModel svm_fit(const Eigen::MatrixXd& x, std::span<const int> labels, const Kernel& kernel, double c,
                 const SvmOptions& options = {}, const Eigen::MatrixXd* sq_distances = nullptr);

}  // namespace gestid
