#include "classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "decomp.hpp"
#include "errors.hpp"
#include "log.hpp"

namespace gestid {

namespace {

void check_dim(Eigen::Index got, Eigen::Index want, const char* what) {
  if (got != want)
    throw DataError(std::string(what) + ": dimension mismatch (got " + std::to_string(got) + ", model expects " +
                    std::to_string(want) + ")");
}

void check_labels(const Eigen::MatrixXd& x, std::span<const int> labels, const char* what) {
  if (static_cast<Eigen::Index>(labels.size()) != x.cols())
    throw UsageError(std::string(what) + ": " + std::to_string(labels.size()) + " labels for " +
                     std::to_string(x.cols()) + " samples");
}

std::vector<int> distinct(std::span<const int> labels) {
  std::set<int> s(labels.begin(), labels.end());
  return {s.begin(), s.end()};
}

// Modified Gram-Schmidt over the rows of m, in place.
void orthonormalize_rows(Eigen::MatrixXd& m, Eigen::Index count) {
  for (Eigen::Index i = 0; i < count; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) m.row(i) -= m.row(i).dot(m.row(j)) * m.row(j);
    m.row(i).normalize();
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// PCA

Eigen::VectorXd PcaModel::transform(const Eigen::VectorXd& x) const {
  check_dim(x.size(), mean.size(), "pca_transform");
  return components * (x - mean);
}

Eigen::MatrixXd PcaModel::transform_all(const Eigen::MatrixXd& x) const {
  check_dim(x.rows(), mean.size(), "pca_transform");
  return components * (x.colwise() - mean);
}

PcaModel pca_fit(const Eigen::MatrixXd& x, int output_dim) {
  const Eigen::Index p = x.rows();
  const Eigen::Index n = x.cols();
  if (n < 2) throw DataError("pca_fit needs at least 2 samples");
  if (output_dim < 1 || output_dim > std::min(p, n))
    throw UsageError("pca_fit: component count " + std::to_string(output_dim) + " outside 1.." +
                     std::to_string(std::min(p, n)));

  PcaModel model;
  model.mean = x.rowwise().mean();
  const Eigen::MatrixXd xc = x.colwise() - model.mean;
  const double denom = static_cast<double>(n - 1);
  model.components.resize(output_dim, p);
  model.eigenvalues.resize(output_dim);

  if (n >= p) {
    const Eigen::MatrixXd cov = (xc * xc.transpose()) / denom;
    const auto eig = eig_symmetric(cov);
    for (int i = 0; i < output_dim; ++i) {
      model.components.row(i) = eig.vectors.col(i).transpose();
      model.eigenvalues(i) = std::max(eig.values(i), 0.0);
    }
    return model;
  }

  // Gram route: if (Xc'Xc/(n-1)) u = l u then Xc u / sqrt((n-1) l) is a unit
  // eigenvector of the covariance with the same eigenvalue.
  const Eigen::MatrixXd gram = (xc.transpose() * xc) / denom;
  const auto eig = eig_symmetric(gram);
  const double cutoff = 1e-10 * std::max(eig.values(0), 0.0);
  Eigen::Index mapped = 0;
  for (; mapped < output_dim; ++mapped) {
    const double l = eig.values(mapped);
    if (!(l > cutoff)) break;
    model.components.row(mapped) = (xc * eig.vectors.col(mapped)).transpose() / std::sqrt(denom * l);
    model.eigenvalues(mapped) = l;
  }
  orthonormalize_rows(model.components, mapped);

  // Zero-variance directions: complete the basis from the coordinate axes.
  Eigen::Index filled = mapped;
  for (Eigen::Index axis = 0; axis < p && filled < output_dim; ++axis) {
    Eigen::RowVectorXd e = Eigen::RowVectorXd::Unit(p, axis);
    for (Eigen::Index j = 0; j < filled; ++j) e -= e.dot(model.components.row(j)) * model.components.row(j);
    for (Eigen::Index j = 0; j < filled; ++j) e -= e.dot(model.components.row(j)) * model.components.row(j);
    const double norm = e.norm();
    if (norm < 1e-6) continue;
    model.components.row(filled) = e / norm;
    model.eigenvalues(filled) = 0.0;
    ++filled;
  }
  for (Eigen::Index i = 0; i < output_dim; ++i) {
    Eigen::VectorXd row = model.components.row(i).transpose();
    canonicalize_sign(row);
    model.components.row(i) = row.transpose();
  }
  return model;
}

// ---------------------------------------------------------------------------
// LDA

Eigen::MatrixXd LdaModel::project(const Eigen::MatrixXd& x) const {
  check_dim(x.rows(), projection.cols(), "lda_project");
  return projection * x;
}

int LdaModel::predict(const Eigen::VectorXd& x) const {
  check_dim(x.size(), projection.cols(), "lda_predict");
  const Eigen::VectorXd z = projection * x;
  int best = classes.front();
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < classes.size(); ++j) {
    const double d = (z - projected_means.col(static_cast<Eigen::Index>(j))).norm();
    if (d < best_dist) {
      best_dist = d;
      best = classes[j];
    }
  }
  return best;
}

LdaModel lda_fit(const Eigen::MatrixXd& x, std::span<const int> labels, int dims) {
  check_labels(x, labels, "lda_fit");
  const Eigen::Index p = x.rows();
  const Eigen::Index n = x.cols();
  LdaModel model;
  model.classes = distinct(labels);
  const Eigen::Index k = static_cast<Eigen::Index>(model.classes.size());
  if (k < 2) throw DataError("lda_fit: need >= 2 classes, got " + std::to_string(k));
  if (n <= k) throw DataError("lda_fit: need more samples than classes");
  if (dims < 1) throw UsageError("lda_fit: d must be >= 1");
  if (dims > k - 1)
    throw UsageError("lda_fit: d=" + std::to_string(dims) + " exceeds the achievable maximum " + std::to_string(k - 1) +
                     " (classes - 1)");

  std::map<int, Eigen::Index> slot;
  for (Eigen::Index j = 0; j < k; ++j) slot[model.classes[static_cast<std::size_t>(j)]] = j;
  model.class_means = Eigen::MatrixXd::Zero(p, k);
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(k);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index j = slot[labels[static_cast<std::size_t>(i)]];
    model.class_means.col(j) += x.col(i);
    counts(j) += 1.0;
  }
  for (Eigen::Index j = 0; j < k; ++j) model.class_means.col(j) /= counts(j);

  // Between-class scatter around the mean of class means, 1/(k-1) prefactor.
  const Eigen::VectorXd grand = model.class_means.rowwise().mean();
  Eigen::MatrixXd between = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index j = 0; j < k; ++j) {
    const Eigen::VectorXd d = model.class_means.col(j) - grand;
    between.noalias() += counts(j) * d * d.transpose();
  }
  between /= static_cast<double>(k - 1);

  // Within-class scatter, 1/(n-k) prefactor.
  Eigen::MatrixXd dev(p, n);
  for (Eigen::Index i = 0; i < n; ++i) dev.col(i) = x.col(i) - model.class_means.col(slot[labels[static_cast<std::size_t>(i)]]);
  const Eigen::MatrixXd within = (dev * dev.transpose()) / static_cast<double>(n - k);

  // W = U S U'. With S^-1/2 restricted to the non-null part of W, the
  // eigenvectors z of S^-1/2 U'BU S^-1/2 give canonical vectors
  // U S^-1/2 z of W^-1 B (or of W^+ B when W is singular).
  const auto w_eig = eig_symmetric(within);
  const double w_max = std::max(w_eig.values(0), 0.0);
  if (!(w_max > 0.0)) throw NumericalError("lda_fit: within-class scatter is zero");
  Eigen::Index rank = 0;
  while (rank < p && w_eig.values(rank) > kDefaultRankTol * w_max) ++rank;
  model.used_pseudoinverse = rank < p;
  const Eigen::MatrixXd whiten =
      w_eig.vectors.leftCols(rank) * w_eig.values.head(rank).cwiseSqrt().cwiseInverse().asDiagonal();
  const Eigen::MatrixXd reduced = whiten.transpose() * between * whiten;
  const auto b_eig = eig_symmetric(0.5 * (reduced + reduced.transpose()));
  model.eigenvalues = b_eig.values;

  const double b_max = b_eig.values.size() > 0 ? b_eig.values(0) : 0.0;
  if (!(b_max > 0.0)) throw NumericalError("lda_fit: between-class scatter is zero (class means coincide)");
  int b_rank = 0;
  while (b_rank < b_eig.values.size() && b_eig.values(b_rank) > kDefaultRankTol * b_max) ++b_rank;
  if (dims > b_rank)
    throw UsageError("lda_fit: d=" + std::to_string(dims) + " exceeds the achievable maximum " +
                     std::to_string(b_rank) + " (rank of the between-class scatter)");

  model.projection.resize(dims, p);
  for (int i = 0; i < dims; ++i) {
    Eigen::VectorXd v = whiten * b_eig.vectors.col(i);
    canonicalize_sign(v);
    model.projection.row(i) = v.transpose();
  }
  model.projected_means = model.projection * model.class_means;
  return model;
}

// ---------------------------------------------------------------------------
// k-NN

std::vector<Eigen::Index> KnnModel::nearest(const Eigen::VectorXd& x, int count) const {
  check_dim(x.size(), references.rows(), "knn_predict");
  const Eigen::Index n = references.cols();
  const Eigen::Index dim = references.rows();
  std::vector<double> dist(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double* r = references.col(i).data();
    double s = 0.0;
    for (Eigen::Index d = 0; d < dim; ++d) {
      const double diff = x(d) - r[d];
      s += diff * diff;
    }
    dist[static_cast<std::size_t>(i)] = s;
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const auto take = std::min<std::size_t>(static_cast<std::size_t>(std::max(count, 0)), order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                    [&](Eigen::Index a, Eigen::Index b) {
                      const double da = dist[static_cast<std::size_t>(a)];
                      const double db = dist[static_cast<std::size_t>(b)];
                      return da < db || (da == db && a < b);
                    });
  order.resize(take);
  return order;
}

int KnnModel::vote(std::span<const Eigen::Index> neighbours, int count) const {
  std::map<int, int> votes;
  for (int i = 0; i < count && i < static_cast<int>(neighbours.size()); ++i)
    ++votes[labels[static_cast<std::size_t>(neighbours[static_cast<std::size_t>(i)])]];
  int best = 0, best_votes = -1;
  for (const auto& [label, v] : votes) {  // ascending label order
    if (v > best_votes) {
      best_votes = v;
      best = label;
    }
  }
  return best;
}

int KnnModel::predict(const Eigen::VectorXd& x) const {
  const auto nn = nearest(x, k);
  return vote(nn, k);
}

KnnModel knn_fit(const Eigen::MatrixXd& x, std::span<const int> labels, int k) {
  check_labels(x, labels, "knn_fit");
  if (k < 1) throw UsageError("knn_fit: k must be >= 1");
  if (k > x.cols())
    throw UsageError("knn_fit: k=" + std::to_string(k) + " exceeds the reference count " + std::to_string(x.cols()));
  return KnnModel{x, std::vector<int>(labels.begin(), labels.end()), k};
}

// ---------------------------------------------------------------------------
// SVM

double Kernel::operator()(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
  if (type == KernelType::linear) return a.dot(b);
  return std::exp(-gamma * (a - b).squaredNorm());
}

double Kernel::from_sq_distance(double sq) const { return std::exp(-gamma * sq); }

double BinaryMachine::decision(const Kernel& kernel, const Eigen::VectorXd& x) const {
  double s = bias;
  for (Eigen::Index i = 0; i < support_vectors.cols(); ++i) s += coef(i) * kernel(support_vectors.col(i), x);
  return s;
}

int SvmModel::predict(const Eigen::VectorXd& x) const {
  if (!machines.empty()) check_dim(x.size(), machines.front().support_vectors.rows(), "svm_predict");
  std::map<int, std::pair<int, double>> tally;  // label -> (votes, summed |decision|)
  for (int c : classes) tally[c] = {0, 0.0};
  for (const auto& m : machines) {
    const double d = m.decision(kernel, x);
    auto& t = tally[d > 0.0 ? m.positive_class : m.negative_class];
    t.first += 1;
    t.second += std::abs(d);
  }
  int best = classes.front();
  std::pair<int, double> best_score{-1, -1.0};
  for (const auto& [label, score] : tally)
    if (score.first > best_score.first || (score.first == best_score.first && score.second > best_score.second)) {
      best_score = score;
      best = label;
    }
  return best;
}

Eigen::MatrixXd pairwise_sq_distances(const Eigen::MatrixXd& x) {
  // Same expression as the rbf kernel evaluation, so cached and direct values agree bitwise.
  const Eigen::Index n = x.cols();
  Eigen::MatrixXd d(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    d(j, j) = 0.0;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      d(i, j) = (x.col(i) - x.col(j)).squaredNorm();
      d(j, i) = d(i, j);
    }
  }
  return d;
}

SvmModel svm_fit(const Eigen::MatrixXd& x, std::span<const int> labels, const Kernel& kernel, double c,
                 const SvmOptions& options, const Eigen::MatrixXd* sq_distances) {
  check_labels(x, labels, "svm_fit");
  if (!(c > 0.0)) throw UsageError("svm_fit: C must be positive");
  if (kernel.type == KernelType::rbf && !(kernel.gamma > 0.0)) throw UsageError("svm_fit: gamma must be positive");
  if (sq_distances && (sq_distances->rows() != x.cols() || sq_distances->cols() != x.cols()))
    throw UsageError("svm_fit: distance cache does not match the sample count");

  SvmModel model;
  model.kernel = kernel;
  model.c = c;
  model.classes = distinct(labels);
  if (model.classes.size() < 2) throw DataError("svm_fit: need >= 2 classes");

  Eigen::MatrixXd local_distances;
  if (kernel.type == KernelType::rbf && !sq_distances) {
    local_distances = pairwise_sq_distances(x);
    sq_distances = &local_distances;
  }

  std::vector<std::string> unconverged;
  for (std::size_t a = 0; a < model.classes.size(); ++a) {
    for (std::size_t b = a + 1; b < model.classes.size(); ++b) {
      const int neg = model.classes[a];
      const int pos = model.classes[b];
      std::vector<Eigen::Index> idx;
      for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == neg || labels[i] == pos) idx.push_back(static_cast<Eigen::Index>(i));
      const auto n = static_cast<Eigen::Index>(idx.size());
      Eigen::VectorXd y(n);
      Eigen::MatrixXd gram(n, n);
      for (Eigen::Index r = 0; r < n; ++r) {
        y(r) = labels[static_cast<std::size_t>(idx[r])] == pos ? 1.0 : -1.0;
        for (Eigen::Index s = 0; s <= r; ++s) {
          const double v = kernel.type == KernelType::rbf ? kernel.from_sq_distance((*sq_distances)(idx[r], idx[s]))
                                                          : x.col(idx[r]).dot(x.col(idx[s]));
          gram(r, s) = v;
          gram(s, r) = v;
        }
      }
      QpOptions qp;
      qp.tol = options.tol;
      const auto sol = solve_box_qp(gram, y, c, qp);

      BinaryMachine m;
      m.negative_class = neg;
      m.positive_class = pos;
      m.bias = sol.bias;
      m.converged = sol.converged;
      m.iterations = sol.iterations;
      std::vector<Eigen::Index> support;
      for (Eigen::Index r = 0; r < n; ++r)
        if (sol.alpha(r) > 1e-12) support.push_back(r);
      const auto ns = static_cast<Eigen::Index>(support.size());
      m.support_vectors.resize(x.rows(), ns);
      m.alpha.resize(ns);
      m.coef.resize(ns);
      for (Eigen::Index s = 0; s < ns; ++s) {
        const Eigen::Index r = support[static_cast<std::size_t>(s)];
        m.support_vectors.col(s) = x.col(idx[r]);
        m.alpha(s) = sol.alpha(r);
        m.coef(s) = sol.alpha(r) * y(r);
      }
      if (!sol.converged) unconverged.push_back(std::to_string(neg) + "-vs-" + std::to_string(pos));
      model.machines.push_back(std::move(m));
    }
  }
  if (!unconverged.empty()) {
    std::string list;
    for (const auto& u : unconverged) list += (list.empty() ? "" : ", ") + u;
    warn("svm_fit: QP did not converge for machines " + list);
  }
  return model;
}

}  // namespace gestid
