#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

namespace oracle {

Eigen::MatrixXd random_matrix(gestid::Rng& rng, Eigen::Index rows, Eigen::Index cols, double scale) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = scale * rng.normal();
  return m;
}

Eigen::MatrixXd random_symmetric(gestid::Rng& rng, Eigen::Index n) {
  const Eigen::MatrixXd g = random_matrix(rng, n, n);
  return 0.5 * (g + g.transpose());
}

Eigen::MatrixXd random_psd(gestid::Rng& rng, Eigen::Index n, Eigen::Index rank) {
  const Eigen::MatrixXd g = random_matrix(rng, n, rank);
  Eigen::MatrixXd a = g * g.transpose();
  return 0.5 * (a + a.transpose());
}

Labeled blobs(gestid::Rng& rng, int classes, int per_class, int dims, double spread, double sigma) {
  Labeled out;
  out.x.resize(dims, classes * per_class);
  const Eigen::MatrixXd centres = random_matrix(rng, dims, classes, spread);
  int col = 0;
  for (int c = 0; c < classes; ++c)
    for (int i = 0; i < per_class; ++i, ++col) {
      for (int d = 0; d < dims; ++d) out.x(d, col) = centres(d, c) + sigma * rng.normal();
      out.labels.push_back(c);
    }
  return out;
}

Labeled integer_grid(gestid::Rng& rng, int classes, int n, int dims, int levels) {
  Labeled out;
  out.x.resize(dims, n);
  for (int j = 0; j < n; ++j) {
    for (int d = 0; d < dims; ++d) out.x(d, j) = static_cast<double>(rng.below(static_cast<std::uint64_t>(levels)));
    out.labels.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(classes))));
  }
  return out;
}

gestid::Recording random_recording(gestid::Rng& rng, int sensors, int steps) {
  gestid::Recording r;
  r.performer = "p01";
  r.gesture = 1;
  r.samples = random_matrix(rng, sensors, steps, 10.0);
  double t = rng.uniform(-5.0, 5.0);
  for (int i = 0; i < steps; ++i) {
    r.timestamps.push_back(t);
    t += rng.uniform(0.001, 0.1);
  }
  return r;
}

double interpolate(const std::vector<double>& times, const std::vector<double>& values, double at) {
  if (at <= times.front()) return values.front();
  if (at >= times.back()) return values.back();
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    if (at == times[k]) return values[k];
    if (at > times[k] && at < times[k + 1]) {
      const double w = (at - times[k]) / (times[k + 1] - times[k]);
      return values[k] + w * (values[k + 1] - values[k]);
    }
  }
  return values.back();
}

Moments pooled_row(const std::vector<Eigen::MatrixXd>& mats, Eigen::Index row) {
  long double sum = 0.0L;
  long double count = 0.0L;
  for (const auto& m : mats)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      sum += m(row, j);
      count += 1.0L;
    }
  const long double mean = sum / count;
  long double sq = 0.0L;
  for (const auto& m : mats)
    for (Eigen::Index j = 0; j < m.cols(); ++j) sq += (m(row, j) - mean) * (m(row, j) - mean);
  return {static_cast<double>(mean), static_cast<double>(std::sqrt(sq / count))};
}

int knn_label(const Eigen::MatrixXd& refs, const std::vector<int>& labels, int k, const Eigen::VectorXd& q) {
  std::vector<std::pair<double, std::size_t>> d;
  for (Eigen::Index j = 0; j < refs.cols(); ++j) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < refs.rows(); ++i) {
      const double diff = refs(i, j) - q(i);
      s += diff * diff;
    }
    d.emplace_back(s, static_cast<std::size_t>(j));
  }
  std::sort(d.begin(), d.end());
  std::map<int, int> votes;
  for (int i = 0; i < k; ++i) ++votes[labels[d[static_cast<std::size_t>(i)].second]];
  int best = 0;
  int best_votes = -1;
  for (const auto& [label, v] : votes)
    if (v > best_votes) {
      best = label;
      best_votes = v;
    }
  return best;
}

double kkt_violation(const Eigen::MatrixXd& kernel, const Eigen::VectorXd& y, double c, const Eigen::VectorXd& alpha,
                     double bias) {
  const Eigen::Index n = y.size();
  double worst = 0.0;
  double balance = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    worst = std::max({worst, -alpha(i), alpha(i) - c});
    balance += alpha(i) * y(i);
    double f = bias;
    for (Eigen::Index j = 0; j < n; ++j) f += alpha(j) * y(j) * kernel(i, j);
    const double margin = y(i) * f;
    const double eps = 1e-8 * c;
    if (alpha(i) <= eps)
      worst = std::max(worst, 1.0 - margin);
    else if (alpha(i) >= c - eps)
      worst = std::max(worst, margin - 1.0);
    else
      worst = std::max(worst, std::abs(margin - 1.0));
  }
  return std::max(worst, std::abs(balance));
}

Eigen::VectorXd fisher_direction(const Eigen::MatrixXd& x, const std::vector<int>& labels) {
  const Eigen::Index d = x.rows();
  Eigen::VectorXd m0 = Eigen::VectorXd::Zero(d), m1 = Eigen::VectorXd::Zero(d);
  double n0 = 0, n1 = 0;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    if (labels[static_cast<std::size_t>(j)] == 0) {
      m0 += x.col(j);
      n0 += 1;
    } else {
      m1 += x.col(j);
      n1 += 1;
    }
  }
  m0 /= n0;
  m1 /= n1;
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const Eigen::VectorXd r = x.col(j) - (labels[static_cast<std::size_t>(j)] == 0 ? m0 : m1);
    w += r * r.transpose();
  }
  return w.fullPivLu().solve(m0 - m1);
}

Eigen::MatrixXd pca_scores(const Eigen::MatrixXd& x, int dims) {
  const Eigen::Index p = x.rows(), n = x.cols();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(p);
  for (Eigen::Index j = 0; j < n; ++j) mean += x.col(j);
  mean /= static_cast<double>(n);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::VectorXd r = x.col(j) - mean;
    cov += r * r.transpose();
  }
  cov /= static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  Eigen::MatrixXd scores(dims, n);
  for (int k = 0; k < dims; ++k) {
    const Eigen::VectorXd v = es.eigenvectors().col(p - 1 - k);
    for (Eigen::Index j = 0; j < n; ++j) scores(k, j) = v.dot(x.col(j) - mean);
  }
  return scores;
}

double svm_decision(const gestid::BinaryMachine& m, gestid::KernelType type, double gamma, const Eigen::VectorXd& q) {
  double f = m.bias;
  for (Eigen::Index s = 0; s < m.support_vectors.cols(); ++s) {
    double k = 0.0;
    if (type == gestid::KernelType::linear) {
      for (Eigen::Index i = 0; i < q.size(); ++i) k += m.support_vectors(i, s) * q(i);
    } else {
      double sq = 0.0;
      for (Eigen::Index i = 0; i < q.size(); ++i) sq += (m.support_vectors(i, s) - q(i)) * (m.support_vectors(i, s) - q(i));
      k = std::exp(-gamma * sq);
    }
    f += m.coef(s) * k;
  }
  return f;
}

std::vector<std::size_t> count_confusion(const std::vector<int>& truth, const std::vector<int>& pred,
                                         std::size_t classes) {
  std::vector<std::size_t> counts(classes * classes, 0);
  for (std::size_t t = 0; t < classes; ++t)
    for (std::size_t p = 0; p < classes; ++p)
      for (std::size_t i = 0; i < truth.size(); ++i)
        if (truth[i] == static_cast<int>(t) && pred[i] == static_cast<int>(p)) ++counts[t * classes + p];
  return counts;
}

double Penrose::worst() const { return std::max({axa, xax, ax_sym, xa_sym}); }

Penrose penrose(const Eigen::MatrixXd& a, const Eigen::MatrixXd& x) {
  const auto rel = [](const Eigen::MatrixXd& r, const Eigen::MatrixXd& ref) {
    const double s = ref.norm();
    return s > 0 ? r.norm() / s : r.norm();
  };
  const Eigen::MatrixXd ax = a * x, xa = x * a;
  return {rel(ax * a - a, a), rel(xa * x - x, x), rel(ax.transpose() - ax, ax), rel(xa.transpose() - xa, xa)};
}

double reconstruction_residual(const Eigen::MatrixXd& a, const Eigen::VectorXd& values, const Eigen::MatrixXd& vectors) {
  const Eigen::MatrixXd r = vectors * values.asDiagonal() * vectors.transpose() - a;
  return r.norm() / a.norm();
}

}  // namespace oracle
