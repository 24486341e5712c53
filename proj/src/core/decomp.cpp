#include "decomp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "errors.hpp"

namespace gestid {

void canonicalize_sign(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index best = 0;
  double best_abs = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v(i));
    if (a > best_abs) {
      best_abs = a;
      best = i;
    }
  }
  if (v.size() > 0 && v(best) < 0.0) v = -v;
}

namespace {

double off_diagonal_norm(const Eigen::MatrixXd& a) {
  double s = 0.0;
  for (Eigen::Index q = 1; q < a.cols(); ++q) s += a.col(q).head(q).squaredNorm();
  return std::sqrt(2.0 * s);
}

}  // namespace

EigenResult eig_symmetric(const Eigen::MatrixXd& input) {
  if (input.rows() != input.cols()) throw UsageError("eig_symmetric needs a square matrix");
  const Eigen::Index n = input.rows();
  EigenResult result;
  if (n == 0) return result;

  const double norm = input.norm();
  if (!std::isfinite(norm)) throw NumericalError("eig_symmetric: matrix has non-finite entries");
  if ((input - input.transpose()).norm() > 1e-9 * std::max(norm, std::numeric_limits<double>::min()))
    throw UsageError("eig_symmetric: matrix is not symmetric");

  Eigen::MatrixXd a = 0.5 * (input + input.transpose());
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  const double threshold = 1e-12 * norm;

  bool converged = false;
  int sweep = 0;
  for (; sweep <= kJacobiMaxSweeps; ++sweep) {
    if (off_diagonal_norm(a) <= threshold) {
      converged = true;
      break;
    }
    if (sweep == kJacobiMaxSweeps) break;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150)
          t = 0.5 / theta;
        else
          t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double app = a(p, p);
        const double aqq = a(q, q);

        // Rotate columns p and q, mirror into the rows, then fix the 2x2 block.
        double* cp = a.col(p).data();
        double* cq = a.col(q).data();
        for (Eigen::Index k = 0; k < n; ++k) {
          const double x = cp[k];
          const double y = cq[k];
          cp[k] = c * x - s * y;
          cq[k] = s * x + c * y;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          a(p, k) = cp[k];
          a(q, k) = cq[k];
        }
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;

        double* vp = v.col(p).data();
        double* vq = v.col(q).data();
        for (Eigen::Index k = 0; k < n; ++k) {
          const double x = vp[k];
          const double y = vq[k];
          vp[k] = c * x - s * y;
          vq[k] = s * x + c * y;
        }
      }
    }
  }
  if (!converged)
    throw NumericalError("eig_symmetric: Jacobi iteration did not converge within " +
                         std::to_string(kJacobiMaxSweeps) + " sweeps");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) { return a(i, i) > a(j, j); });

  result.values.resize(n);
  result.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    result.values(k) = a(src, src);
    result.vectors.col(k) = v.col(src);
    canonicalize_sign(result.vectors.col(k));
  }
  result.sweeps = sweep;
  return result;
}

Eigen::MatrixXd pinv(const Eigen::MatrixXd& a, double rank_tol) {
  const auto eig = eig_symmetric(a);
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  if (n == 0 || eig.values(0) <= 0.0) return out;
  const double cutoff = rank_tol * eig.values(0);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (eig.values(i) <= cutoff) break;
    out.noalias() += (1.0 / eig.values(i)) * eig.vectors.col(i) * eig.vectors.col(i).transpose();
  }
  return out;
}

namespace {

struct Violation {
  double up_max = -std::numeric_limits<double>::infinity();    // max F over I_up
  double low_min = std::numeric_limits<double>::infinity();    // min F over I_low
  Eigen::Index i = -1;
  Eigen::Index j = -1;
};

// F_t = -y_t G_t = y_t - sum_s alpha_s y_s K_ts.
Violation most_violating_pair(const Eigen::VectorXd& alpha, const Eigen::VectorXd& grad, const Eigen::VectorXd& y,
                              double c) {
  Violation v;
  for (Eigen::Index t = 0; t < alpha.size(); ++t) {
    const double f = -y(t) * grad(t);
    const bool up = y(t) > 0 ? alpha(t) < c : alpha(t) > 0.0;
    const bool low = y(t) > 0 ? alpha(t) > 0.0 : alpha(t) < c;
    if (up && f > v.up_max) {
      v.up_max = f;
      v.i = t;
    }
    if (low && f < v.low_min) {
      v.low_min = f;
      v.j = t;
    }
  }
  return v;
}

double dual_objective(const Eigen::VectorXd& alpha, const Eigen::VectorXd& grad) {
  // With G = Q alpha - 1 the dual value is sum(alpha) - alpha'Q alpha / 2.
  return 0.5 * alpha.dot(Eigen::VectorXd::Ones(alpha.size()) - grad);
}

}  // namespace

QpSolution solve_box_qp(const Eigen::MatrixXd& kernel, const Eigen::VectorXd& y, double c, const QpOptions& options) {
  const Eigen::Index n = y.size();
  if (kernel.rows() != n || kernel.cols() != n) throw UsageError("solve_box_qp: kernel and label sizes differ");
  if (!(c > 0.0) || !std::isfinite(c)) throw UsageError("solve_box_qp: C must be positive");
  bool has_pos = false, has_neg = false;
  for (Eigen::Index t = 0; t < n; ++t) {
    if (y(t) == 1.0)
      has_pos = true;
    else if (y(t) == -1.0)
      has_neg = true;
    else
      throw UsageError("solve_box_qp: labels must be +1 or -1");
  }
  if (!has_pos || !has_neg) throw UsageError("solve_box_qp: both classes must be present");

  const long max_iter = options.max_iterations > 0 ? options.max_iterations : std::max<long>(1000000, 100 * n);
  constexpr double kTau = 1e-12;

  QpSolution sol;
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd grad = Eigen::VectorXd::Constant(n, -1.0);
  if (options.record_objective) sol.objective_trace.push_back(0.0);

  long iter = 0;
  Violation v;
  while (true) {
    v = most_violating_pair(alpha, grad, y, c);
    if (v.i < 0 || v.j < 0 || v.up_max - v.low_min <= options.tol) {
      sol.converged = true;
      break;
    }
    if (iter >= max_iter) break;
    ++iter;

    const Eigen::Index i = v.i, j = v.j;
    const double old_i = alpha(i), old_j = alpha(j);
    const double qij = y(i) * y(j) * kernel(i, j);
    if (y(i) != y(j)) {
      double quad = kernel(i, i) + kernel(j, j) + 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad(i) - grad(j)) / quad;
      const double diff = alpha(i) - alpha(j);
      alpha(i) += delta;
      alpha(j) += delta;
      if (diff > 0.0) {
        if (alpha(j) < 0.0) {
          alpha(j) = 0.0;
          alpha(i) = diff;
        }
      } else if (alpha(i) < 0.0) {
        alpha(i) = 0.0;
        alpha(j) = -diff;
      }
      if (diff > 0.0) {
        if (alpha(i) > c) {
          alpha(i) = c;
          alpha(j) = c - diff;
        }
      } else if (alpha(j) > c) {
        alpha(j) = c;
        alpha(i) = c + diff;
      }
    } else {
      double quad = kernel(i, i) + kernel(j, j) - 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad(i) - grad(j)) / quad;
      const double sum = alpha(i) + alpha(j);
      alpha(i) -= delta;
      alpha(j) += delta;
      if (sum > c) {
        if (alpha(i) > c) {
          alpha(i) = c;
          alpha(j) = sum - c;
        }
      } else if (alpha(j) < 0.0) {
        alpha(j) = 0.0;
        alpha(i) = sum;
      }
      if (sum > c) {
        if (alpha(j) > c) {
          alpha(j) = c;
          alpha(i) = sum - c;
        }
      } else if (alpha(i) < 0.0) {
        alpha(i) = 0.0;
        alpha(j) = sum;
      }
    }

    const double di = alpha(i) - old_i;
    const double dj = alpha(j) - old_j;
    // G_t += y_t y_i K_ti di + y_t y_j K_tj dj
    grad.array() += y.array() * (y(i) * di * kernel.col(i).array() + y(j) * dj * kernel.col(j).array());
    if (options.record_objective) sol.objective_trace.push_back(dual_objective(alpha, grad));
  }

  // Bias: mean F over free multipliers, else the midpoint of the feasible range.
  double free_sum = 0.0;
  long free_count = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    if (alpha(t) > 0.0 && alpha(t) < c) {
      free_sum += -y(t) * grad(t);
      ++free_count;
    }
  }
  if (free_count > 0)
    sol.bias = free_sum / static_cast<double>(free_count);
  else
    sol.bias = 0.5 * (v.up_max + v.low_min);

  sol.alpha = std::move(alpha);
  sol.iterations = iter;
  return sol;
}

}  // namespace gestid
