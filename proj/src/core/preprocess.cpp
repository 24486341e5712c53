#include "preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "errors.hpp"
#include "log.hpp"

namespace gestid {

Eigen::MatrixXd resample(const Recording& recording, int t) {
  if (t < 2) throw UsageError("resample length must be >= 2");
  const Eigen::MatrixXd& x = recording.samples;
  const auto& ts = recording.timestamps;
  const Eigen::Index T = x.cols();
  if (T < 2 || static_cast<Eigen::Index>(ts.size()) != T) throw DataError("recording too short to resample");

  Eigen::MatrixXd out(x.rows(), t);
  const double t0 = ts.front();
  const double t1 = ts.back();
  out.col(0) = x.col(0);
  out.col(t - 1) = x.col(T - 1);
  Eigen::Index k = 0;  // segment [ts[k], ts[k+1]] holding the current grid point
  for (int j = 1; j < t - 1; ++j) {
    const double tau = t0 + (t1 - t0) * static_cast<double>(j) / static_cast<double>(t - 1);
    while (k + 2 < T && ts[static_cast<std::size_t>(k + 1)] <= tau) ++k;
    const double ta = ts[static_cast<std::size_t>(k)];
    const double tb = ts[static_cast<std::size_t>(k + 1)];
    const double w = (tau - ta) / (tb - ta);
    out.col(j) = x.col(k) + w * (x.col(k + 1) - x.col(k));
  }
  return out;
}

NormalizationState fit_normalization(std::span<const Eigen::MatrixXd> resampled) {
  if (resampled.empty()) throw DataError("cannot fit normalization on an empty set");
  const Eigen::Index m = resampled.front().rows();
  const Eigen::Index t = resampled.front().cols();
  for (const auto& a : resampled)
    if (a.rows() != m || a.cols() != t) throw DataError("inconsistent matrix shapes in normalization input");

  const double count = static_cast<double>(resampled.size()) * static_cast<double>(t);
  NormalizationState state;
  state.target_length = static_cast<int>(t);
  state.mean = Eigen::VectorXd::Zero(m);
  for (const auto& a : resampled) state.mean += a.rowwise().sum();
  state.mean /= count;

  // Second pass around the mean; more accurate than E[x^2] - E[x]^2.
  Eigen::VectorXd ss = Eigen::VectorXd::Zero(m);
  for (const auto& a : resampled) ss += (a.colwise() - state.mean).rowwise().squaredNorm();
  state.stddev = (ss / count).cwiseSqrt();

  for (Eigen::Index i = 0; i < m; ++i) {
    if (state.stddev(i) <= 1e-12 * std::max(1.0, std::abs(state.mean(i)))) {
      state.stddev(i) = 1.0;
      state.constant_sensors.push_back(static_cast<int>(i));
      warn("sensor " + std::to_string(i + 1) + " is constant; its normalized values will be zero");
    }
  }
  return state;
}

FeatureVector normalize_and_vectorize(const Eigen::MatrixXd& resampled, const NormalizationState& state, int label,
                                      int gesture, Pace pace, VectorLayout layout) {
  const Eigen::Index m = state.sensor_count();
  const Eigen::Index t = state.target_length;
  if (resampled.rows() != m || resampled.cols() != t)
    throw DataError("shape mismatch: matrix is " + std::to_string(resampled.rows()) + "x" +
                    std::to_string(resampled.cols()) + ", normalization expects " + std::to_string(m) + "x" +
                    std::to_string(t));
  const Eigen::MatrixXd z = (resampled.colwise() - state.mean).array().colwise() / state.stddev.array();

  FeatureVector fv;
  fv.label = label;
  fv.gesture = gesture;
  fv.pace = pace;
  if (layout == VectorLayout::time_major) {
    // Column-major storage already places sensor i of step j at j*m + i.
    fv.values = Eigen::Map<const Eigen::VectorXd>(z.data(), m * t);
  } else {
    const Eigen::MatrixXd zt = z.transpose();
    fv.values = Eigen::Map<const Eigen::VectorXd>(zt.data(), m * t);
  }
  return fv;
}

std::vector<int> performer_labels(const Corpus& corpus) {
  const auto performers = corpus.performers();
  std::map<std::string, int> rank;
  for (std::size_t i = 0; i < performers.size(); ++i) rank[performers[i]] = static_cast<int>(i);
  std::vector<int> labels;
  labels.reserve(corpus.recordings.size());
  for (const auto& r : corpus.recordings) labels.push_back(rank.at(r.performer));
  return labels;
}

PreprocessedCorpus preprocess_corpus(const Corpus& corpus, int t, VectorLayout layout) {
  if (corpus.recordings.empty()) throw DataError("cannot preprocess an empty corpus");
  std::vector<Eigen::MatrixXd> resampled;
  resampled.reserve(corpus.recordings.size());
  for (const auto& r : corpus.recordings) resampled.push_back(resample(r, t));

  PreprocessedCorpus out;
  out.state = fit_normalization(resampled);
  const auto labels = performer_labels(corpus);
  out.vectors.reserve(resampled.size());
  for (std::size_t i = 0; i < resampled.size(); ++i) {
    const auto& r = corpus.recordings[i];
    out.vectors.push_back(normalize_and_vectorize(resampled[i], out.state, labels[i], r.gesture, r.pace, layout));
  }
  return out;
}

}  // namespace gestid
