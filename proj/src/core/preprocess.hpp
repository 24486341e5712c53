#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

#include "dataset.hpp"

namespace gestid {

// How a normalized m x t matrix is flattened into a feature vector.
//   time_major:   all m sensors at step 1, then all m sensors at step 2, ...
//                 (x_(i,j) lands at j*m + i, 0-based)
//   sensor_major: the full time series of sensor 1, then sensor 2, ...
enum class VectorLayout { time_major, sensor_major };

constexpr int kDefaultResampleLength = 100;

struct NormalizationState {
  Eigen::VectorXd mean;    // per sensor
  Eigen::VectorXd stddev;  // per sensor, population convention, always > 0
  int target_length = kDefaultResampleLength;
  std::vector<int> constant_sensors;  // sensors whose stddev was replaced by 1

  Eigen::Index sensor_count() const { return mean.size(); }
};

struct FeatureVector {
  Eigen::VectorXd values;
  int label = 0;  // index into Corpus::performers()
  int gesture = 0;
  Pace pace = Pace::natural;
};

// Piecewise-linear interpolation of every sensor onto t equally spaced time
// points spanning [first timestamp, last timestamp] inclusive.
Eigen::MatrixXd resample(const Recording& recording, int t);

// Pooled mean/stddev per sensor over every column of every matrix.
NormalizationState fit_normalization(std::span<const Eigen::MatrixXd> resampled);

FeatureVector normalize_and_vectorize(const Eigen::MatrixXd& resampled, const NormalizationState& state, int label,
                                      int gesture, Pace pace, VectorLayout layout = VectorLayout::time_major);

struct PreprocessedCorpus {
  std::vector<FeatureVector> vectors;  // corpus order
  NormalizationState state;
};

PreprocessedCorpus preprocess_corpus(const Corpus& corpus, int t, VectorLayout layout = VectorLayout::time_major);

// Class label of every recording (its performer's rank in Corpus::performers()).
std::vector<int> performer_labels(const Corpus& corpus);

}  // namespace gestid
