#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "classifiers.hpp"
#include "dataset.hpp"
#include "preprocess.hpp"

namespace gestid {

// ---------------------------------------------------------------------------
// Scenarios

enum class ScenarioKind { a, b, c };

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::b;
  int gesture = 0;                  // scenario A
  std::vector<int> train_gestures;  // scenario C, ascending
  std::vector<int> test_gestures;   // scenario C, ascending

  static ScenarioSpec a(int gesture);
  static ScenarioSpec b();
  // Odd gesture ids train, even ids test.
  static ScenarioSpec c_default(int max_gesture = kMaxGestureId);
  static ScenarioSpec c(std::vector<int> train, std::vector<int> test);

  // "a:5", "b", "c" (odd/even split), "c:1-11/12-22", "c:1,3,5/2,4,6".
  static ScenarioSpec parse(std::string_view text);
  std::string text() const;  // canonical form accepted by parse()
  std::string tag() const;   // file-name friendly: "a5", "b", "c"
  void validate() const;
};

// ---------------------------------------------------------------------------
// Classifier grids

enum class ClassifierKind { lda, knn, svm };

std::string_view to_string(ClassifierKind kind);
std::optional<ClassifierKind> parse_classifier(std::string_view text);

struct GridPoint {
  ClassifierKind kind = ClassifierKind::knn;
  int lda_dims = 0;
  int knn_k = 0;
  double svm_c = 0.0;
  double svm_gamma = 0.0;
  KernelType svm_kernel = KernelType::rbf;

  std::string describe() const;  // e.g. "d=3", "k=5", "C=0.001 gamma=0.01"
  bool operator==(const GridPoint&) const = default;
};

struct GridSpec {
  ClassifierKind kind = ClassifierKind::knn;
  std::vector<int> lda_dims{3, 5, 10, 15, 20, 25, 30, 35};
  std::vector<int> knn_k{1, 2, 3, 4, 5, 7, 10, 20, 30, 40, 50};
  std::vector<double> svm_c = default_svm_axis();
  std::vector<double> svm_gamma = default_svm_axis();
  KernelType svm_kernel = KernelType::rbf;

  static GridSpec defaults(ClassifierKind kind);
  // Five log-spaced values from 0.001 to 1.
  static std::vector<double> default_svm_axis();

  // Declaration order; for svm C varies slowest.
  std::vector<GridPoint> points() const;
  void validate() const;
};

using TrainedModel = std::variant<LdaModel, KnnModel, SvmModel>;

TrainedModel fit_classifier(const GridPoint& point, const Eigen::MatrixXd& x, std::span<const int> labels,
                            const Eigen::MatrixXd* sq_distances = nullptr);
int predict(const TrainedModel& model, const Eigen::VectorXd& x);

// ---------------------------------------------------------------------------
// Cross-validation

enum class LeakageMode { paper_faithful, fold_safe };

std::string_view to_string(LeakageMode mode);
std::optional<LeakageMode> parse_leakage_mode(std::string_view text);

struct CvSpec {
  int outer_folds = 4;
  int inner_folds = 4;
  std::uint64_t seed = 0;
  LeakageMode mode = LeakageMode::paper_faithful;

  void validate() const;
};

struct SampleMeta {
  int label = 0;
  int gesture = 0;
};

std::vector<SampleMeta> sample_meta(std::span<const FeatureVector> vectors);

struct Fold {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> test;   // ascending
};

// Stratified folds over `samples` (indices refer to the span).
//   A: samples of the scenario gesture, stratified by performer.
//   B: all samples, stratified by (performer, gesture).
//   C: train-gesture samples stratified by (performer, gesture) and held out
//      fold by fold; every fold tests on all test-gesture samples.
// Deterministic in `seed`. Throws DataError when a stratum is smaller than
// the fold count.
std::vector<Fold> split_folds(std::span<const SampleMeta> samples, int folds, std::uint64_t seed,
                              const ScenarioSpec& scenario);

// Folds that hold out whole gestures: validation never sees a gesture used
// in training. Needs at least `folds` distinct gestures.
std::vector<Fold> split_gesture_groups(std::span<const SampleMeta> samples, int folds, std::uint64_t seed);

struct GridSearchResult {
  GridPoint best;
  double best_score = 0.0;
  std::vector<GridPoint> points;
  std::vector<double> scores;         // mean inner-fold accuracy per point
  std::vector<std::string> failures;  // one line per failed (point, fold)
};

// Inner folds follow split_folds, except that scenario C holds out whole
// gestures (split_gesture_groups) when enough gestures are available.
// Failed fits score 0 for that fold. Ties go to the earlier grid point.
GridSearchResult grid_search(const Eigen::MatrixXd& x, std::span<const SampleMeta> meta, const GridSpec& grid,
                             int inner_folds, std::uint64_t seed, const ScenarioSpec& scenario);

// ---------------------------------------------------------------------------
// Metrics

struct ConfusionMatrix {
  std::size_t classes = 0;
  std::vector<std::size_t> counts;  // row = true class, column = predicted

  explicit ConfusionMatrix(std::size_t n = 0) : classes(n), counts(n * n, 0) {}
  std::size_t& at(std::size_t truth, std::size_t predicted) { return counts[truth * classes + predicted]; }
  std::size_t at(std::size_t truth, std::size_t predicted) const { return counts[truth * classes + predicted]; }
  std::size_t total() const;
  std::size_t trace() const;
  std::size_t row_sum(std::size_t truth) const;
  double accuracy() const;
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  bool operator==(const ConfusionMatrix&) const = default;
};

ConfusionMatrix confusion_matrix(std::span<const int> truth, std::span<const int> predicted, std::size_t classes);

// ---------------------------------------------------------------------------
// Experiments

struct ExperimentOptions {
  int resample_length = kDefaultResampleLength;
  int pca_dim = 100;
  VectorLayout layout = VectorLayout::time_major;
  CvSpec cv;
};

// Normalization and PCA fitted on a subset of recordings, applied to all.
struct FeatureSpace {
  NormalizationState normalization;
  PcaModel pca;
  Eigen::MatrixXd features;  // pca dim x recording count, corpus order
  std::vector<std::string> warnings;
};

FeatureSpace fit_feature_space(std::span<const Eigen::MatrixXd> resampled, std::span<const std::size_t> fit_indices,
                               int pca_dim, VectorLayout layout);

struct FoldOutcome {
  std::vector<std::size_t> train;  // corpus indices
  std::vector<std::size_t> test;   // corpus indices
  std::vector<int> predictions;    // parallel to test
  GridPoint chosen;
  double inner_score = 0.0;
  double accuracy = 0.0;
  int pca_dim = 0;
};

struct ClassifierOutcome {
  ScenarioSpec scenario;
  ClassifierKind classifier = ClassifierKind::knn;
  double accuracy = 0.0;  // trace / total of the pooled confusion matrix
  ConfusionMatrix confusion;
  std::vector<FoldOutcome> folds;
  std::vector<std::string> warnings;
  std::vector<std::string> grid_failures;  // distinct grid evaluation failures, scored 0
};

struct ExperimentReport {
  std::vector<std::string> class_names;
  std::vector<ClassifierOutcome> outcomes;
};

// Nested cross-validation for one scenario and every requested classifier.
// All classifiers share the same outer folds.
ExperimentReport run_experiment(const Corpus& corpus, const ScenarioSpec& scenario, std::span<const GridSpec> grids,
                                const ExperimentOptions& options);

// Several scenarios in order. In paper-faithful mode the feature space is
// fitted once and shared.
ExperimentReport run_experiments(const Corpus& corpus, std::span<const ScenarioSpec> scenarios,
                                 std::span<const GridSpec> grids, const ExperimentOptions& options);

}  // namespace gestid
