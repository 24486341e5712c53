#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "eval.hpp"

namespace gestid {

// Everything needed to reproduce a run. Keys mirror the CLI's long options:
//
//   corpus        path of the corpus directory
//   scenario      ';'-separated list of a:<g>, a:all, b, c, c:<train>/<test>
//   classifier    ','-separated subset of lda,knn,svm
//   mode          paper-faithful | fold-safe
//   seed          unsigned integer
//   outer-folds   integer >= 2
//   inner-folds   integer >= 2
//   pca-dim       integer >= 1
//   length        resample length, integer >= 2
//   layout        time-major | sensor-major
//   out           output directory
//   lda-dims, knn-k, svm-c, svm-gamma   ','-separated grid values
//   kernel        rbf | linear
struct RunConfig {
  std::string corpus;
  std::vector<std::string> scenarios{"b"};
  std::vector<ClassifierKind> classifiers{ClassifierKind::lda, ClassifierKind::knn, ClassifierKind::svm};
  LeakageMode mode = LeakageMode::paper_faithful;
  std::uint64_t seed = 0;
  int outer_folds = 4;
  int inner_folds = 4;
  int pca_dim = 100;
  int length = kDefaultResampleLength;
  VectorLayout layout = VectorLayout::time_major;
  std::string out;
  std::vector<int> lda_dims = GridSpec{}.lda_dims;
  std::vector<int> knn_k = GridSpec{}.knn_k;
  std::vector<double> svm_c = GridSpec::default_svm_axis();
  std::vector<double> svm_gamma = GridSpec::default_svm_axis();
  KernelType kernel = KernelType::rbf;

  // Throws UsageError naming the key on unknown keys or bad values.
  void set(std::string_view key, std::string_view value);

  std::vector<GridSpec> grids() const;
  ExperimentOptions options() const;
  // Parses the scenario list; "a:all" becomes one scenario A per corpus gesture.
  std::vector<ScenarioSpec> resolve_scenarios(const std::vector<int>& corpus_gestures) const;

  // Flat "key = value" text (TOML-compatible, arrays in brackets) that the
  // CLI accepts back through --config.
  std::string manifest(std::string_view corpus_digest) const;
};

}  // namespace gestid
