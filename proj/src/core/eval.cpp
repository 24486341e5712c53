#include "eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "errors.hpp"
#include "log.hpp"
#include "rng.hpp"
#include "text_io.hpp"

namespace gestid {

// ---------------------------------------------------------------------------
// Scenarios

ScenarioSpec ScenarioSpec::a(int gesture) {
  ScenarioSpec s;
  s.kind = ScenarioKind::a;
  s.gesture = gesture;
  return s;
}

ScenarioSpec ScenarioSpec::b() { return {}; }

ScenarioSpec ScenarioSpec::c_default(int max_gesture) {
  std::vector<int> train, test;
  for (int g = 1; g <= max_gesture; ++g) (g % 2 == 1 ? train : test).push_back(g);
  return c(std::move(train), std::move(test));
}

ScenarioSpec ScenarioSpec::c(std::vector<int> train, std::vector<int> test) {
  ScenarioSpec s;
  s.kind = ScenarioKind::c;
  std::sort(train.begin(), train.end());
  train.erase(std::unique(train.begin(), train.end()), train.end());
  std::sort(test.begin(), test.end());
  test.erase(std::unique(test.begin(), test.end()), test.end());
  s.train_gestures = std::move(train);
  s.test_gestures = std::move(test);
  return s;
}

namespace {

std::vector<int> parse_gesture_list(std::string_view text, std::string_view whole) {
  std::vector<int> out;
  for (auto item : text::split(text, ',')) {
    item = text::trim(item);
    const auto dash = item.find('-');
    long lo = 0, hi = 0;
    bool ok;
    if (dash == std::string_view::npos) {
      ok = text::parse_int(item, lo);
      hi = lo;
    } else {
      ok = text::parse_int(item.substr(0, dash), lo) && text::parse_int(item.substr(dash + 1), hi) && lo <= hi;
    }
    if (!ok) throw UsageError("bad gesture list in scenario '" + std::string(whole) + "'");
    for (long g = lo; g <= hi; ++g) out.push_back(static_cast<int>(g));
  }
  return out;
}

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

}  // namespace

ScenarioSpec ScenarioSpec::parse(std::string_view raw) {
  const auto text = text::trim(raw);
  ScenarioSpec s;
  if (text == "b") {
    s = b();
  } else if (text == "c") {
    s = c_default();
  } else if (text.starts_with("a:")) {
    long g = 0;
    if (!text::parse_int(text.substr(2), g)) throw UsageError("bad scenario '" + std::string(text) + "' (expected a:<gesture>)");
    s = a(static_cast<int>(g));
  } else if (text.starts_with("c:")) {
    const auto body = text.substr(2);
    const auto slash = body.find('/');
    if (slash == std::string_view::npos)
      throw UsageError("bad scenario '" + std::string(text) + "' (expected c:<train gestures>/<test gestures>)");
    s = c(parse_gesture_list(body.substr(0, slash), text), parse_gesture_list(body.substr(slash + 1), text));
  } else {
    throw UsageError("unknown scenario '" + std::string(text) + "' (expected a:<gesture>, b, c or c:<train>/<test>)");
  }
  s.validate();
  return s;
}

std::string ScenarioSpec::text() const {
  switch (kind) {
    case ScenarioKind::a: return "a:" + std::to_string(gesture);
    case ScenarioKind::b: return "b";
    case ScenarioKind::c:
      if (train_gestures == c_default().train_gestures && test_gestures == c_default().test_gestures) return "c";
      return "c:" + join_ints(train_gestures) + "/" + join_ints(test_gestures);
  }
  return "b";
}

std::string ScenarioSpec::tag() const {
  switch (kind) {
    case ScenarioKind::a: return "a" + std::to_string(gesture);
    case ScenarioKind::b: return "b";
    case ScenarioKind::c: return "c";
  }
  return "b";
}

void ScenarioSpec::validate() const {
  if (kind == ScenarioKind::a && (gesture < 1 || gesture > kMaxGestureId))
    throw UsageError("scenario A gesture must be in 1.." + std::to_string(kMaxGestureId));
  if (kind == ScenarioKind::c) {
    if (train_gestures.empty() || test_gestures.empty())
      throw UsageError("scenario C needs non-empty train and test gesture sets");
    for (int g : train_gestures)
      if (std::binary_search(test_gestures.begin(), test_gestures.end(), g))
        throw UsageError("scenario C gesture " + std::to_string(g) + " is in both train and test sets");
  }
}

// ---------------------------------------------------------------------------
// Grids

std::string_view to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::lda: return "lda";
    case ClassifierKind::knn: return "knn";
    case ClassifierKind::svm: return "svm";
  }
  return "knn";
}

std::optional<ClassifierKind> parse_classifier(std::string_view text) {
  text = text::trim(text);
  if (text == "lda") return ClassifierKind::lda;
  if (text == "knn") return ClassifierKind::knn;
  if (text == "svm" || text == "svc") return ClassifierKind::svm;
  return std::nullopt;
}

std::string GridPoint::describe() const {
  switch (kind) {
    case ClassifierKind::lda: return "d=" + std::to_string(lda_dims);
    case ClassifierKind::knn: return "k=" + std::to_string(knn_k);
    case ClassifierKind::svm:
      return std::string(svm_kernel == KernelType::rbf ? "rbf" : "linear") + " C=" + text::format_real(svm_c) +
             (svm_kernel == KernelType::rbf ? " gamma=" + text::format_real(svm_gamma) : "");
  }
  return {};
}

GridSpec GridSpec::defaults(ClassifierKind kind) {
  GridSpec g;
  g.kind = kind;
  return g;
}

std::vector<double> GridSpec::default_svm_axis() {
  std::vector<double> axis;
  for (int i = 0; i < 5; ++i) axis.push_back(std::pow(10.0, -3.0 + 0.75 * i));
  axis.back() = 1.0;
  return axis;
}

std::vector<GridPoint> GridSpec::points() const {
  std::vector<GridPoint> out;
  switch (kind) {
    case ClassifierKind::lda:
      for (int d : lda_dims) out.push_back({.kind = kind, .lda_dims = d});
      break;
    case ClassifierKind::knn:
      for (int k : knn_k) out.push_back({.kind = kind, .knn_k = k});
      break;
    case ClassifierKind::svm:
      for (double c : svm_c) {
        if (svm_kernel == KernelType::linear) {
          out.push_back({.kind = kind, .svm_c = c, .svm_gamma = 0.0, .svm_kernel = svm_kernel});
          continue;
        }
        for (double g : svm_gamma) out.push_back({.kind = kind, .svm_c = c, .svm_gamma = g, .svm_kernel = svm_kernel});
      }
      break;
  }
  return out;
}

void GridSpec::validate() const {
  switch (kind) {
    case ClassifierKind::lda:
      if (lda_dims.empty()) throw UsageError("lda grid is empty");
      for (int d : lda_dims)
        if (d < 1) throw UsageError("lda grid values must be >= 1");
      break;
    case ClassifierKind::knn:
      if (knn_k.empty()) throw UsageError("knn grid is empty");
      for (int k : knn_k)
        if (k < 1) throw UsageError("knn grid values must be >= 1");
      break;
    case ClassifierKind::svm:
      if (svm_c.empty() || (svm_kernel == KernelType::rbf && svm_gamma.empty())) throw UsageError("svm grid is empty");
      for (double c : svm_c)
        if (!(c > 0.0)) throw UsageError("svm C values must be positive");
      for (double g : svm_gamma)
        if (!(g > 0.0)) throw UsageError("svm gamma values must be positive");
      break;
  }
}

TrainedModel fit_classifier(const GridPoint& point, const Eigen::MatrixXd& x, std::span<const int> labels,
                            const Eigen::MatrixXd* sq_distances) {
  switch (point.kind) {
    case ClassifierKind::lda: return lda_fit(x, labels, point.lda_dims);
    case ClassifierKind::knn: return knn_fit(x, labels, point.knn_k);
    case ClassifierKind::svm:
      return svm_fit(x, labels, Kernel{point.svm_kernel, point.svm_gamma}, point.svm_c, {},
                     point.svm_kernel == KernelType::rbf ? sq_distances : nullptr);
  }
  throw UsageError("unknown classifier");
}

int predict(const TrainedModel& model, const Eigen::VectorXd& x) {
  return std::visit([&](const auto& m) { return m.predict(x); }, model);
}

// ---------------------------------------------------------------------------
// Cross-validation

std::string_view to_string(LeakageMode mode) {
  return mode == LeakageMode::paper_faithful ? "paper-faithful" : "fold-safe";
}

std::optional<LeakageMode> parse_leakage_mode(std::string_view text) {
  text = text::trim(text);
  if (text == "paper-faithful" || text == "paper_faithful") return LeakageMode::paper_faithful;
  if (text == "fold-safe" || text == "fold_safe") return LeakageMode::fold_safe;
  return std::nullopt;
}

void CvSpec::validate() const {
  if (outer_folds < 2) throw UsageError("outer fold count must be >= 2");
  if (inner_folds < 2) throw UsageError("inner fold count must be >= 2");
}

std::vector<SampleMeta> sample_meta(std::span<const FeatureVector> vectors) {
  std::vector<SampleMeta> out;
  out.reserve(vectors.size());
  for (const auto& v : vectors) out.push_back({v.label, v.gesture});
  return out;
}

namespace {

// Deals the members of every stratum round-robin over the folds, continuing
// the rotation across strata so fold sizes stay balanced.
std::vector<int> assign_strata(const std::map<std::pair<int, int>, std::vector<std::size_t>>& strata, std::size_t n,
                               int folds, std::uint64_t seed, bool by_performer_only) {
  std::vector<int> fold_of(n, -1);
  std::size_t rotation = 0;
  for (const auto& [key, members] : strata) {
    if (static_cast<int>(members.size()) < folds) {
      const std::string cell = by_performer_only
                                   ? "performer " + std::to_string(key.first)
                                   : "performer " + std::to_string(key.first) + ", gesture " + std::to_string(key.second);
      throw DataError("stratum (" + cell + ") has " + std::to_string(members.size()) + " samples, fewer than " +
                      std::to_string(folds) + " folds");
    }
    auto shuffled = members;
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(key.first), static_cast<std::uint64_t>(key.second)}));
    rng.shuffle(shuffled);
    for (std::size_t i = 0; i < shuffled.size(); ++i)
      fold_of[shuffled[i]] = static_cast<int>((rotation + i) % static_cast<std::size_t>(folds));
    rotation += shuffled.size();
  }
  return fold_of;
}

}  // namespace

std::vector<Fold> split_folds(std::span<const SampleMeta> samples, int folds, std::uint64_t seed,
                              const ScenarioSpec& scenario) {
  if (folds < 2) throw UsageError("fold count must be >= 2");
  scenario.validate();
  const auto in = [](const std::vector<int>& set, int g) { return std::binary_search(set.begin(), set.end(), g); };

  std::map<std::pair<int, int>, std::vector<std::size_t>> strata;
  std::vector<std::size_t> fixed_test;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    switch (scenario.kind) {
      case ScenarioKind::a:
        if (s.gesture == scenario.gesture) strata[{s.label, 0}].push_back(i);
        break;
      case ScenarioKind::b: strata[{s.label, s.gesture}].push_back(i); break;
      case ScenarioKind::c:
        if (in(scenario.train_gestures, s.gesture))
          strata[{s.label, s.gesture}].push_back(i);
        else if (in(scenario.test_gestures, s.gesture))
          fixed_test.push_back(i);
        break;
    }
  }
  if (strata.empty()) throw DataError("scenario " + scenario.text() + " selects no training samples");
  if (scenario.kind == ScenarioKind::c && fixed_test.empty())
    throw DataError("scenario " + scenario.text() + " selects no test samples");

  const auto fold_of = assign_strata(strata, samples.size(), folds, seed, scenario.kind == ScenarioKind::a);
  std::vector<Fold> out(static_cast<std::size_t>(folds));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (fold_of[i] < 0) continue;
    for (int f = 0; f < folds; ++f) {
      if (fold_of[i] == f) {
        if (scenario.kind != ScenarioKind::c) out[static_cast<std::size_t>(f)].test.push_back(i);
      } else {
        out[static_cast<std::size_t>(f)].train.push_back(i);
      }
    }
  }
  if (scenario.kind == ScenarioKind::c)
    for (auto& f : out) f.test = fixed_test;
  return out;
}

std::vector<Fold> split_gesture_groups(std::span<const SampleMeta> samples, int folds, std::uint64_t seed) {
  if (folds < 2) throw UsageError("fold count must be >= 2");
  std::set<int> distinct;
  for (const auto& s : samples) distinct.insert(s.gesture);
  if (static_cast<int>(distinct.size()) < folds)
    throw DataError(std::to_string(distinct.size()) + " gestures cannot form " + std::to_string(folds) +
                    " gesture-disjoint folds");
  std::vector<int> gestures(distinct.begin(), distinct.end());
  Rng rng(derive_seed(seed, {0x67}));
  rng.shuffle(gestures);
  std::map<int, int> fold_of;
  for (std::size_t i = 0; i < gestures.size(); ++i) fold_of[gestures[i]] = static_cast<int>(i % static_cast<std::size_t>(folds));
  std::vector<Fold> out(static_cast<std::size_t>(folds));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const int f = fold_of[samples[i].gesture];
    for (int g = 0; g < folds; ++g) (g == f ? out[static_cast<std::size_t>(g)].test : out[static_cast<std::size_t>(g)].train).push_back(i);
  }
  return out;
}

namespace {

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& x, std::span<const std::size_t> idx) {
  Eigen::MatrixXd out(x.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = x.col(static_cast<Eigen::Index>(idx[i]));
  return out;
}

Eigen::MatrixXd select_block(const Eigen::MatrixXd& m, std::span<const std::size_t> idx) {
  const auto n = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      out(i, j) = m(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(i)]), static_cast<Eigen::Index>(idx[static_cast<std::size_t>(j)]));
  return out;
}

template <typename T>
std::vector<T> select(const std::vector<T>& v, std::span<const std::size_t> idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(v[i]);
  return out;
}

}  // namespace

GridSearchResult grid_search(const Eigen::MatrixXd& x, std::span<const SampleMeta> meta, const GridSpec& grid,
                             int inner_folds, std::uint64_t seed, const ScenarioSpec& scenario) {
  grid.validate();
  if (x.cols() == 0) throw DataError("grid_search: empty training set");
  if (static_cast<std::size_t>(x.cols()) != meta.size()) throw UsageError("grid_search: feature/metadata size mismatch");

  std::vector<Fold> folds;
  if (scenario.kind == ScenarioKind::c) {
    std::set<int> gestures;
    for (const auto& m : meta) gestures.insert(m.gesture);
    folds = static_cast<int>(gestures.size()) >= inner_folds ? split_gesture_groups(meta, inner_folds, seed)
                                                             : split_folds(meta, inner_folds, seed, ScenarioSpec::b());
  } else {
    folds = split_folds(meta, inner_folds, seed, scenario);
  }

  std::vector<int> labels;
  labels.reserve(meta.size());
  for (const auto& m : meta) labels.push_back(m.label);

  GridSearchResult result;
  result.points = grid.points();
  result.scores.assign(result.points.size(), 0.0);

  Eigen::MatrixXd sq_all;
  if (grid.kind == ClassifierKind::svm && grid.svm_kernel == KernelType::rbf) sq_all = pairwise_sq_distances(x);

  for (std::size_t f = 0; f < folds.size(); ++f) {
    const auto& fold = folds[f];
    const Eigen::MatrixXd xtr = select_columns(x, fold.train);
    const auto ytr = select(labels, fold.train);
    const double test_count = static_cast<double>(fold.test.size());
    const auto record_failure = [&](std::size_t p, const std::string& why) {
      result.failures.push_back(std::string(to_string(grid.kind)) + " " + result.points[p].describe() +
                                " failed: " + why);
    };

    if (grid.kind == ClassifierKind::knn) {
      // One neighbour ranking per query serves every k.
      int k_max = 0;
      for (const auto& p : result.points) k_max = std::max(k_max, p.knn_k);
      const auto model = knn_fit(xtr, ytr, 1);
      std::vector<std::vector<Eigen::Index>> ranked;
      ranked.reserve(fold.test.size());
      for (auto t : fold.test) ranked.push_back(model.nearest(x.col(static_cast<Eigen::Index>(t)), k_max));
      for (std::size_t p = 0; p < result.points.size(); ++p) {
        const int k = result.points[p].knn_k;
        if (k > xtr.cols()) {
          record_failure(p, "k exceeds the " + std::to_string(xtr.cols()) + " training samples");
          continue;
        }
        std::size_t correct = 0;
        for (std::size_t q = 0; q < fold.test.size(); ++q)
          correct += model.vote(ranked[q], k) == labels[fold.test[q]];
        result.scores[p] += static_cast<double>(correct) / test_count;
      }
      continue;
    }

    Eigen::MatrixXd sq_fold;
    if (sq_all.size() > 0) sq_fold = select_block(sq_all, fold.train);
    for (std::size_t p = 0; p < result.points.size(); ++p) {
      try {
        const auto model = fit_classifier(result.points[p], xtr, ytr, sq_fold.size() > 0 ? &sq_fold : nullptr);
        std::size_t correct = 0;
        for (auto t : fold.test) correct += predict(model, x.col(static_cast<Eigen::Index>(t))) == labels[t];
        result.scores[p] += static_cast<double>(correct) / test_count;
      } catch (const Error& e) {
        record_failure(p, e.what());
      }
    }
  }

  for (auto& s : result.scores) s /= static_cast<double>(folds.size());
  std::size_t best = 0;
  for (std::size_t p = 1; p < result.scores.size(); ++p)
    if (result.scores[p] > result.scores[best]) best = p;
  result.best = result.points[best];
  result.best_score = result.scores[best];
  return result;
}

// ---------------------------------------------------------------------------
// Metrics

std::size_t ConfusionMatrix::total() const { return std::accumulate(counts.begin(), counts.end(), std::size_t{0}); }

std::size_t ConfusionMatrix::trace() const {
  std::size_t t = 0;
  for (std::size_t i = 0; i < classes; ++i) t += at(i, i);
  return t;
}

std::size_t ConfusionMatrix::row_sum(std::size_t truth) const {
  std::size_t s = 0;
  for (std::size_t j = 0; j < classes; ++j) s += at(truth, j);
  return s;
}

double ConfusionMatrix::accuracy() const {
  const auto n = total();
  return n == 0 ? 0.0 : static_cast<double>(trace()) / static_cast<double>(n);
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (other.classes != classes) throw UsageError("confusion matrices have different class counts");
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
  return *this;
}

ConfusionMatrix confusion_matrix(std::span<const int> truth, std::span<const int> predicted, std::size_t classes) {
  if (truth.size() != predicted.size())
    throw UsageError("confusion_matrix: " + std::to_string(truth.size()) + " true labels but " +
                     std::to_string(predicted.size()) + " predictions");
  ConfusionMatrix cm(classes);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || predicted[i] < 0 || static_cast<std::size_t>(truth[i]) >= classes ||
        static_cast<std::size_t>(predicted[i]) >= classes)
      throw UsageError("confusion_matrix: label outside 0.." + std::to_string(classes) + " at position " + std::to_string(i));
    ++cm.at(static_cast<std::size_t>(truth[i]), static_cast<std::size_t>(predicted[i]));
  }
  return cm;
}

// ---------------------------------------------------------------------------
// Experiments

FeatureSpace fit_feature_space(std::span<const Eigen::MatrixXd> resampled, std::span<const std::size_t> fit_indices,
                               int pca_dim, VectorLayout layout) {
  if (fit_indices.empty()) throw DataError("no recordings to fit the feature space on");
  FeatureSpace space;
  std::vector<Eigen::MatrixXd> fit_set;
  fit_set.reserve(fit_indices.size());
  for (auto i : fit_indices) fit_set.push_back(resampled[i]);
  space.normalization = fit_normalization(fit_set);

  const Eigen::Index p = resampled.front().size();
  Eigen::MatrixXd vectors(p, static_cast<Eigen::Index>(resampled.size()));
  for (std::size_t i = 0; i < resampled.size(); ++i)
    vectors.col(static_cast<Eigen::Index>(i)) = normalize_and_vectorize(resampled[i], space.normalization, 0, 0, Pace::natural, layout).values;

  const auto n_fit = static_cast<Eigen::Index>(fit_indices.size());
  const int effective = static_cast<int>(std::min<Eigen::Index>({pca_dim, p, n_fit - 1}));
  if (effective < 1) throw DataError("too few recordings (" + std::to_string(n_fit) + ") to fit PCA");
  if (effective < pca_dim)
    space.warnings.push_back("PCA dimension reduced from " + std::to_string(pca_dim) + " to " +
                             std::to_string(effective) + " (" + std::to_string(n_fit) + " fitting recordings, " +
                             std::to_string(p) + " features)");
  space.pca = pca_fit(select_columns(vectors, fit_indices), effective);
  space.features = space.pca.transform_all(vectors);
  return space;
}

namespace {

[[noreturn]] void rethrow_with_context(const Error& e, const std::string& context) {
  const std::string what = context + ": " + e.what();
  switch (e.kind()) {
    case ErrorKind::usage: throw UsageError(what);
    case ErrorKind::data: throw DataError(what);
    case ErrorKind::numerical: throw NumericalError(what);
    case ErrorKind::io: throw IoError(what);
  }
  throw DataError(what);
}

void add_unique(std::vector<std::string>& list, const std::string& s) {
  if (std::find(list.begin(), list.end(), s) == list.end()) list.push_back(s);
}

}  // namespace

namespace {

struct PreparedCorpus {
  std::vector<std::string> class_names;
  std::vector<int> labels;
  std::vector<SampleMeta> meta;
  std::vector<Eigen::MatrixXd> resampled;
};

void run_scenario(const PreparedCorpus& data, const ScenarioSpec& scenario, std::span<const GridSpec> grids,
                  const ExperimentOptions& options, const std::optional<FeatureSpace>& shared,
                  ExperimentReport& report);

}  // namespace

ExperimentReport run_experiments(const Corpus& corpus, std::span<const ScenarioSpec> scenarios,
                                 std::span<const GridSpec> grids, const ExperimentOptions& options) {
  corpus.validate();
  for (const auto& s : scenarios) s.validate();
  options.cv.validate();
  if (scenarios.empty()) throw UsageError("no scenarios requested");
  if (grids.empty()) throw UsageError("no classifiers requested");
  for (const auto& g : grids) g.validate();
  if (corpus.recordings.empty()) throw DataError("corpus is empty");

  PreparedCorpus data;
  data.class_names = corpus.performers();
  if (data.class_names.size() < 2)
    throw DataError("need >= 2 performers (classes), corpus has " + std::to_string(data.class_names.size()));
  data.labels = performer_labels(corpus);
  for (std::size_t i = 0; i < corpus.recordings.size(); ++i)
    data.meta.push_back({data.labels[i], corpus.recordings[i].gesture});
  data.resampled.reserve(corpus.recordings.size());
  for (const auto& r : corpus.recordings) data.resampled.push_back(resample(r, options.resample_length));

  // Paper-faithful mode: one feature space for every scenario.
  std::optional<FeatureSpace> shared;
  if (options.cv.mode == LeakageMode::paper_faithful) {
    std::vector<std::size_t> all(corpus.recordings.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    shared = fit_feature_space(data.resampled, all, options.pca_dim, options.layout);
  }

  ExperimentReport report;
  report.class_names = data.class_names;
  for (const auto& s : scenarios) run_scenario(data, s, grids, options, shared, report);
  return report;
}

ExperimentReport run_experiment(const Corpus& corpus, const ScenarioSpec& scenario, std::span<const GridSpec> grids,
                                const ExperimentOptions& options) {
  return run_experiments(corpus, std::span<const ScenarioSpec>(&scenario, 1), grids, options);
}

namespace {

void run_scenario(const PreparedCorpus& data, const ScenarioSpec& scenario, std::span<const GridSpec> grids,
                  const ExperimentOptions& options, const std::optional<FeatureSpace>& shared,
                  ExperimentReport& report) {
  const auto& labels = data.labels;
  const auto& meta = data.meta;
  const auto& resampled = data.resampled;
  const std::size_t classes = data.class_names.size();

  const std::string scenario_ctx = "scenario " + scenario.text();
  std::vector<Fold> folds;
  try {
    folds = split_folds(meta, options.cv.outer_folds, options.cv.seed, scenario);
  } catch (const Error& e) {
    rethrow_with_context(e, scenario_ctx);
  }

  for (const auto& grid : grids) {
    ClassifierOutcome outcome;
    outcome.scenario = scenario;
    outcome.classifier = grid.kind;
    outcome.confusion = ConfusionMatrix(classes);
    report.outcomes.push_back(std::move(outcome));
  }
  const std::size_t first = report.outcomes.size() - grids.size();

  for (std::size_t f = 0; f < folds.size(); ++f) {
    const auto& fold = folds[f];
    const std::string fold_ctx = scenario_ctx + ", fold " + std::to_string(f + 1);
    std::optional<FeatureSpace> local;
    try {
      if (!shared) local = fit_feature_space(resampled, fold.train, options.pca_dim, options.layout);
    } catch (const Error& e) {
      rethrow_with_context(e, fold_ctx);
    }
    const FeatureSpace& space = shared ? *shared : *local;
    const Eigen::MatrixXd xtr = select_columns(space.features, fold.train);
    const auto meta_tr = select(meta, fold.train);
    const auto ytr = select(labels, fold.train);

    for (std::size_t g = 0; g < grids.size(); ++g) {
      auto& outcome = report.outcomes[first + g];
      for (const auto& w : space.warnings) add_unique(outcome.warnings, w);
      const std::string ctx = scenario_ctx + ", classifier " + std::string(to_string(grids[g].kind)) + ", fold " +
                              std::to_string(f + 1);
      FoldOutcome fo;
      fo.train = fold.train;
      fo.test = fold.test;
      fo.pca_dim = static_cast<int>(space.pca.output_dim());
      try {
        const auto search = grid_search(xtr, meta_tr, grids[g], options.cv.inner_folds,
                                        derive_seed(options.cv.seed, {static_cast<std::uint64_t>(f + 1)}), scenario);
        for (const auto& failure : search.failures) add_unique(outcome.grid_failures, failure);
        fo.chosen = search.best;
        fo.inner_score = search.best_score;
        const auto model = fit_classifier(search.best, xtr, ytr);
        std::vector<int> truth;
        for (auto t : fold.test) {
          fo.predictions.push_back(predict(model, space.features.col(static_cast<Eigen::Index>(t))));
          truth.push_back(labels[t]);
        }
        const auto cm = confusion_matrix(truth, fo.predictions, classes);
        fo.accuracy = cm.accuracy();
        outcome.confusion += cm;
      } catch (const Error& e) {
        rethrow_with_context(e, ctx);
      }
      outcome.folds.push_back(std::move(fo));
    }
  }

  for (std::size_t g = first; g < report.outcomes.size(); ++g) {
    auto& outcome = report.outcomes[g];
    outcome.accuracy = outcome.confusion.accuracy();
    const std::string ctx = scenario_ctx + ", " + std::string(to_string(outcome.classifier)) + ": ";
    for (const auto& w : outcome.warnings) warn(ctx + w);
    if (!outcome.grid_failures.empty())
      warn(ctx + std::to_string(outcome.grid_failures.size()) + " grid evaluation failure(s) scored 0, first: " +
           outcome.grid_failures.front());
  }
}

}  // namespace

}  // namespace gestid
