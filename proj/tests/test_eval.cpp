#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "eval.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace gestid;

namespace {

std::vector<SampleMeta> grid_meta(int performers, int gestures, int reps) {
  std::vector<SampleMeta> m;
  for (int p = 0; p < performers; ++p)
    for (int g = 1; g <= gestures; ++g)
      for (int r = 0; r < reps; ++r) m.push_back({p, g});
  return m;
}

void check_partition(const std::vector<Fold>& folds, std::size_t n) {
  std::vector<int> tested(n, 0);
  for (const auto& f : folds) {
    CHECK(std::is_sorted(f.train.begin(), f.train.end()));
    CHECK(std::is_sorted(f.test.begin(), f.test.end()));
    std::set<std::size_t> train(f.train.begin(), f.train.end());
    for (auto t : f.test) {
      CHECK(train.count(t) == 0);
      ++tested[t];
    }
  }
  for (auto t : tested) CHECK(t == 1);
}

SyntheticSpec tiny_corpus_spec(double sep, std::uint64_t seed) {
  SyntheticSpec s;
  s.performer_count = 3;
  s.gesture_count = 4;
  s.sensor_count = 3;
  s.style_separation = sep;
  s.seed = seed;
  return s;
}

}  // namespace

TEST_SUITE("eval") {
  TEST_CASE("scenario parsing round-trips") {
    for (const char* s : {"a:5", "b", "c", "c:1-11/12-22", "c:1,3/2,4"}) {
      const auto sc = ScenarioSpec::parse(s);
      CHECK(ScenarioSpec::parse(sc.text()).text() == sc.text());
    }
    const auto c = ScenarioSpec::parse("c:1-3/4,6");
    CHECK(c.train_gestures == std::vector<int>{1, 2, 3});
    CHECK(c.test_gestures == std::vector<int>{4, 6});
    const auto def = ScenarioSpec::parse("c");
    CHECK(def.train_gestures.front() == 1);
    CHECK(def.test_gestures.front() == 2);
    CHECK(ScenarioSpec::parse("a:5").tag() == "a5");
    CHECK_THROWS_AS(ScenarioSpec::parse("d"), UsageError);
    CHECK_THROWS_AS(ScenarioSpec::parse("a:99"), UsageError);
    CHECK_THROWS_AS(ScenarioSpec::parse("c:1,2/2,3"), UsageError);
  }

  TEST_CASE("classifier names") {
    CHECK(parse_classifier("svc") == ClassifierKind::svm);
    CHECK(parse_classifier("lda") == ClassifierKind::lda);
    CHECK_FALSE(parse_classifier("tree").has_value());
    CHECK(parse_leakage_mode("fold-safe") == LeakageMode::fold_safe);
  }

  TEST_CASE("grids") {
    const auto axis = GridSpec::default_svm_axis();
    REQUIRE(axis.size() == 5);
    CHECK(axis.front() == 0.001);
    CHECK(axis.back() == 1.0);
    const auto pts = GridSpec::defaults(ClassifierKind::svm).points();
    CHECK(pts.size() == 25);
    CHECK(pts[1].svm_c == pts[0].svm_c);
    CHECK(pts[5].svm_c > pts[0].svm_c);
    CHECK(GridSpec::defaults(ClassifierKind::lda).points().size() == 8);
    CHECK(GridSpec::defaults(ClassifierKind::knn).points().size() == 11);
  }

  TEST_CASE("scenario A folds: one sample per performer per fold") {
    const auto meta = grid_meta(2, 3, 4);
    const auto folds = split_folds(meta, 4, 1, ScenarioSpec::a(2));
    REQUIRE(folds.size() == 4);
    for (const auto& f : folds) {
      REQUIRE(f.test.size() == 2);
      CHECK(meta[f.test[0]].label != meta[f.test[1]].label);
      for (auto t : f.test) CHECK(meta[t].gesture == 2);
      for (auto t : f.train) CHECK(meta[t].gesture == 2);
    }
  }

  TEST_CASE("property: scenario B folds partition and stratify") {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
      const int performers = static_cast<int>(rng.between(2, 5));
      const int gestures = static_cast<int>(rng.between(1, 5));
      const int reps = static_cast<int>(rng.between(4, 9));
      const int k = static_cast<int>(rng.between(2, 4));
      const auto meta = grid_meta(performers, gestures, reps);
      const auto folds = split_folds(meta, k, rng.next(), ScenarioSpec::b());
      check_partition(folds, meta.size());
      for (const auto& f : folds) {
        std::map<std::pair<int, int>, int> cell;
        for (auto t : f.test) ++cell[{meta[t].label, meta[t].gesture}];
        CHECK(cell.size() == static_cast<std::size_t>(performers * gestures));
        for (const auto& [key, count] : cell) CHECK(std::abs(count - reps / static_cast<double>(k)) < 1.0);
      }
    }
  }

  TEST_CASE("scenario C: test gestures never train") {
    const auto meta = grid_meta(3, 22, 4);
    const auto sc = ScenarioSpec::parse("c:1-11/12-22");
    const auto folds = split_folds(meta, 4, 3, sc);
    for (const auto& f : folds) {
      for (auto t : f.train) CHECK(meta[t].gesture <= 11);
      for (auto t : f.test) CHECK(meta[t].gesture >= 12);
      CHECK(f.test.size() == 3u * 11u * 4u);
    }
  }

  TEST_CASE("folds are deterministic in the seed and small cells are named") {
    const auto meta = grid_meta(2, 2, 5);
    const auto a = split_folds(meta, 4, 9, ScenarioSpec::b());
    const auto b = split_folds(meta, 4, 9, ScenarioSpec::b());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].test == b[i].test);
    const auto small = grid_meta(2, 2, 3);
    CHECK(error_message<DataError>([&] { split_folds(small, 4, 1, ScenarioSpec::b()); }).find("stratum") !=
          std::string::npos);
  }

  TEST_CASE("gesture-group folds hold out whole gestures") {
    const auto meta = grid_meta(2, 8, 2);
    const auto folds = split_gesture_groups(meta, 4, 1);
    check_partition(folds, meta.size());
    for (const auto& f : folds) {
      std::set<int> train_g, test_g;
      for (auto t : f.train) train_g.insert(meta[t].gesture);
      for (auto t : f.test) test_g.insert(meta[t].gesture);
      for (int g : test_g) CHECK(train_g.count(g) == 0);
    }
    CHECK_THROWS_AS(split_gesture_groups(grid_meta(2, 3, 2), 4, 1), DataError);
  }

  TEST_CASE("confusion matrix") {
    const std::vector<int> t{0, 1, 2, 2};
    const auto perfect = confusion_matrix(t, t, 3);
    CHECK(perfect.trace() == 4);
    CHECK(perfect.accuracy() == 1.0);
    const std::vector<int> ones{1, 1, 1, 1};
    const auto col = confusion_matrix(t, ones, 3);
    for (std::size_t r = 0; r < 3; ++r) {
      CHECK(col.at(r, 0) == 0);
      CHECK(col.at(r, 2) == 0);
    }
    CHECK(col.at(2, 1) == 2);

    Rng rng(6);
    std::vector<int> truth, pred;
    for (int i = 0; i < 300; ++i) {
      truth.push_back(static_cast<int>(rng.below(3)));
      pred.push_back(static_cast<int>(rng.below(3)));
    }
    const auto cm = confusion_matrix(truth, pred, 3);
    CHECK(cm.counts == oracle::count_confusion(truth, pred, 3));
    CHECK(cm.total() == 300);
    CHECK_THROWS_AS(confusion_matrix(truth, ones, 3), UsageError);
  }

  TEST_CASE("grid search: single point and rank-bounded lda") {
    Rng rng(7);
    const auto d = oracle::blobs(rng, 4, 12, 6, 4.0);
    std::vector<SampleMeta> meta;
    for (auto l : d.labels) meta.push_back({l, 1});
    GridSpec one = GridSpec::defaults(ClassifierKind::knn);
    one.knn_k = {3};
    CHECK(grid_search(d.x, meta, one, 4, 1, ScenarioSpec::b()).best.knn_k == 3);

    const auto lda = grid_search(d.x, meta, GridSpec::defaults(ClassifierKind::lda), 4, 1, ScenarioSpec::b());
    CHECK(lda.best.lda_dims <= 3);
    CHECK_FALSE(lda.failures.empty());
    for (std::size_t i = 0; i < lda.points.size(); ++i)
      if (lda.points[i].lda_dims > 3) CHECK(lda.scores[i] == 0.0);
  }

  TEST_CASE("grid search prefers smoothing when labels are noisy") {
    // Two overlapping blobs with 20% flipped labels: k = 1 memorises the flips.
    Rng rng(8);
    auto d = oracle::blobs(rng, 2, 80, 2, 0.0);
    for (Eigen::Index j = 0; j < d.x.cols(); ++j) d.x(0, j) += d.labels[static_cast<std::size_t>(j)] == 0 ? -1.5 : 1.5;
    for (auto& l : d.labels)
      if (rng.uniform() < 0.2) l = 1 - l;
    std::vector<SampleMeta> meta;
    for (auto l : d.labels) meta.push_back({l, 1});
    GridSpec g = GridSpec::defaults(ClassifierKind::knn);
    g.knn_k = {1, 5};
    const auto r = grid_search(d.x, meta, g, 4, 2, ScenarioSpec::b());
    CHECK(r.scores[1] > r.scores[0]);
    CHECK(r.best.knn_k == 5);
  }

  TEST_CASE("feature space clamps the PCA dimension") {
    SyntheticSpec s = tiny_corpus_spec(2.0, 1);
    const auto c = generate_synthetic(s);
    std::vector<Eigen::MatrixXd> rs;
    for (const auto& r : c.recordings) rs.push_back(resample(r, 20));
    const std::vector<std::size_t> fit{0, 1, 2, 3, 4};
    const auto fsp = fit_feature_space(rs, fit, 100, VectorLayout::time_major);
    CHECK(fsp.pca.output_dim() == 4);
    CHECK(fsp.features.cols() == static_cast<Eigen::Index>(c.recordings.size()));
    CHECK_FALSE(fsp.warnings.empty());
  }

  TEST_CASE("experiment: separable corpus, every scenario, both modes") {
    const auto c = generate_synthetic(tiny_corpus_spec(5.0, 2));
    std::vector<GridSpec> grids{GridSpec::defaults(ClassifierKind::lda), GridSpec::defaults(ClassifierKind::knn),
                                GridSpec::defaults(ClassifierKind::svm)};
    grids[0].lda_dims = {1, 2};
    grids[1].knn_k = {1, 3};
    grids[2].svm_c = {0.1, 1.0};
    grids[2].svm_gamma = {0.001, 0.01};
    for (auto mode : {LeakageMode::paper_faithful, LeakageMode::fold_safe}) {
      ExperimentOptions o;
      o.resample_length = 30;
      o.pca_dim = 20;
      o.cv.mode = mode;
      const std::vector<ScenarioSpec> scenarios{ScenarioSpec::b(), ScenarioSpec::a(2), ScenarioSpec::parse("c:1,3/2,4")};
      const auto rep = run_experiments(c, scenarios, grids, o);
      REQUIRE(rep.outcomes.size() == 9);
      for (const auto& out : rep.outcomes) {
        CHECK(out.folds.size() == 4);
        std::size_t predicted = 0;
        for (const auto& f : out.folds) predicted += f.predictions.size();
        CHECK(out.confusion.total() == predicted);
        CHECK(out.accuracy == static_cast<double>(out.confusion.trace()) / static_cast<double>(out.confusion.total()));
        if (out.scenario.kind == ScenarioKind::b) CHECK(out.accuracy >= 0.9);
      }
      const auto single = run_experiment(c, ScenarioSpec::b(), grids, o);
      CHECK(single.outcomes[0].confusion == rep.outcomes[0].confusion);
    }
  }

  TEST_CASE("experiment errors carry context") {
    const auto c = generate_synthetic(tiny_corpus_spec(1.0, 3));
    std::vector<GridSpec> grids{GridSpec::defaults(ClassifierKind::knn)};
    ExperimentOptions o;
    o.resample_length = 10;
    o.cv.outer_folds = 20;  // more folds than samples per cell
    CHECK(error_message<DataError>([&] { run_experiment(c, ScenarioSpec::b(), grids, o); }).find("scenario b") !=
          std::string::npos);
    auto one = tiny_corpus_spec(1.0, 3);
    one.performer_count = 1;
    CHECK_THROWS_AS(run_experiment(generate_synthetic(one), ScenarioSpec::b(), grids, ExperimentOptions{}), DataError);
  }
}
