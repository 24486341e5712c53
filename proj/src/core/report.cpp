#include "report.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <json.hpp>
#include <map>
#include <numeric>

#include "classifiers.hpp"
#include "errors.hpp"
#include "log.hpp"
#include "text_io.hpp"

namespace gestid {

namespace {

struct Fnv1a {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 0x100000001b3ULL;
    }
  }
  void str(std::string_view s) {
    const std::uint64_t n = s.size();
    bytes(&n, sizeof n);
    bytes(s.data(), s.size());
  }
  template <typename T>
  void pod(T v) {
    bytes(&v, sizeof v);
  }
};

std::string percent(double accuracy) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", 100.0 * accuracy);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

std::string pad_right(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace

std::string corpus_digest(const Corpus& corpus) {
  Fnv1a f;
  f.str(corpus.device.name);
  f.pod(corpus.device.sensor_count);
  f.pod(corpus.device.rate_hz);
  for (const auto& [id, name] : corpus.gesture_catalog) {
    f.pod(id);
    f.str(name);
  }
  for (const auto& r : corpus.recordings) {
    f.str(r.performer);
    f.pod(r.gesture);
    f.pod(static_cast<int>(r.pace));
    f.pod(static_cast<std::uint64_t>(r.samples.size()));
    f.bytes(r.timestamps.data(), r.timestamps.size() * sizeof(double));
    f.bytes(r.samples.data(), static_cast<std::size_t>(r.samples.size()) * sizeof(double));
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(f.h));
  return buf;
}

RunResult run_configured(const Corpus& corpus, const RunConfig& config) {
  RunResult result;
  result.config = config;
  result.digest = corpus_digest(corpus);
  const auto grids = config.grids();
  const auto options = config.options();
  const auto scenarios = config.resolve_scenarios(corpus.gestures());
  if (scenarios.empty()) throw DataError("no scenarios to run (corpus has no gestures)");
  result.report = run_experiments(corpus, scenarios, grids, options);
  return result;
}

std::string summary_text(const RunResult& result) {
  const auto& cfg = result.config;
  std::vector<ClassifierKind> columns = cfg.classifiers;
  std::vector<std::string> rows;
  std::map<std::pair<std::string, ClassifierKind>, const ClassifierOutcome*> cell;
  std::map<ClassifierKind, std::vector<double>> a_rows;
  for (const auto& o : result.report.outcomes) {
    const auto tag = o.scenario.tag();
    if (std::find(rows.begin(), rows.end(), tag) == rows.end()) rows.push_back(tag);
    cell[{tag, o.classifier}] = &o;
    if (o.scenario.kind == ScenarioKind::a) a_rows[o.classifier].push_back(o.accuracy);
  }

  std::string s = "gestid " GESTID_VERSION_STRING " performer identification\n";
  s += "mode=" + std::string(to_string(cfg.mode)) + " seed=" + std::to_string(cfg.seed) +
       " folds=" + std::to_string(cfg.outer_folds) + "x" + std::to_string(cfg.inner_folds) +
       " length=" + std::to_string(cfg.length) + " pca-dim=" + std::to_string(cfg.pca_dim) +
       " performers=" + std::to_string(result.report.class_names.size()) + " corpus=" + result.digest + "\n\n";
  s += "Accuracy (%)\n";
  s += pad_right("scenario", 10);
  for (auto c : columns) s += pad(std::string(to_string(c)), 8);
  s += '\n';
  for (const auto& row : rows) {
    s += pad_right(row, 10);
    for (auto c : columns) {
      const auto it = cell.find({row, c});
      s += pad(it == cell.end() ? "-" : percent(it->second->accuracy), 8);
    }
    s += '\n';
  }
  if (!a_rows.empty()) {
    s += pad_right("a (mean)", 10);
    for (auto c : columns) {
      const auto& v = a_rows[c];
      s += pad(v.empty() ? "-" : percent(std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size())), 8);
    }
    s += '\n';
  }

  s += "\nSelected parameters per outer fold\n";
  for (const auto& o : result.report.outcomes) {
    s += pad_right(o.scenario.tag(), 10) + pad_right(std::string(to_string(o.classifier)), 5);
    for (std::size_t f = 0; f < o.folds.size(); ++f) s += (f ? " | " : "") + o.folds[f].chosen.describe();
    s += '\n';
  }
  return s;
}

std::string confusion_csv(const ClassifierOutcome& outcome, const std::vector<std::string>& class_names) {
  std::string s = "true\\predicted";
  for (const auto& name : class_names) s += "," + name;
  s += '\n';
  for (std::size_t i = 0; i < outcome.confusion.classes; ++i) {
    s += class_names[i];
    for (std::size_t j = 0; j < outcome.confusion.classes; ++j) s += "," + std::to_string(outcome.confusion.at(i, j));
    s += '\n';
  }
  return s;
}

std::string report_json(const RunResult& result) {
  using nlohmann::json;
  json outcomes = json::array();
  for (const auto& o : result.report.outcomes) {
    json folds = json::array();
    for (const auto& f : o.folds)
      folds.push_back({{"train", f.train},
                       {"test", f.test},
                       {"predictions", f.predictions},
                       {"chosen", f.chosen.describe()},
                       {"inner_accuracy", f.inner_score},
                       {"accuracy", f.accuracy},
                       {"pca_dim", f.pca_dim}});
    json confusion = json::array();
    for (std::size_t i = 0; i < o.confusion.classes; ++i) {
      json row = json::array();
      for (std::size_t j = 0; j < o.confusion.classes; ++j) row.push_back(o.confusion.at(i, j));
      confusion.push_back(row);
    }
    outcomes.push_back({{"scenario", o.scenario.text()},
                        {"classifier", std::string(to_string(o.classifier))},
                        {"accuracy", o.accuracy},
                        {"confusion", confusion},
                        {"folds", folds},
                        {"warnings", o.warnings},
                        {"grid_failures", o.grid_failures}});
  }
  json doc{{"version", GESTID_VERSION_STRING},
           {"corpus_digest", result.digest},
           {"seed", result.config.seed},
           {"mode", std::string(to_string(result.config.mode))},
           {"classes", result.report.class_names},
           {"outcomes", outcomes}};
  return doc.dump(1) + "\n";
}

void write_report(const RunResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  for (const auto& o : result.report.outcomes)
    text::write_file_atomic(dir / ("confusion_" + o.scenario.tag() + "_" + std::string(to_string(o.classifier)) + ".csv"),
                            confusion_csv(o, result.report.class_names));
  text::write_file_atomic(dir / "summary.txt", summary_text(result));
  text::write_file_atomic(dir / "report.json", report_json(result));
  text::write_file_atomic(dir / "manifest.toml", result.config.manifest(result.digest));
}

std::string lda_scatter_csv(const Corpus& corpus, int length, int pca_dim, VectorLayout layout) {
  const auto performers = corpus.performers();
  if (performers.size() < 2) throw DataError("need >= 2 classes (performers) for an LDA projection");
  const auto pre = preprocess_corpus(corpus, length, layout);
  const auto n = static_cast<Eigen::Index>(pre.vectors.size());
  Eigen::MatrixXd x(pre.vectors.front().values.size(), n);
  std::vector<int> labels;
  for (Eigen::Index i = 0; i < n; ++i) {
    x.col(i) = pre.vectors[static_cast<std::size_t>(i)].values;
    labels.push_back(pre.vectors[static_cast<std::size_t>(i)].label);
  }
  const int effective = static_cast<int>(std::min<Eigen::Index>({pca_dim, x.rows(), n - 1}));
  if (effective < 1) throw DataError("too few recordings for PCA");
  if (effective < pca_dim) warn("PCA dimension reduced from " + std::to_string(pca_dim) + " to " + std::to_string(effective));
  const auto pca = pca_fit(x, effective);
  const Eigen::MatrixXd y = pca.transform_all(x);
  const int dims = performers.size() >= 3 ? 2 : 1;
  if (dims < 2) warn("two performers give a single canonical vector; y is written as 0");
  const auto lda = lda_fit(y, labels, dims);
  const Eigen::MatrixXd z = lda.project(y);

  std::string s = "x,y,performer,gesture\n";
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = corpus.recordings[static_cast<std::size_t>(i)];
    s += text::format_real(z(0, i)) + "," + (dims == 2 ? text::format_real(z(1, i)) : std::string("0")) + "," +
         r.performer + "," + std::to_string(r.gesture) + "\n";
  }
  return s;
}

}  // namespace gestid
