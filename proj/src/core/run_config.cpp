#include "run_config.hpp"

#include <charconv>
#include <limits>

#include "errors.hpp"
#include "text_io.hpp"

namespace gestid {

namespace {

[[noreturn]] void bad(std::string_view key, std::string_view value, std::string_view expected) {
  throw UsageError("config key '" + std::string(key) + "': invalid value '" + std::string(value) + "' (expected " +
                   std::string(expected) + ")");
}

int to_int(std::string_view key, std::string_view value, int min) {
  long v = 0;
  if (!text::parse_int(value, v) || v < min || v > std::numeric_limits<int>::max())
    bad(key, value, "an integer >= " + std::to_string(min));
  return static_cast<int>(v);
}

std::vector<std::string_view> list_items(std::string_view value, char sep) {
  std::vector<std::string_view> out;
  for (auto item : text::split(value, sep)) {
    item = text::trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + "\"";
}

template <typename T, typename F>
std::string array(const std::vector<T>& items, F&& format) {
  std::string out = "[";
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? ", " : "") + format(items[i]);
  return out + "]";
}

}  // namespace

void RunConfig::set(std::string_view key, std::string_view raw) {
  const auto value = text::trim(raw);
  if (key == "corpus") {
    corpus = std::string(value);
  } else if (key == "out") {
    out = std::string(value);
  } else if (key == "scenario") {
    auto items = list_items(value, ';');
    if (items.empty()) bad(key, value, "at least one scenario");
    scenarios.clear();
    for (auto item : items) {
      if (item != "a:all") ScenarioSpec::parse(item);
      scenarios.emplace_back(item);
    }
  } else if (key == "classifier") {
    auto items = list_items(value, ',');
    if (items.empty()) bad(key, value, "a subset of lda,knn,svm");
    classifiers.clear();
    for (auto item : items) {
      const auto kind = parse_classifier(item);
      if (!kind) bad(key, item, "lda, knn or svm");
      classifiers.push_back(*kind);
    }
  } else if (key == "mode") {
    const auto m = parse_leakage_mode(value);
    if (!m) bad(key, value, "paper-faithful or fold-safe");
    mode = *m;
  } else if (key == "seed") {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (value.empty() || ec != std::errc{} || ptr != value.data() + value.size()) bad(key, value, "an unsigned integer");
    seed = v;
  } else if (key == "outer-folds") {
    outer_folds = to_int(key, value, 2);
  } else if (key == "inner-folds") {
    inner_folds = to_int(key, value, 2);
  } else if (key == "pca-dim") {
    pca_dim = to_int(key, value, 1);
  } else if (key == "length") {
    length = to_int(key, value, 2);
  } else if (key == "layout") {
    if (value == "time-major")
      layout = VectorLayout::time_major;
    else if (value == "sensor-major")
      layout = VectorLayout::sensor_major;
    else
      bad(key, value, "time-major or sensor-major");
  } else if (key == "kernel") {
    if (value == "rbf")
      kernel = KernelType::rbf;
    else if (value == "linear")
      kernel = KernelType::linear;
    else
      bad(key, value, "rbf or linear");
  } else if (key == "lda-dims" || key == "knn-k") {
    std::vector<int> v;
    for (auto item : list_items(value, ',')) v.push_back(to_int(key, item, 1));
    if (v.empty()) bad(key, value, "a non-empty list");
    (key == "lda-dims" ? lda_dims : knn_k) = std::move(v);
  } else if (key == "svm-c" || key == "svm-gamma") {
    std::vector<double> v;
    for (auto item : list_items(value, ',')) {
      double d = 0.0;
      if (!text::parse_real(item, d) || !(d > 0.0)) bad(key, item, "a positive number");
      v.push_back(d);
    }
    if (v.empty()) bad(key, value, "a non-empty list");
    (key == "svm-c" ? svm_c : svm_gamma) = std::move(v);
  } else {
    throw UsageError("unknown config key '" + std::string(key) + "'");
  }
}

std::vector<GridSpec> RunConfig::grids() const {
  std::vector<GridSpec> out;
  for (auto kind : classifiers) {
    GridSpec g = GridSpec::defaults(kind);
    g.lda_dims = lda_dims;
    g.knn_k = knn_k;
    g.svm_c = svm_c;
    g.svm_gamma = svm_gamma;
    g.svm_kernel = kernel;
    g.validate();
    out.push_back(std::move(g));
  }
  return out;
}

ExperimentOptions RunConfig::options() const {
  ExperimentOptions o;
  o.resample_length = length;
  o.pca_dim = pca_dim;
  o.layout = layout;
  o.cv = CvSpec{outer_folds, inner_folds, seed, mode};
  o.cv.validate();
  return o;
}

std::vector<ScenarioSpec> RunConfig::resolve_scenarios(const std::vector<int>& corpus_gestures) const {
  std::vector<ScenarioSpec> out;
  for (const auto& s : scenarios) {
    if (s == "a:all") {
      for (int g : corpus_gestures) out.push_back(ScenarioSpec::a(g));
    } else {
      out.push_back(ScenarioSpec::parse(s));
    }
  }
  return out;
}

std::string RunConfig::manifest(std::string_view corpus_digest) const {
  const auto str = [](const std::string& s) { return quote(s); };
  const auto integer = [](int v) { return std::to_string(v); };
  const auto real = [](double v) { return text::format_real(v); };
  std::vector<std::string> names;
  for (auto c : classifiers) names.emplace_back(to_string(c));

  std::string m = "# gestid run manifest; rerun with: gestid run --config <this file>\n";
  m += "gestid-version = " + quote(GESTID_VERSION_STRING) + "\n";
  m += "corpus-digest = " + quote(corpus_digest) + "\n";
  m += "corpus = " + quote(corpus) + "\n";
  m += "out = " + quote(out) + "\n";
  m += "scenario = " + array(scenarios, str) + "\n";
  m += "classifier = " + array(names, str) + "\n";
  m += "mode = " + quote(to_string(mode)) + "\n";
  m += "seed = " + std::to_string(seed) + "\n";
  m += "outer-folds = " + std::to_string(outer_folds) + "\n";
  m += "inner-folds = " + std::to_string(inner_folds) + "\n";
  m += "pca-dim = " + std::to_string(pca_dim) + "\n";
  m += "length = " + std::to_string(length) + "\n";
  m += "layout = " + quote(layout == VectorLayout::time_major ? "time-major" : "sensor-major") + "\n";
  m += "kernel = " + quote(kernel == KernelType::rbf ? "rbf" : "linear") + "\n";
  m += "lda-dims = " + array(lda_dims, integer) + "\n";
  m += "knn-k = " + array(knn_k, integer) + "\n";
  m += "svm-c = " + array(svm_c, real) + "\n";
  m += "svm-gamma = " + array(svm_gamma, real) + "\n";
  return m;
}

}  // namespace gestid
