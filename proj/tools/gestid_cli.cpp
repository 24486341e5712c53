// gestid command-line front end. Talks to the library only through the C API.

#include <gestid/gestid.h>

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace {

enum ExitCode { kOk = 0, kInternal = 1, kUsage = 2, kData = 3, kNumerical = 4, kIo = 5 };

int exit_code(gestid_status status) {
  switch (status) {
    case GESTID_OK: return kOk;
    case GESTID_ERR_USAGE: return kUsage;
    case GESTID_ERR_DATA: return kData;
    case GESTID_ERR_NUMERICAL: return kNumerical;
    case GESTID_ERR_IO: return kIo;
    case GESTID_ERR_INTERNAL: break;
  }
  return kInternal;
}

struct Failure {
  gestid_status status;
};

void check(gestid_status status) {
  if (status != GESTID_OK) throw Failure{status};
}

struct CorpusDeleter {
  void operator()(gestid_corpus* c) const { gestid_corpus_free(c); }
};
struct ConfigDeleter {
  void operator()(gestid_run_config* c) const { gestid_run_config_free(c); }
};
struct ReportDeleter {
  void operator()(gestid_report* r) const { gestid_report_free(r); }
};
using CorpusPtr = std::unique_ptr<gestid_corpus, CorpusDeleter>;

CorpusPtr load(const std::string& dir) {
  gestid_corpus* c = nullptr;
  check(gestid_corpus_load(dir.c_str(), &c));
  return CorpusPtr(c);
}

void print_corpus(const gestid_corpus* c) {
  std::printf("performers: %zu\ngestures: %zu\nrecordings: %zu\nsensors: %zu\n", gestid_corpus_performer_count(c),
              gestid_corpus_gesture_count(c), gestid_corpus_recording_count(c), gestid_corpus_sensor_count(c));
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) s += sep;
    s += parts[i];
  }
  return s;
}

struct GenerateArgs {
  gestid_synthetic_spec spec{};
  std::string out;
};

struct ConvertArgs {
  std::string src;
  std::string device = "dg5vhand";
  std::string pattern;
  bool time_column = false;
  std::string out;
};

// Run options stay strings; the library validates them and names the key.
struct RunArgs {
  std::vector<std::pair<std::string, CLI::Option*>> scalar;
  std::vector<std::pair<std::string, CLI::Option*>> lists;
  std::vector<std::string> scenario;
  std::vector<std::string> classifier, lda_dims, knn_k, svm_c, svm_gamma;
  std::string corpus, mode, seed, out, outer, inner, pca_dim, length, layout, kernel;
  std::string config;
};

bool is_manifest_extra(const std::string& key) { return key == "gestid-version" || key == "corpus-digest"; }

std::string list_separator(const std::string& key) { return key == "scenario" ? ";" : ","; }

struct ProjectArgs {
  std::string corpus;
  std::string out;
  int length = 100;
  int pca_dim = 100;
};

int cmd_generate(const GenerateArgs& a) {
  gestid_corpus* raw = nullptr;
  check(gestid_corpus_generate(&a.spec, &raw));
  CorpusPtr c(raw);
  check(gestid_corpus_save(c.get(), a.out.c_str()));
  print_corpus(c.get());
  return kOk;
}

int cmd_convert(const ConvertArgs& a) {
  gestid_corpus* raw = nullptr;
  check(gestid_corpus_convert(a.src.c_str(), a.device.c_str(), a.pattern.empty() ? nullptr : a.pattern.c_str(),
                              a.time_column ? 1 : 0, &raw));
  CorpusPtr c(raw);
  check(gestid_corpus_save(c.get(), a.out.c_str()));
  print_corpus(c.get());
  return kOk;
}

int cmd_run(const RunArgs& a) {
  gestid_run_config* raw = nullptr;
  check(gestid_run_config_create(&raw));
  std::unique_ptr<gestid_run_config, ConfigDeleter> cfg(raw);
  if (!a.config.empty()) {
    std::vector<CLI::ConfigItem> items;
    try {
      items = CLI::ConfigTOML().from_file(a.config);
    } catch (const CLI::Error& e) {
      std::fprintf(stderr, "gestid: error: config %s: %s\n", a.config.c_str(), e.what());
      return kUsage;
    }
    for (const auto& item : items) {
      const auto key = item.fullname();
      if (is_manifest_extra(key) || item.name == "++" || item.name == "--") continue;
      std::string value;
      for (std::size_t i = 0; i < item.inputs.size(); ++i) value += (i ? list_separator(key) : "") + item.inputs[i];
      check(gestid_run_config_set(cfg.get(), key.c_str(), value.c_str()));
    }
  }
  for (const auto& [key, opt] : a.scalar)
    if (opt->count() > 0) check(gestid_run_config_set(cfg.get(), key.c_str(), opt->as<std::string>().c_str()));
  for (const auto& [key, opt] : a.lists)
    if (opt->count() > 0) {
      const auto values = opt->as<std::vector<std::string>>();
      check(gestid_run_config_set(cfg.get(), key.c_str(), join(values, list_separator(key)[0]).c_str()));
    }
  const std::string out = gestid_run_config_out(cfg.get());
  if (out.empty()) {
    std::fprintf(stderr, "gestid: error: out: an output directory is required\n");
    return kUsage;
  }
  gestid_report* rep = nullptr;
  check(gestid_run(cfg.get(), nullptr, &rep));
  std::unique_ptr<gestid_report, ReportDeleter> report(rep);
  check(gestid_report_write(report.get(), out.c_str()));
  std::fputs(gestid_report_summary(report.get()), stdout);
  return kOk;
}

int cmd_project(const ProjectArgs& a) {
  auto c = load(a.corpus);
  char* csv = nullptr;
  check(gestid_project(c.get(), a.length, a.pca_dim, &csv));
  std::unique_ptr<char, void (*)(char*)> owned(csv, gestid_string_free);
  if (a.out.empty() || a.out == "-") {
    std::fputs(csv, stdout);
    return kOk;
  }
  std::ofstream f(a.out, std::ios::binary);
  f << csv;
  if (!f.flush()) {
    std::fprintf(stderr, "gestid: error: cannot write %s\n", a.out.c_str());
    return kIo;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Performer identification from hand-gesture recordings"};
  app.set_version_flag("--version", std::string(gestid_version()));
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Suppress warnings");

  GenerateArgs gen;
  gestid_synthetic_spec_default(&gen.spec);
  auto* g = app.add_subcommand("generate", "Write a synthetic corpus");
  g->add_option("--performers", gen.spec.performers, "Number of performers")->capture_default_str();
  g->add_option("--gestures", gen.spec.gestures, "Number of gestures (1..22)")->capture_default_str();
  g->add_option("--natural-reps", gen.spec.natural_repetitions, "Repetitions at natural pace")->capture_default_str();
  g->add_option("--rapid-reps", gen.spec.rapid_repetitions, "Repetitions at rapid pace")->capture_default_str();
  g->add_option("--slow-reps", gen.spec.slow_repetitions, "Repetitions at slow pace")->capture_default_str();
  g->add_option("--sensors", gen.spec.sensors, "Sensors per sample")->capture_default_str();
  g->add_option("--separation", gen.spec.style_separation, "Performer style strength")->capture_default_str();
  g->add_option("--noise", gen.spec.noise_sigma, "Measurement noise sigma")->capture_default_str();
  g->add_option("--seed", gen.spec.seed, "Random seed")->capture_default_str();
  g->add_option("--out", gen.out, "Corpus directory")->required();

  ConvertArgs conv;
  auto* cv = app.add_subcommand("convert", "Import a directory of raw recordings");
  cv->add_option("--src", conv.src, "Directory of raw recordings")->required();
  cv->add_option("--device", conv.device, "dg5vhand or cyberglove")->capture_default_str();
  cv->add_option("--pattern", conv.pattern, "File name regex with performer, gesture, repetition groups");
  cv->add_flag("--time-column", conv.time_column, "First column holds timestamps");
  cv->add_option("--out", conv.out, "Corpus directory")->required();

  RunArgs run;
  auto* r = app.add_subcommand("run", "Run the cross-validated experiment");
  r->add_option("--config", run.config, "Run manifest or config file (key = value); flags override it");
  const auto scalar = [&](const char* name, std::string& target, const char* help) {
    run.scalar.emplace_back(name, r->add_option(std::string("--") + name, target, help));
  };
  const auto list = [&](const char* name, std::vector<std::string>& target, const char* help, char delim) {
    run.lists.emplace_back(name, r->add_option(std::string("--") + name, target, help)->delimiter(delim));
  };
  scalar("corpus", run.corpus, "Corpus directory");
  list("scenario", run.scenario, "a:<gesture>, a:all, b, c or c:<train>/<test>; repeatable", ';');
  list("classifier", run.classifier, "Subset of lda,knn,svm", ',');
  scalar("mode", run.mode, "paper-faithful or fold-safe");
  scalar("seed", run.seed, "Random seed");
  scalar("out", run.out, "Output directory");
  scalar("outer-folds", run.outer, "Outer cross-validation folds");
  scalar("inner-folds", run.inner, "Inner cross-validation folds");
  scalar("pca-dim", run.pca_dim, "PCA dimension");
  scalar("length", run.length, "Resample length");
  scalar("layout", run.layout, "time-major or sensor-major");
  scalar("kernel", run.kernel, "SVM kernel: rbf or linear");
  list("lda-dims", run.lda_dims, "LDA dimension grid", ',');
  list("knn-k", run.knn_k, "k-NN neighbour grid", ',');
  list("svm-c", run.svm_c, "SVM C grid", ',');
  list("svm-gamma", run.svm_gamma, "SVM gamma grid", ',');

  ProjectArgs proj;
  auto* p = app.add_subcommand("project", "Emit 2-D LDA scatter data as CSV");
  p->add_option("--corpus", proj.corpus, "Corpus directory")->required();
  p->add_option("--out", proj.out, "Output CSV (default stdout)");
  p->add_option("--length", proj.length, "Resample length")->capture_default_str();
  p->add_option("--pca-dim", proj.pca_dim, "PCA dimension")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  if (quiet) gestid_set_warning_handler(nullptr, nullptr);
  try {
    if (*g) return cmd_generate(gen);
    if (*cv) return cmd_convert(conv);
    if (*r) return cmd_run(run);
    if (*p) return cmd_project(proj);
  } catch (const Failure& f) {
    std::fprintf(stderr, "gestid: error: %s\n", gestid_last_error());
    return exit_code(f.status);
  }
  return kUsage;
}
