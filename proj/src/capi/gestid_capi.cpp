#include "gestid/gestid.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "errors.hpp"
#include "log.hpp"
#include "report.hpp"
#include "run_config.hpp"

struct gestid_corpus {
  gestid::Corpus corpus;
};

struct gestid_run_config {
  gestid::RunConfig config;
};

struct gestid_report {
  gestid::RunResult result;
  std::string summary;
  std::string json;
  std::string manifest;
  std::vector<std::string> scenario_texts;
};

namespace {

thread_local std::string last_error;

gestid_status status_of(gestid::ErrorKind kind) {
  switch (kind) {
    case gestid::ErrorKind::usage: return GESTID_ERR_USAGE;
    case gestid::ErrorKind::data: return GESTID_ERR_DATA;
    case gestid::ErrorKind::numerical: return GESTID_ERR_NUMERICAL;
    case gestid::ErrorKind::io: return GESTID_ERR_IO;
  }
  return GESTID_ERR_INTERNAL;
}

template <typename F>
gestid_status guarded(F&& body) {
  try {
    last_error.clear();
    body();
    return GESTID_OK;
  } catch (const gestid::Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown error";
  }
  return GESTID_ERR_INTERNAL;
}

void require(const void* p, const char* what) {
  if (!p) throw gestid::UsageError(std::string(what) + " must not be NULL");
}

char* duplicate(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* gestid_version(void) { return GESTID_VERSION_STRING; }

const char* gestid_last_error(void) { return last_error.c_str(); }

void gestid_set_warning_handler(gestid_warning_fn handler, void* user_data) {
  if (!handler) {
    gestid::set_warning_sink({});
    return;
  }
  gestid::set_warning_sink([handler, user_data](const std::string& message) { handler(message.c_str(), user_data); });
}

void gestid_string_free(char* s) { std::free(s); }

void gestid_synthetic_spec_default(gestid_synthetic_spec* spec) {
  if (!spec) return;
  const gestid::SyntheticSpec d;
  spec->performers = d.performer_count;
  spec->gestures = d.gesture_count;
  spec->natural_repetitions = d.repetitions_per_pace.at(gestid::Pace::natural);
  spec->rapid_repetitions = d.repetitions_per_pace.at(gestid::Pace::rapid);
  spec->slow_repetitions = d.repetitions_per_pace.at(gestid::Pace::slow);
  spec->sensors = d.sensor_count;
  spec->style_separation = d.style_separation;
  spec->noise_sigma = d.noise_sigma;
  spec->seed = d.seed;
}

gestid_status gestid_corpus_generate(const gestid_synthetic_spec* spec, gestid_corpus** out) {
  return guarded([&] {
    require(spec, "spec");
    require(out, "out");
    gestid::SyntheticSpec s;
    s.performer_count = spec->performers;
    s.gesture_count = spec->gestures;
    s.repetitions_per_pace = {{gestid::Pace::natural, spec->natural_repetitions},
                              {gestid::Pace::rapid, spec->rapid_repetitions},
                              {gestid::Pace::slow, spec->slow_repetitions}};
    s.sensor_count = spec->sensors;
    s.style_separation = spec->style_separation;
    s.noise_sigma = spec->noise_sigma;
    s.seed = spec->seed;
    *out = new gestid_corpus{gestid::generate_synthetic(s)};
  });
}

gestid_status gestid_corpus_load(const char* dir, gestid_corpus** out) {
  return guarded([&] {
    require(dir, "dir");
    require(out, "out");
    *out = new gestid_corpus{gestid::load_corpus(dir)};
  });
}

gestid_status gestid_corpus_save(const gestid_corpus* corpus, const char* dir) {
  return guarded([&] {
    require(corpus, "corpus");
    require(dir, "dir");
    gestid::save_corpus(corpus->corpus, dir);
  });
}

gestid_status gestid_corpus_convert(const char* src_dir, const char* device, const char* pattern,
                                    int first_column_is_time, gestid_corpus** out) {
  return guarded([&] {
    require(src_dir, "src_dir");
    require(out, "out");
    gestid::ConvertOptions options;
    if (device) options.device = device;
    if (pattern) options.pattern = pattern;
    options.first_column_is_time = first_column_is_time != 0;
    *out = new gestid_corpus{gestid::convert_raw_directory(src_dir, options)};
  });
}

void gestid_corpus_free(gestid_corpus* corpus) { delete corpus; }

size_t gestid_corpus_recording_count(const gestid_corpus* corpus) {
  return corpus ? corpus->corpus.recordings.size() : 0;
}

size_t gestid_corpus_performer_count(const gestid_corpus* corpus) {
  return corpus ? corpus->corpus.performers().size() : 0;
}

size_t gestid_corpus_gesture_count(const gestid_corpus* corpus) {
  return corpus ? corpus->corpus.gestures().size() : 0;
}

size_t gestid_corpus_sensor_count(const gestid_corpus* corpus) {
  return corpus ? static_cast<size_t>(corpus->corpus.device.sensor_count) : 0;
}

gestid_status gestid_corpus_digest(const gestid_corpus* corpus, char out[17]) {
  return guarded([&] {
    require(corpus, "corpus");
    require(out, "out");
    const auto d = gestid::corpus_digest(corpus->corpus);
    std::memcpy(out, d.c_str(), 17);
  });
}

gestid_status gestid_project(const gestid_corpus* corpus, int length, int pca_dim, char** csv) {
  return guarded([&] {
    require(corpus, "corpus");
    require(csv, "csv");
    if (length < 2) throw gestid::UsageError("length must be >= 2");
    if (pca_dim < 1) throw gestid::UsageError("pca-dim must be >= 1");
    *csv = duplicate(gestid::lda_scatter_csv(corpus->corpus, length, pca_dim));
  });
}

gestid_status gestid_run_config_create(gestid_run_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new gestid_run_config{};
  });
}

void gestid_run_config_free(gestid_run_config* config) { delete config; }

gestid_status gestid_run_config_set(gestid_run_config* config, const char* key, const char* value) {
  return guarded([&] {
    require(config, "config");
    require(key, "key");
    require(value, "value");
    config->config.set(key, value);
  });
}

const char* gestid_run_config_out(const gestid_run_config* config) {
  return config ? config->config.out.c_str() : "";
}

gestid_status gestid_run(const gestid_run_config* config, const gestid_corpus* corpus, gestid_report** out) {
  return guarded([&] {
    require(config, "config");
    require(out, "out");
    gestid::Corpus loaded;
    if (!corpus) {
      if (config->config.corpus.empty()) throw gestid::UsageError("corpus: no corpus directory configured");
      loaded = gestid::load_corpus(config->config.corpus);
    }
    const auto& c = corpus ? corpus->corpus : loaded;
    auto report = std::make_unique<gestid_report>();
    report->result = gestid::run_configured(c, config->config);
    report->summary = gestid::summary_text(report->result);
    report->json = gestid::report_json(report->result);
    report->manifest = report->result.config.manifest(report->result.digest);
    for (const auto& o : report->result.report.outcomes) report->scenario_texts.push_back(o.scenario.text());
    *out = report.release();
  });
}

void gestid_report_free(gestid_report* report) { delete report; }

gestid_status gestid_report_write(const gestid_report* report, const char* dir) {
  return guarded([&] {
    require(report, "report");
    require(dir, "dir");
    gestid::write_report(report->result, dir);
  });
}

const char* gestid_report_summary(const gestid_report* report) { return report ? report->summary.c_str() : ""; }

const char* gestid_report_json(const gestid_report* report) { return report ? report->json.c_str() : ""; }

const char* gestid_report_manifest(const gestid_report* report) { return report ? report->manifest.c_str() : ""; }

size_t gestid_report_outcome_count(const gestid_report* report) {
  return report ? report->result.report.outcomes.size() : 0;
}

gestid_status gestid_report_outcome(const gestid_report* report, size_t index, gestid_outcome* out) {
  return guarded([&] {
    require(report, "report");
    require(out, "out");
    const auto& outcomes = report->result.report.outcomes;
    if (index >= outcomes.size()) throw gestid::UsageError("outcome index out of range");
    const auto& o = outcomes[index];
    out->scenario = report->scenario_texts[index].c_str();
    out->classifier = gestid::to_string(o.classifier).data();
    out->accuracy = o.accuracy;
    out->warning_count = o.warnings.size();
  });
}

}  // extern "C"
