// Exercises the shared library through its C interface only.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <gestid/gestid.h>

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <string>
#include <unistd.h>

namespace {

std::string temp_dir(const char* tag) {
  const auto p = std::filesystem::temp_directory_path() / (std::string("gestid_capi_") + tag + "_" + std::to_string(getpid()));
  std::filesystem::remove_all(p);
  return p.string();
}

gestid_synthetic_spec small_spec() {
  gestid_synthetic_spec s;
  gestid_synthetic_spec_default(&s);
  s.performers = 3;
  s.gestures = 2;
  s.sensors = 3;
  s.seed = 1;
  return s;
}

void count_warning(const char*, void* user) { ++*static_cast<int*>(user); }

}  // namespace

TEST_CASE("version and defaults") {
  CHECK(std::strlen(gestid_version()) > 0);
  gestid_synthetic_spec s;
  gestid_synthetic_spec_default(&s);
  CHECK(s.performers == 4);
  CHECK(s.gestures == 22);
  CHECK(s.natural_repetitions + s.rapid_repetitions + s.slow_repetitions == 10);
}

TEST_CASE("corpus lifecycle") {
  const auto spec = small_spec();
  gestid_corpus* c = nullptr;
  REQUIRE(gestid_corpus_generate(&spec, &c) == GESTID_OK);
  CHECK(gestid_corpus_recording_count(c) == 60);
  CHECK(gestid_corpus_performer_count(c) == 3);
  CHECK(gestid_corpus_gesture_count(c) == 2);
  CHECK(gestid_corpus_sensor_count(c) == 3);
  char digest[17];
  REQUIRE(gestid_corpus_digest(c, digest) == GESTID_OK);
  CHECK(std::strlen(digest) == 16);

  const auto dir = temp_dir("corpus");
  REQUIRE(gestid_corpus_save(c, dir.c_str()) == GESTID_OK);
  gestid_corpus* back = nullptr;
  REQUIRE(gestid_corpus_load(dir.c_str(), &back) == GESTID_OK);
  char digest2[17];
  gestid_corpus_digest(back, digest2);
  CHECK(std::string(digest) == digest2);
  gestid_corpus_free(back);
  gestid_corpus_free(c);
  std::filesystem::remove_all(dir);
}

TEST_CASE("errors map to status codes with messages") {
  auto spec = small_spec();
  spec.performers = 0;
  gestid_corpus* c = nullptr;
  CHECK(gestid_corpus_generate(&spec, &c) == GESTID_ERR_USAGE);
  CHECK(c == nullptr);
  CHECK(std::string(gestid_last_error()).find("performers") != std::string::npos);
  CHECK(gestid_corpus_load("/nonexistent/gestid", &c) == GESTID_ERR_IO);
  CHECK(gestid_corpus_generate(nullptr, &c) == GESTID_ERR_USAGE);

  gestid_run_config* cfg = nullptr;
  REQUIRE(gestid_run_config_create(&cfg) == GESTID_OK);
  CHECK(gestid_run_config_set(cfg, "mode", "sloppy") == GESTID_ERR_USAGE);
  CHECK(std::string(gestid_last_error()).find("mode") != std::string::npos);
  CHECK(gestid_run_config_set(cfg, "mode", "fold-safe") == GESTID_OK);
  CHECK(std::string(gestid_last_error()).empty());
  gestid_run_config_free(cfg);

  const auto one_spec = [] {
    auto s = small_spec();
    s.performers = 1;
    return s;
  }();
  REQUIRE(gestid_corpus_generate(&one_spec, &c) == GESTID_OK);
  char* csv = nullptr;
  CHECK(gestid_project(c, 20, 10, &csv) == GESTID_ERR_DATA);
  CHECK(std::string(gestid_last_error()).find("need >= 2 classes") != std::string::npos);
  gestid_corpus_free(c);
}

TEST_CASE("run, inspect and write a report") {
  int warnings = 0;
  gestid_set_warning_handler(count_warning, &warnings);
  const auto spec = small_spec();
  gestid_corpus* c = nullptr;
  REQUIRE(gestid_corpus_generate(&spec, &c) == GESTID_OK);
  gestid_run_config* cfg = nullptr;
  REQUIRE(gestid_run_config_create(&cfg) == GESTID_OK);
  REQUIRE(gestid_run_config_set(cfg, "classifier", "knn,lda") == GESTID_OK);
  REQUIRE(gestid_run_config_set(cfg, "length", "20") == GESTID_OK);
  REQUIRE(gestid_run_config_set(cfg, "pca-dim", "10") == GESTID_OK);
  REQUIRE(gestid_run_config_set(cfg, "lda-dims", "1,2,3") == GESTID_OK);
  gestid_report* rep = nullptr;
  REQUIRE(gestid_run(cfg, c, &rep) == GESTID_OK);
  CHECK(warnings > 0);  // lda dimensions above the rank bound are skipped
  REQUIRE(gestid_report_outcome_count(rep) == 2);
  gestid_outcome o;
  REQUIRE(gestid_report_outcome(rep, 0, &o) == GESTID_OK);
  CHECK(std::string(o.scenario) == "b");
  CHECK(std::string(o.classifier) == "knn");
  CHECK(o.accuracy >= 0.0);
  CHECK(o.accuracy <= 1.0);
  CHECK(gestid_report_outcome(rep, 5, &o) == GESTID_ERR_USAGE);
  CHECK(std::string(gestid_report_summary(rep)).find("Accuracy") != std::string::npos);
  CHECK(std::string(gestid_report_manifest(rep)).find("classifier = [\"knn\", \"lda\"]") != std::string::npos);

  const auto dir = temp_dir("report");
  REQUIRE(gestid_report_write(rep, dir.c_str()) == GESTID_OK);
  CHECK(std::filesystem::exists(std::filesystem::path(dir) / "confusion_b_lda.csv"));
  std::filesystem::remove_all(dir);

  char* csv = nullptr;
  REQUIRE(gestid_project(c, 20, 10, &csv) == GESTID_OK);
  CHECK(std::string(csv).rfind("x,y,performer,gesture\n", 0) == 0);
  gestid_string_free(csv);

  gestid_report_free(rep);
  gestid_run_config_free(cfg);
  gestid_corpus_free(c);
  gestid_set_warning_handler(nullptr, nullptr);
}

TEST_CASE("run without a corpus needs a corpus path") {
  gestid_run_config* cfg = nullptr;
  REQUIRE(gestid_run_config_create(&cfg) == GESTID_OK);
  gestid_report* rep = nullptr;
  CHECK(gestid_run(cfg, nullptr, &rep) == GESTID_ERR_USAGE);
  gestid_run_config_free(cfg);
}
