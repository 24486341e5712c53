#pragma once

#include <filesystem>
#include <string>

#include "dataset.hpp"
#include "eval.hpp"
#include "run_config.hpp"

namespace gestid {

// FNV-1a over the corpus contents; identifies the data a run used.
std::string corpus_digest(const Corpus& corpus);

struct RunResult {
  RunConfig config;
  std::string digest;
  ExperimentReport report;  // outcomes of every scenario, in config order
};

RunResult run_configured(const Corpus& corpus, const RunConfig& config);

// Accuracy table (rows = scenarios, columns = classifiers, in percent) plus
// the hyperparameters chosen on each outer fold. When per-gesture scenario A
// rows are present, their mean is reported as row "a".
std::string summary_text(const RunResult& result);
std::string confusion_csv(const ClassifierOutcome& outcome, const std::vector<std::string>& class_names);
std::string report_json(const RunResult& result);

// Writes summary.txt, report.json, manifest.toml and
// confusion_<scenario>_<classifier>.csv into `dir`.
void write_report(const RunResult& result, const std::filesystem::path& dir);

// Preprocess, PCA and a 2-D LDA fit on the whole corpus; rows are
// "x,y,performer,gesture". With two performers only one canonical vector
// exists and y is 0.
std::string lda_scatter_csv(const Corpus& corpus, int length, int pca_dim, VectorLayout layout = VectorLayout::time_major);

}  // namespace gestid
