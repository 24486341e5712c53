#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "classifiers.hpp"
#include "preprocess.hpp"

namespace gestid {

// JSON documents, one per model, tagged with a "type" field. Doubles are
// written in shortest round-trip form, so loading reproduces every value
// bit-for-bit.
std::string serialize(const NormalizationState& state);
std::string serialize(const PcaModel& model);
std::string serialize(const LdaModel& model);
std::string serialize(const KnnModel& model);
std::string serialize(const SvmModel& model);

NormalizationState deserialize_normalization(std::string_view doc);
PcaModel deserialize_pca(std::string_view doc);
LdaModel deserialize_lda(std::string_view doc);
KnnModel deserialize_knn(std::string_view doc);
SvmModel deserialize_svm(std::string_view doc);

}  // namespace gestid
