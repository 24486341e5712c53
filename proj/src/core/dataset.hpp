#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gestid {

enum class Pace { natural, rapid, slow };

std::string_view to_string(Pace pace);
std::optional<Pace> parse_pace(std::string_view text);

struct DeviceProfile {
  std::string name;
  int sensor_count = 0;
  double rate_hz = 0.0;

  // 5 finger-bend, 3 acceleration and 2 orientation channels at ~33 Hz.
  static DeviceProfile dg5vhand();
  // 15 finger-bend, 3 position and 4 orientation channels at ~90 Hz.
  static DeviceProfile cyberglove();
  static std::optional<DeviceProfile> builtin(std::string_view name);

  void validate() const;
  bool operator==(const DeviceProfile&) const = default;
};

// One gesture performance. samples is sensors x time steps in raw device
// units; timestamps are seconds and strictly increasing.
struct Recording {
  Eigen::MatrixXd samples;
  std::vector<double> timestamps;
  std::string performer;
  int gesture = 0;
  Pace pace = Pace::natural;

  Eigen::Index sensor_count() const { return samples.rows(); }
  Eigen::Index length() const { return samples.cols(); }

  // Throws DataError describing the first broken invariant.
  void validate(int expected_sensors) const;
};

bool operator==(const Recording& a, const Recording& b);

struct Corpus {
  DeviceProfile device;
  std::vector<Recording> recordings;
  std::map<int, std::string> gesture_catalog;

  // Distinct performer ids in ascending order. The position of a performer
  // in this list is its class label throughout the pipeline.
  std::vector<std::string> performers() const;
  std::vector<int> gestures() const;

  // Checks every recording against the device profile. Empty corpora are
  // structurally valid; callers that need data check for emptiness.
  void validate() const;

  bool operator==(const Corpus&) const = default;
};

constexpr int kMaxGestureId = 22;

// Gesture names of the IITiS database, ids 1..22.
const std::map<int, std::string>& iitis_gesture_catalog();

struct SyntheticSpec {
  int performer_count = 4;
  int gesture_count = 22;
  std::map<Pace, int> repetitions_per_pace{{Pace::natural, 6}, {Pace::rapid, 2}, {Pace::slow, 2}};
  int sensor_count = 10;
  double style_separation = 5.0;
  double noise_sigma = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
};

Corpus generate_synthetic(const SyntheticSpec& spec);

// Corpus directory: device.csv, index.csv, gestures.csv, one CSV per recording.
Corpus load_corpus(const std::filesystem::path& dir);
void save_corpus(const Corpus& corpus, const std::filesystem::path& dir);

// Options for importing a directory of raw whitespace-separated recordings.
struct ConvertOptions {
  std::string device = "dg5vhand";
  // ECMAScript regex applied to each file name; needs groups for performer,
  // gesture and repetition (1-based).
  std::string pattern = R"(^(\w+?)[-_](\d+)[-_](\d+)\.\w+$)";
  int performer_group = 1;
  int gesture_group = 2;
  int repetition_group = 3;
  bool first_column_is_time = false;
  // Recording protocol: repetitions 1..6 natural, 7..8 rapid, 9..10 slow.
  int natural_repetitions = 6;
  int rapid_repetitions = 2;
};

Corpus convert_raw_directory(const std::filesystem::path& src, const ConvertOptions& options);

}  // namespace gestid
