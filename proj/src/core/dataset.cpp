#include "dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <regex>
#include <set>
#include <sstream>

#include "errors.hpp"
#include "log.hpp"
#include "rng.hpp"
#include "text_io.hpp"

namespace gestid {

namespace fs = std::filesystem;

std::string_view to_string(Pace pace) {
  switch (pace) {
    case Pace::natural: return "natural";
    case Pace::rapid: return "rapid";
    case Pace::slow: return "slow";
  }
  return "natural";
}

std::optional<Pace> parse_pace(std::string_view text) {
  text = text::trim(text);
  if (text == "natural") return Pace::natural;
  if (text == "rapid") return Pace::rapid;
  if (text == "slow") return Pace::slow;
  return std::nullopt;
}

DeviceProfile DeviceProfile::dg5vhand() { return {"dg5vhand", 10, 33.0}; }
DeviceProfile DeviceProfile::cyberglove() { return {"cyberglove", 22, 90.0}; }

std::optional<DeviceProfile> DeviceProfile::builtin(std::string_view name) {
  if (name == "dg5vhand") return dg5vhand();
  if (name == "cyberglove") return cyberglove();
  return std::nullopt;
}

void DeviceProfile::validate() const {
  if (name.empty() || name.find_first_of(",\n") != std::string::npos)
    throw DataError("device name must be non-empty and free of commas");
  if (sensor_count < 1) throw DataError("device sensor_count must be >= 1");
  if (!(rate_hz > 0.0) || !std::isfinite(rate_hz)) throw DataError("device rate_hz must be positive");
}

void Recording::validate(int expected_sensors) const {
  if (samples.rows() != expected_sensors)
    throw DataError("sensor count mismatch: recording has " + std::to_string(samples.rows()) +
                    " sensors, device profile expects " + std::to_string(expected_sensors));
  if (samples.cols() < 2) throw DataError("recording needs at least 2 time steps");
  if (static_cast<Eigen::Index>(timestamps.size()) != samples.cols())
    throw DataError("timestamp count does not match sample count");
  for (std::size_t i = 1; i < timestamps.size(); ++i)
    if (!(timestamps[i] > timestamps[i - 1]))
      throw DataError("timestamps not strictly increasing at step " + std::to_string(i));
  if (performer.empty() || performer.find_first_of(",\n") != std::string::npos)
    throw DataError("performer id must be non-empty and free of commas");
  if (gesture < 1 || gesture > kMaxGestureId)
    throw DataError("gesture id " + std::to_string(gesture) + " outside 1.." + std::to_string(kMaxGestureId));
}

bool operator==(const Recording& a, const Recording& b) {
  return a.performer == b.performer && a.gesture == b.gesture && a.pace == b.pace &&
         a.timestamps == b.timestamps && a.samples.rows() == b.samples.rows() &&
         a.samples.cols() == b.samples.cols() && a.samples == b.samples;
}

std::vector<std::string> Corpus::performers() const {
  std::set<std::string> ids;
  for (const auto& r : recordings) ids.insert(r.performer);
  return {ids.begin(), ids.end()};
}

std::vector<int> Corpus::gestures() const {
  std::set<int> ids;
  for (const auto& r : recordings) ids.insert(r.gesture);
  return {ids.begin(), ids.end()};
}

void Corpus::validate() const {
  device.validate();
  for (std::size_t i = 0; i < recordings.size(); ++i) {
    try {
      recordings[i].validate(device.sensor_count);
    } catch (const DataError& e) {
      throw DataError("recording " + std::to_string(i) + ": " + e.what());
    }
  }
}

const std::map<int, std::string>& iitis_gesture_catalog() {
  static const std::map<int, std::string> catalog{
      {1, "A-OK"},          {2, "Walking"},     {3, "Cutting"},    {4, "Showe away"},
      {5, "Point at self"}, {6, "Thumbs up"},   {7, "Crazy"},      {8, "Knocking"},
      {9, "Cutthroat"},     {10, "Money"},      {11, "Thumbs down"}, {12, "Doubting"},
      {13, "Continue"},     {14, "Speaking"},   {15, "Hello"},     {16, "Grasping"},
      {17, "Scaling"},      {18, "Rotating"},   {19, "Come here"}, {20, "Telephone"},
      {21, "Go away"},      {22, "Relocate"}};
  return catalog;
}

// ---------------------------------------------------------------------------
// Synthetic corpora

void SyntheticSpec::validate() const {
  if (performer_count < 1) throw UsageError("performers must be >= 1");
  if (gesture_count < 1 || gesture_count > kMaxGestureId)
    throw UsageError("gestures must be in 1.." + std::to_string(kMaxGestureId));
  if (sensor_count < 1) throw UsageError("sensors must be >= 1");
  if (!(style_separation >= 0.0) || !std::isfinite(style_separation))
    throw UsageError("style separation must be a non-negative number");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma))
    throw UsageError("noise sigma must be a non-negative number");
  int total = 0;
  for (const auto& [pace, count] : repetitions_per_pace) {
    if (count < 0) throw UsageError("repetition counts must be >= 0");
    total += count;
  }
  if (total < 1) throw UsageError("at least one repetition is required");
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Sum of sinusoids over normalized time u in [0, 1].
struct Wave {
  struct Term {
    double amplitude, frequency, phase;
  };
  std::vector<Term> terms;

  double operator()(double u) const {
    double v = 0.0;
    for (const auto& t : terms) v += t.amplitude * std::sin(kTwoPi * t.frequency * u + t.phase);
    return v;
  }
};

Wave random_template(Rng& rng) {
  Wave w;
  const long count = rng.between(2, 4);
  for (long h = 0; h < count; ++h)
    w.terms.push_back({rng.uniform(0.5, 1.5), static_cast<double>(rng.between(1, 3)), rng.uniform(0.0, kTwoPi)});
  return w;
}

// Offset + one slow sinusoid, scaled to unit RMS over u for standard normal
// coefficients (E[a^2 + b^2/2] = 1.5).
struct StyleCurve {
  double offset, amplitude, phase, frequency;

  static StyleCurve draw(Rng& rng, double frequency) {
    const double scale = 1.0 / std::sqrt(1.5);
    return {scale * rng.normal(), scale * rng.normal(), rng.uniform(0.0, kTwoPi), frequency};
  }
  double operator()(double u) const { return offset + amplitude * std::sin(kTwoPi * frequency * u + phase); }
};

// Fraction of the style variance shared by all gestures of a performer; the
// remainder is specific to each (performer, gesture) pair.
constexpr double kSharedStyleWeight = 0.6;

std::pair<long, long> length_range(Pace pace) {
  switch (pace) {
    case Pace::rapid: return {50, 89};
    case Pace::slow: return {151, 200};
    case Pace::natural: break;
  }
  return {90, 150};
}

std::string performer_name(int index, int count) {
  const int width = std::max<int>(2, static_cast<int>(std::to_string(count).size()));
  std::string digits = std::to_string(index + 1);
  return "p" + std::string(static_cast<std::size_t>(width) - digits.size(), '0') + digits;
}

}  // namespace

Corpus generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  const int m = spec.sensor_count;
  Corpus corpus;
  if (m == 10)
    corpus.device = DeviceProfile::dg5vhand();
  else if (m == 22)
    corpus.device = DeviceProfile::cyberglove();
  else
    corpus.device = {"synthetic", m, 60.0};
  for (int g = 1; g <= spec.gesture_count; ++g) corpus.gesture_catalog[g] = iitis_gesture_catalog().at(g);

  // Raw device units: every channel has its own baseline and gain.
  Rng channel_rng(derive_seed(spec.seed, {1}));
  std::vector<double> baseline(m), gain(m);
  for (int c = 0; c < m; ++c) {
    baseline[c] = channel_rng.uniform(-50.0, 50.0);
    gain[c] = channel_rng.uniform(1.0, 20.0);
  }

  std::vector<std::vector<Wave>> templates(spec.gesture_count);
  for (int g = 0; g < spec.gesture_count; ++g) {
    Rng rng(derive_seed(spec.seed, {2, static_cast<std::uint64_t>(g)}));
    for (int c = 0; c < m; ++c) templates[g].push_back(random_template(rng));
  }

  // RMS distance between two performers' styles is style_separation.
  const double style_scale = spec.style_separation / std::sqrt(2.0);
  const double shared_w = std::sqrt(kSharedStyleWeight);
  const double specific_w = std::sqrt(1.0 - kSharedStyleWeight);
  std::vector<std::vector<StyleCurve>> shared(spec.performer_count);
  std::vector<std::vector<std::vector<StyleCurve>>> specific(spec.performer_count);
  for (int p = 0; p < spec.performer_count; ++p) {
    Rng rng(derive_seed(spec.seed, {3, static_cast<std::uint64_t>(p)}));
    for (int c = 0; c < m; ++c) shared[p].push_back(StyleCurve::draw(rng, 1.0));
    specific[p].resize(spec.gesture_count);
    for (int g = 0; g < spec.gesture_count; ++g) {
      Rng grng(derive_seed(spec.seed, {4, static_cast<std::uint64_t>(p), static_cast<std::uint64_t>(g)}));
      for (int c = 0; c < m; ++c) specific[p][g].push_back(StyleCurve::draw(grng, 2.0));
    }
  }

  for (int p = 0; p < spec.performer_count; ++p) {
    for (int g = 0; g < spec.gesture_count; ++g) {
      for (const auto& [pace, reps] : spec.repetitions_per_pace) {
        for (int rep = 0; rep < reps; ++rep) {
          const auto pace_key = static_cast<std::uint64_t>(pace);
          // Length depends on (gesture, pace, repetition) only, so without
          // style and noise two performers produce identical recordings.
          Rng len_rng(derive_seed(spec.seed, {5, static_cast<std::uint64_t>(g), pace_key, static_cast<std::uint64_t>(rep)}));
          const auto [lo, hi] = length_range(pace);
          const long T = len_rng.between(lo, hi);
          Rng noise_rng(derive_seed(spec.seed, {6, static_cast<std::uint64_t>(p), static_cast<std::uint64_t>(g), pace_key,
                                                static_cast<std::uint64_t>(rep)}));

          Recording r;
          r.performer = performer_name(p, spec.performer_count);
          r.gesture = g + 1;
          r.pace = pace;
          r.samples.resize(m, T);
          r.timestamps.resize(static_cast<std::size_t>(T));
          for (long i = 0; i < T; ++i) {
            r.timestamps[static_cast<std::size_t>(i)] = static_cast<double>(i) / corpus.device.rate_hz;
            const double u = static_cast<double>(i) / static_cast<double>(T - 1);
            for (int c = 0; c < m; ++c) {
              double latent = templates[g][c](u);
              if (style_scale > 0.0)
                latent += style_scale * (shared_w * shared[p][c](u) + specific_w * specific[p][g][c](u));
              if (spec.noise_sigma > 0.0) latent += spec.noise_sigma * noise_rng.normal();
              r.samples(c, i) = baseline[c] + gain[c] * latent;
            }
          }
          corpus.recordings.push_back(std::move(r));
        }
      }
    }
  }
  return corpus;
}

// ---------------------------------------------------------------------------
// On-disk format

namespace {

std::string where(const fs::path& file, std::size_t line) { return file.string() + ":" + std::to_string(line); }

void expect_header(const std::vector<std::string>& lines, const fs::path& file, std::string_view header) {
  if (lines.empty()) throw DataError(where(file, 1) + ": empty file, expected header '" + std::string(header) + "'");
  if (text::trim(lines[0]) != header)
    throw DataError(where(file, 1) + ": expected header '" + std::string(header) + "'");
}

DeviceProfile read_device(const fs::path& file) {
  const auto lines = text::read_lines(file);
  expect_header(lines, file, "name,sensor_count,rate_hz");
  if (lines.size() < 2) throw DataError(where(file, 2) + ": missing device row");
  const auto f = text::split(lines[1], ',');
  long m = 0;
  double rate = 0.0;
  if (f.size() != 3 || !text::parse_int(f[1], m) || !text::parse_real(f[2], rate))
    throw DataError(where(file, 2) + ": malformed device row");
  DeviceProfile d{std::string(text::trim(f[0])), static_cast<int>(m), rate};
  try {
    d.validate();
  } catch (const DataError& e) {
    throw DataError(where(file, 2) + ": " + e.what());
  }
  return d;
}

Recording read_recording(const fs::path& file, const DeviceProfile& device) {
  const auto lines = text::read_lines(file);
  if (lines.empty()) throw DataError(where(file, 1) + ": empty recording file");
  const auto header = text::split(lines[0], ',');
  const bool has_time = !header.empty() && text::trim(header[0]) == "t";
  const std::size_t sensors = header.size() - (has_time ? 1 : 0);
  for (std::size_t c = 0; c < sensors; ++c) {
    const auto name = text::trim(header[c + (has_time ? 1 : 0)]);
    if (name != "s" + std::to_string(c + 1))
      throw DataError(where(file, 1) + ": expected column 's" + std::to_string(c + 1) + "'");
  }
  if (static_cast<int>(sensors) != device.sensor_count)
    throw DataError(where(file, 1) + ": sensor count mismatch: file has " + std::to_string(sensors) +
                    " sensor columns, device '" + device.name + "' expects " + std::to_string(device.sensor_count));

  std::vector<std::vector<double>> rows;
  std::vector<double> times;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    if (text::trim(lines[ln]).empty()) continue;
    const auto f = text::split(lines[ln], ',');
    if (f.size() != header.size())
      throw DataError(where(file, ln + 1) + ": expected " + std::to_string(header.size()) + " fields, found " +
                      std::to_string(f.size()));
    std::vector<double> row(sensors);
    std::size_t offset = 0;
    if (has_time) {
      double t = 0.0;
      if (!text::parse_real(f[0], t)) throw DataError(where(file, ln + 1) + ": malformed timestamp");
      if (!times.empty() && !(t > times.back()))
        throw DataError(where(file, ln + 1) + ": timestamps not strictly increasing");
      times.push_back(t);
      offset = 1;
    }
    for (std::size_t c = 0; c < sensors; ++c)
      if (!text::parse_real(f[c + offset], row[c]))
        throw DataError(where(file, ln + 1) + ": malformed value in column " + std::to_string(c + offset + 1));
    rows.push_back(std::move(row));
  }
  if (rows.size() < 2) throw DataError(where(file, lines.size()) + ": recording needs at least 2 time steps");
  if (!has_time) {
    // No time column: uniform timestamps at the device's nominal rate.
    for (std::size_t i = 0; i < rows.size(); ++i) times.push_back(static_cast<double>(i) / device.rate_hz);
  }

  Recording r;
  r.samples.resize(static_cast<Eigen::Index>(sensors), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t c = 0; c < sensors; ++c)
      r.samples(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(i)) = rows[i][c];
  r.timestamps = std::move(times);
  return r;
}

struct IndexEntry {
  std::string file;
  std::string performer;
  int gesture;
  Pace pace;
  std::size_t line;
};

}  // namespace

Corpus load_corpus(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("corpus directory not found: " + dir.string());
  Corpus corpus;
  corpus.device = read_device(dir / "device.csv");

  const fs::path catalog_file = dir / "gestures.csv";
  if (fs::exists(catalog_file)) {
    const auto lines = text::read_lines(catalog_file);
    expect_header(lines, catalog_file, "gesture,name");
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
      if (lines[ln].empty()) continue;
      const auto comma = lines[ln].find(',');
      long id = 0;
      if (comma == std::string::npos || !text::parse_int(std::string_view(lines[ln]).substr(0, comma), id))
        throw DataError(where(catalog_file, ln + 1) + ": malformed catalog row");
      corpus.gesture_catalog[static_cast<int>(id)] = lines[ln].substr(comma + 1);
    }
  }

  const fs::path index_file = dir / "index.csv";
  if (!fs::exists(index_file)) throw DataError(index_file.string() + ": missing index file");
  const auto lines = text::read_lines(index_file);
  expect_header(lines, index_file, "file,performer,gesture,pace");
  std::vector<IndexEntry> entries;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    if (text::trim(lines[ln]).empty()) continue;
    const auto f = text::split(lines[ln], ',');
    long gesture = 0;
    const auto pace = f.size() == 4 ? parse_pace(f[3]) : std::nullopt;
    if (f.size() != 4 || !text::parse_int(f[2], gesture) || !pace)
      throw DataError(where(index_file, ln + 1) + ": malformed index row");
    entries.push_back({std::string(text::trim(f[0])), std::string(text::trim(f[1])), static_cast<int>(gesture), *pace, ln + 1});
  }
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.file < b.file; });

  for (const auto& e : entries) {
    const fs::path file = dir / e.file;
    if (!fs::exists(file)) throw DataError(where(index_file, e.line) + ": recording file not found: " + e.file);
    Recording r = read_recording(file, corpus.device);
    r.performer = e.performer;
    r.gesture = e.gesture;
    r.pace = e.pace;
    try {
      r.validate(corpus.device.sensor_count);
    } catch (const DataError& err) {
      throw DataError(where(index_file, e.line) + ": " + err.what());
    }
    corpus.recordings.push_back(std::move(r));
  }
  return corpus;
}

void save_corpus(const Corpus& corpus, const fs::path& dir) {
  corpus.validate();
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  text::write_file_atomic(dir / "device.csv", "name,sensor_count,rate_hz\n" + corpus.device.name + "," +
                                                  std::to_string(corpus.device.sensor_count) + "," +
                                                  text::format_real(corpus.device.rate_hz) + "\n");
  std::string catalog = "gesture,name\n";
  for (const auto& [id, name] : corpus.gesture_catalog) {
    if (name.find('\n') != std::string::npos) throw DataError("gesture name contains a newline");
    catalog += std::to_string(id) + "," + name + "\n";
  }
  text::write_file_atomic(dir / "gestures.csv", catalog);

  const int width = std::max<int>(6, static_cast<int>(std::to_string(corpus.recordings.size()).size()));
  std::string index = "file,performer,gesture,pace\n";
  for (std::size_t i = 0; i < corpus.recordings.size(); ++i) {
    const auto& r = corpus.recordings[i];
    std::string number = std::to_string(i + 1);
    const std::string name = "rec_" + std::string(static_cast<std::size_t>(width) - number.size(), '0') + number + ".csv";
    index += name + "," + r.performer + "," + std::to_string(r.gesture) + "," + std::string(to_string(r.pace)) + "\n";

    std::string body = "t";
    for (Eigen::Index c = 0; c < r.samples.rows(); ++c) body += ",s" + std::to_string(c + 1);
    body += '\n';
    for (Eigen::Index t = 0; t < r.samples.cols(); ++t) {
      body += text::format_real(r.timestamps[static_cast<std::size_t>(t)]);
      for (Eigen::Index c = 0; c < r.samples.rows(); ++c) {
        body += ',';
        body += text::format_real(r.samples(c, t));
      }
      body += '\n';
    }
    text::write_file_atomic(dir / name, body);
  }
  text::write_file_atomic(dir / "index.csv", index);
}

// ---------------------------------------------------------------------------
// Raw import

Corpus convert_raw_directory(const fs::path& src, const ConvertOptions& options) {
  if (!fs::is_directory(src)) throw IoError("source directory not found: " + src.string());
  const auto device = DeviceProfile::builtin(options.device);
  if (!device) throw UsageError("unknown device '" + options.device + "' (expected dg5vhand or cyberglove)");
  std::regex pattern;
  try {
    pattern = std::regex(options.pattern);
  } catch (const std::regex_error& e) {
    throw UsageError("invalid file name pattern: " + std::string(e.what()));
  }

  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(src))
    if (entry.is_regular_file()) files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  Corpus corpus;
  corpus.device = *device;
  for (const auto& file : files) {
    const std::string name = file.filename().string();
    std::smatch match;
    if (!std::regex_match(name, match, pattern)) {
      warn("skipping " + file.string() + ": name does not match the pattern");
      continue;
    }
    const auto group = [&](int g) -> std::string {
      if (g < 1 || static_cast<std::size_t>(g) >= match.size())
        throw UsageError("pattern has no capture group " + std::to_string(g));
      return match[static_cast<std::size_t>(g)].str();
    };
    long gesture = 0, repetition = 0;
    if (!text::parse_int(group(options.gesture_group), gesture) || !text::parse_int(group(options.repetition_group), repetition))
      throw DataError(file.string() + ": gesture or repetition is not an integer");

    const auto lines = text::read_lines(file);
    std::vector<std::vector<double>> rows;
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
      std::string line = lines[ln];
      std::replace(line.begin(), line.end(), ',', ' ');
      std::replace(line.begin(), line.end(), '\t', ' ');
      std::istringstream fields(line);
      std::vector<double> row;
      std::string token;
      while (fields >> token) {
        double v = 0.0;
        if (!text::parse_real(token, v)) throw DataError(where(file, ln + 1) + ": malformed value '" + token + "'");
        row.push_back(v);
      }
      if (row.empty()) continue;
      const std::size_t expected = static_cast<std::size_t>(device->sensor_count) + (options.first_column_is_time ? 1 : 0);
      if (row.size() != expected)
        throw DataError(where(file, ln + 1) + ": sensor count mismatch: expected " + std::to_string(expected) +
                        " columns, found " + std::to_string(row.size()));
      rows.push_back(std::move(row));
    }

    Recording r;
    r.performer = group(options.performer_group);
    r.gesture = static_cast<int>(gesture);
    if (repetition <= options.natural_repetitions)
      r.pace = Pace::natural;
    else if (repetition <= options.natural_repetitions + options.rapid_repetitions)
      r.pace = Pace::rapid;
    else
      r.pace = Pace::slow;
    const std::size_t offset = options.first_column_is_time ? 1 : 0;
    r.samples.resize(device->sensor_count, static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      r.timestamps.push_back(options.first_column_is_time ? rows[i][0] : static_cast<double>(i) / device->rate_hz);
      for (int c = 0; c < device->sensor_count; ++c)
        r.samples(c, static_cast<Eigen::Index>(i)) = rows[i][offset + static_cast<std::size_t>(c)];
    }
    try {
      r.validate(device->sensor_count);
    } catch (const DataError& e) {
      throw DataError(file.string() + ": " + e.what());
    }
    corpus.recordings.push_back(std::move(r));
  }
  if (corpus.recordings.empty()) throw DataError("no recordings matched in " + src.string());
  for (int g : corpus.gestures()) {
    const auto it = iitis_gesture_catalog().find(g);
    if (it != iitis_gesture_catalog().end()) corpus.gesture_catalog[g] = it->second;
  }
  return corpus;
}

}  // namespace gestid
