// Drives the gestid executable as a user would.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string output;  // stdout and stderr
};

Result gestid(const std::string& args) {
  const std::string cmd = std::string(GESTID_CLI) + " " + args + " 2>&1";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.output.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& f) {
  std::ifstream in(f, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Scratch {
  fs::path root;
  explicit Scratch(const char* tag)
      : root(fs::temp_directory_path() / (std::string("gestid_cli_") + tag + "_" + std::to_string(getpid()))) {
    fs::remove_all(root);
    fs::create_directories(root);
  }
  ~Scratch() { fs::remove_all(root); }
  std::string operator/(const char* name) const { return (root / name).string(); }
};

std::map<std::string, std::string> directory_contents(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) out[e.path().filename().string()] = slurp(e.path());
  return out;
}

const char* kQuickRun = " --classifier knn --knn-k 1,3 --length 20 --pca-dim 10 ";

}  // namespace

TEST_CASE("generate prints a summary and is reproducible") {
  Scratch s("generate");
  const auto a = gestid("generate --performers 4 --gestures 22 --seed 1 --out " + (s / "a"));
  REQUIRE(a.code == 0);
  CHECK(a.output.find("recordings: 880") != std::string::npos);
  REQUIRE(gestid("generate --performers 4 --gestures 22 --seed 1 --out " + (s / "b")).code == 0);
  CHECK(directory_contents(s / "a") == directory_contents(s / "b"));
}

TEST_CASE("usage errors exit with 2") {
  Scratch s("usage");
  const auto r = gestid("generate --performers 0 --out " + (s / "x"));
  CHECK(r.code == 2);
  CHECK(r.output.find("performers") != std::string::npos);
  CHECK(gestid("frobnicate").code == 2);
  CHECK(gestid("run --seed").code == 2);
  CHECK(gestid("--version").code == 0);
}

TEST_CASE("run writes a report; modes differ only in the manifest mode") {
  Scratch s("run");
  REQUIRE(gestid("generate --performers 3 --gestures 2 --sensors 3 --seed 2 --out " + (s / "c")).code == 0);
  const auto r = gestid("-q run --corpus " + (s / "c") + " --scenario b" + kQuickRun + "--out " + (s / "pf"));
  REQUIRE(r.code == 0);
  const auto summary = slurp(s.root / "pf" / "summary.txt");
  CHECK(summary == r.output);
  CHECK(summary.find("\nb ") != std::string::npos);
  CHECK(summary.find("\nc ") == std::string::npos);
  CHECK(fs::exists(s.root / "pf" / "confusion_b_knn.csv"));

  REQUIRE(gestid("-q run --corpus " + (s / "c") + " --scenario b" + kQuickRun + "--mode fold-safe --out " + (s / "fs"))
              .code == 0);
  const auto m1 = slurp(s.root / "pf" / "manifest.toml");
  const auto m2 = slurp(s.root / "fs" / "manifest.toml");
  CHECK(m1.find("mode = \"paper-faithful\"") != std::string::npos);
  CHECK(m2.find("mode = \"fold-safe\"") != std::string::npos);
}

TEST_CASE("rerunning from a manifest reproduces the report bit for bit") {
  Scratch s("manifest");
  REQUIRE(gestid("generate --performers 3 --gestures 2 --sensors 3 --seed 5 --out " + (s / "c")).code == 0);
  REQUIRE(gestid("-q run --corpus " + (s / "c") + " --scenario b --scenario a:1 --seed 9" + kQuickRun + "--out " +
                 (s / "one"))
              .code == 0);
  REQUIRE(gestid("-q run --config " + (s / "one") + "/manifest.toml --out " + (s / "two")).code == 0);
  auto a = directory_contents(s.root / "one");
  auto b = directory_contents(s.root / "two");
  a.erase("manifest.toml");
  b.erase("manifest.toml");
  CHECK(a.size() == 4);
  CHECK(a == b);

  // Flags override the file.
  REQUIRE(gestid("-q run --config " + (s / "one") + "/manifest.toml --seed 10 --out " + (s / "three")).code == 0);
  CHECK(slurp(s.root / "three" / "manifest.toml").find("seed = 10\n") != std::string::npos);
}

TEST_CASE("config errors name the key") {
  Scratch s("config");
  std::ofstream(s / "bad.toml") << "seed = banana\n";
  const auto r = gestid("run --config " + (s / "bad.toml") + " --out " + (s / "o"));
  CHECK(r.code == 2);
  CHECK(r.output.find("seed") != std::string::npos);
  std::ofstream(s / "bad2.toml") << "colour = 3\n";
  const auto r2 = gestid("run --config " + (s / "bad2.toml") + " --out " + (s / "o"));
  CHECK(r2.code == 2);
  CHECK(r2.output.find("colour") != std::string::npos);
}

TEST_CASE("data and numerical failures have their own exit codes") {
  Scratch s("codes");
  fs::create_directories(s.root / "broken");
  std::ofstream(s / "broken/device.csv") << "name,sensor_count,rate_hz\ntoy,2,10\n";
  std::ofstream(s / "broken/index.csv") << "file,performer,gesture,pace\nmissing.csv,p,1,natural\n";
  const auto r = gestid("run --corpus " + (s / "broken") + " --out " + (s / "o"));
  CHECK(r.code == 3);
  CHECK(r.output.find("index.csv:2") != std::string::npos);

  REQUIRE(gestid("generate --performers 2 --gestures 2 --sensors 3 --separation 0 --noise 0 --out " + (s / "flat"))
              .code == 0);
  const auto n = gestid("project --corpus " + (s / "flat") + " --length 20 --pca-dim 5");
  CHECK(n.code == 4);
  CHECK(n.output.find("between-class") != std::string::npos);
}

TEST_CASE("project emits separable, deterministic scatter data") {
  Scratch s("project");
  REQUIRE(gestid("generate --performers 4 --gestures 3 --sensors 4 --seed 3 --out " + (s / "c")).code == 0);
  REQUIRE(gestid("project --corpus " + (s / "c") + " --out " + (s / "a.csv")).code == 0);
  REQUIRE(gestid("project --corpus " + (s / "c") + " --out " + (s / "b.csv")).code == 0);
  const auto csv = slurp(s / "a.csv");
  CHECK(csv == slurp(s / "b.csv"));

  std::map<std::string, std::vector<std::pair<double, double>>> points;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "x,y,performer,gesture");
  while (std::getline(in, line)) {
    std::istringstream f(line);
    std::string x, y, who;
    std::getline(f, x, ',');
    std::getline(f, y, ',');
    std::getline(f, who, ',');
    points[who].emplace_back(std::stod(x), std::stod(y));
  }
  REQUIRE(points.size() == 4);
  std::map<std::string, std::pair<double, double>> centre;
  double within = 0;
  std::size_t n = 0;
  for (const auto& [who, pts] : points) {
    double cx = 0, cy = 0;
    for (auto [x, y] : pts) {
      cx += x;
      cy += y;
    }
    cx /= static_cast<double>(pts.size());
    cy /= static_cast<double>(pts.size());
    centre[who] = {cx, cy};
    for (auto [x, y] : pts) within += (x - cx) * (x - cx) + (y - cy) * (y - cy);
    n += pts.size();
  }
  const double pooled_sd = std::sqrt(within / static_cast<double>(n - points.size()));
  for (auto a = centre.begin(); a != centre.end(); ++a)
    for (auto b = std::next(a); b != centre.end(); ++b)
      CHECK(std::hypot(a->second.first - b->second.first, a->second.second - b->second.second) > pooled_sd);

  REQUIRE(gestid("generate --performers 1 --gestures 2 --sensors 3 --out " + (s / "solo")).code == 0);
  const auto solo = gestid("project --corpus " + (s / "solo"));
  CHECK(solo.code == 3);
  CHECK(solo.output.find("need >= 2 classes") != std::string::npos);
}

TEST_CASE("convert imports raw recordings") {
  Scratch s("convert");
  fs::create_directories(s.root / "raw");
  for (const char* name : {"ann_1_1.txt", "ann_1_7.txt", "ben_1_2.txt"}) {
    std::ofstream f(s.root / "raw" / name);
    for (int t = 0; t < 4; ++t) {
      for (int c = 0; c < 10; ++c) f << (t * 10 + c) << (c == 9 ? "\n" : " ");
    }
  }
  const auto r = gestid("convert --src " + (s / "raw") + " --out " + (s / "c"));
  REQUIRE(r.code == 0);
  CHECK(r.output.find("recordings: 3") != std::string::npos);
  CHECK(slurp(s.root / "c" / "device.csv").find("dg5vhand,10,33") != std::string::npos);
}
