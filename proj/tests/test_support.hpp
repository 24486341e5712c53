#pragma once

#include <doctest.h>

#include <filesystem>
#include <string>

#include "errors.hpp"

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::string slurp(const std::filesystem::path& file);
void spit(const std::filesystem::path& file, const std::string& content);

// Runs `body` and returns the message of the gestid::Error it throws;
// fails the test when nothing (or something else) is thrown.
template <typename ErrorType, typename F>
std::string error_message(F&& body) {
  try {
    body();
  } catch (const ErrorType& e) {
    return e.what();
  } catch (const std::exception& e) {
    FAIL("unexpected exception: " << e.what());
    return {};
  }
  FAIL("no exception thrown");
  return {};
}
