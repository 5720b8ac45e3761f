#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "tsched/variates.hpp"

namespace tsched::test {

// Returns the scripted values in order, ignoring the requested shapes.
class ScriptedSource final : public VariateSource {
 public:
  explicit ScriptedSource(std::vector<double> values) : values_(std::move(values)) {}
  double beta(double, double) override {
    if (next_ >= values_.size()) throw std::logic_error("ScriptedSource exhausted");
    return values_[next_++];
  }
  std::size_t calls() const { return next_; }

 private:
  std::vector<double> values_;
  std::size_t next_ = 0;
};

// Returns the mean a / (a + b) of each requested Beta.
class MeanSource final : public VariateSource {
 public:
  double beta(double a, double b) override { return a / (a + b); }
};

// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace tsched::test
