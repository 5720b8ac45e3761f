#pragma once

// Line-oriented, checksummed text container used by campaign snapshots.
//
//   tsched-snapshot <version>
//   checksum <fnv1a-64 of the body, hex>
//   <key> <values...>        (one record per line)
//
// Reals are written with %.17g so every double round-trips exactly.

#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace tsched {

inline constexpr int kSnapshotVersion = 1;

std::uint64_t fnv1a64(std::string_view bytes);
std::string format_real(double v);

class SnapshotWriter {
 public:
  void put(std::string_view key, std::string_view value);
  void put_u64(std::string_view key, std::uint64_t value);
  void put_real(std::string_view key, double value);
  void put_reals(std::string_view key, const std::vector<double>& values);
  void put_u64s(std::string_view key, const std::vector<std::uint64_t>& values);

  // Header + checksum + body.
  std::string finish() const;

 private:
  std::ostringstream body_;
};

class SnapshotReader {
 public:
  // Validates the header, version tag and checksum.
  static SnapshotReader parse(const std::string& text);

  // Each accessor consumes the next record, which must carry `key`.
  std::string get(std::string_view key);
  std::uint64_t get_u64(std::string_view key);
  double get_real(std::string_view key);
  std::vector<double> get_reals(std::string_view key);
  std::vector<std::uint64_t> get_u64s(std::string_view key);

  bool at_end() const { return next_ >= lines_.size(); }

 private:
  std::vector<std::string> lines_;
  std::size_t next_ = 0;
};

}  // namespace tsched
