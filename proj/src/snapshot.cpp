#include "tsched/snapshot.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>

#include "tsched/errors.hpp"

namespace tsched {

namespace {

constexpr std::string_view kMagic = "tsched-snapshot";

std::vector<std::string_view> split_tokens(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && s[i] == ' ') ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

std::uint64_t parse_u64(std::string_view token) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw SnapshotError("snapshot: bad integer '" + std::string(token) + "'");
  }
  return v;
}

double parse_real(std::string_view token) {
  const std::string s(token);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw SnapshotError("snapshot: bad real '" + s + "'");
  }
  return v;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void SnapshotWriter::put(std::string_view key, std::string_view value) {
  body_ << key << ' ' << value << '\n';
}

void SnapshotWriter::put_u64(std::string_view key, std::uint64_t value) {
  body_ << key << ' ' << value << '\n';
}

void SnapshotWriter::put_real(std::string_view key, double value) {
  body_ << key << ' ' << format_real(value) << '\n';
}

void SnapshotWriter::put_reals(std::string_view key, const std::vector<double>& values) {
  body_ << key << ' ' << values.size();
  for (const double v : values) body_ << ' ' << format_real(v);
  body_ << '\n';
}

void SnapshotWriter::put_u64s(std::string_view key, const std::vector<std::uint64_t>& values) {
  body_ << key << ' ' << values.size();
  for (const auto v : values) body_ << ' ' << v;
  body_ << '\n';
}

std::string SnapshotWriter::finish() const {
  const std::string body = body_.str();
  char sum[17];
  std::snprintf(sum, sizeof sum, "%016llx", static_cast<unsigned long long>(fnv1a64(body)));
  return std::string(kMagic) + ' ' + std::to_string(kSnapshotVersion) + "\nchecksum " + sum +
         '\n' + body;
}

SnapshotReader SnapshotReader::parse(const std::string& text) {
  const auto first_nl = text.find('\n');
  if (first_nl == std::string::npos) throw SnapshotError("snapshot: truncated header");
  const auto header = split_tokens(std::string_view(text).substr(0, first_nl));
  if (header.size() != 2 || header[0] != kMagic) throw SnapshotError("snapshot: not a snapshot file");
  std::uint64_t version = 0;
  try {
    version = parse_u64(header[1]);
  } catch (const SnapshotError&) {
    throw SnapshotVersionError("snapshot: unreadable version tag");
  }
  if (version != static_cast<std::uint64_t>(kSnapshotVersion)) {
    throw SnapshotVersionError("snapshot: version " + std::to_string(version) +
                               " is not supported (expected " +
                               std::to_string(kSnapshotVersion) + ")");
  }
  const auto second_nl = text.find('\n', first_nl + 1);
  if (second_nl == std::string::npos) throw SnapshotError("snapshot: missing checksum");
  const auto sum_line =
      split_tokens(std::string_view(text).substr(first_nl + 1, second_nl - first_nl - 1));
  if (sum_line.size() != 2 || sum_line[0] != "checksum") throw SnapshotError("snapshot: missing checksum");
  const std::string_view body = std::string_view(text).substr(second_nl + 1);
  std::uint64_t expected = 0;
  const auto [ptr, ec] =
      std::from_chars(sum_line[1].data(), sum_line[1].data() + sum_line[1].size(), expected, 16);
  if (ec != std::errc() || ptr != sum_line[1].data() + sum_line[1].size() ||
      expected != fnv1a64(body)) {
    throw SnapshotChecksumError("snapshot: checksum mismatch (file is corrupt)");
  }

  SnapshotReader reader;
  std::size_t pos = 0;
  while (pos < body.size()) {
    auto nl = body.find('\n', pos);
    if (nl == std::string_view::npos) nl = body.size();
    reader.lines_.emplace_back(body.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return reader;
}

std::string SnapshotReader::get(std::string_view key) {
  if (at_end()) throw SnapshotError("snapshot: missing record '" + std::string(key) + "'");
  const std::string& line = lines_[next_];
  const auto space = line.find(' ');
  const std::string_view got = std::string_view(line).substr(0, space);
  if (got != key) {
    throw SnapshotError("snapshot: expected record '" + std::string(key) + "', found '" +
                        std::string(got) + "'");
  }
  ++next_;
  return space == std::string::npos ? std::string() : line.substr(space + 1);
}

std::uint64_t SnapshotReader::get_u64(std::string_view key) { return parse_u64(get(key)); }

double SnapshotReader::get_real(std::string_view key) { return parse_real(get(key)); }

std::vector<double> SnapshotReader::get_reals(std::string_view key) {
  const std::string value = get(key);
  const auto tokens = split_tokens(value);
  if (tokens.empty() || parse_u64(tokens[0]) != tokens.size() - 1) {
    throw SnapshotError("snapshot: bad length in '" + std::string(key) + "'");
  }
  std::vector<double> out;
  out.reserve(tokens.size() - 1);
  for (std::size_t i = 1; i < tokens.size(); ++i) out.push_back(parse_real(tokens[i]));
  return out;
}

std::vector<std::uint64_t> SnapshotReader::get_u64s(std::string_view key) {
  const std::string value = get(key);
  const auto tokens = split_tokens(value);
  if (tokens.empty() || parse_u64(tokens[0]) != tokens.size() - 1) {
    throw SnapshotError("snapshot: bad length in '" + std::string(key) + "'");
  }
  std::vector<std::uint64_t> out;
  out.reserve(tokens.size() - 1);
  for (std::size_t i = 1; i < tokens.size(); ++i) out.push_back(parse_u64(tokens[i]));
  return out;
}

}  // namespace tsched
