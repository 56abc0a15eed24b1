#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace dynrmt {

inline constexpr const char* kToolVersion = "dynrmt 0.1.0";

std::uint64_t fnv1a(const void* data, std::size_t n);
std::uint64_t fnv1a(const std::string& s);
std::string hash_hex(std::uint64_t h);

/// Reproducibility record for one CLI run. The manifest hash covers the
/// deterministic fields (command, config, parameters, seed, tool version) and
/// is embedded into every output file; wall-clock and artifact hashes are
/// recorded but excluded from the hash so reruns can be compared byte for
/// byte against it.
class RunManifest {
 public:
  RunManifest(std::string command, nlohmann::json config,
              nlohmann::json parameters, std::uint64_t seed);

  std::uint64_t hash() const { return hash_; }
  std::string hash_string() const { return hash_hex(hash_); }

  void add_artifact(const std::string& path);  // records path + file hash
  void set_wall_clock(double seconds) { wall_clock_ = seconds; }

  void write(const std::string& path) const;

 private:
  std::string command_;
  nlohmann::json config_;
  nlohmann::json parameters_;
  std::uint64_t seed_;
  std::uint64_t hash_;
  double wall_clock_ = 0.0;
  std::vector<std::pair<std::string, std::string>> artifacts_;
};

/// Deterministic CSV writer: fixed "%.12g" formatting, fixed row order,
/// manifest hash in a comment header. Output bytes depend only on values.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& header,
            std::uint64_t manifest_hash);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void row(std::span<const double> values);
  void raw_row(const std::string& line);

 private:
  std::string path_;
  std::string buffer_;
};

std::string format_double(double v);  // the shared "%.12g" formatting

}  // namespace dynrmt
