#include "dynrmt/manifest.hpp"

#include <cstdio>
#include <fstream>

#include "dynrmt/error.hpp"

namespace dynrmt {

std::uint64_t fnv1a(const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::uint64_t fnv1a(const std::string& s) { return fnv1a(s.data(), s.size()); }

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

RunManifest::RunManifest(std::string command, nlohmann::json config,
                         nlohmann::json parameters, std::uint64_t seed)
    : command_(std::move(command)),
      config_(std::move(config)),
      parameters_(std::move(parameters)),
      seed_(seed) {
  nlohmann::json core{{"command", command_},
                      {"config", config_},
                      {"parameters", parameters_},
                      {"seed", seed_},
                      {"tool_version", kToolVersion}};
  hash_ = fnv1a(core.dump());
}

void RunManifest::add_artifact(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("artifact missing: " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  artifacts_.emplace_back(path, hash_hex(fnv1a(bytes)));
}

void RunManifest::write(const std::string& path) const {
  nlohmann::json j{{"command", command_},
                   {"config", config_},
                   {"parameters", parameters_},
                   {"seed", seed_},
                   {"tool_version", kToolVersion},
                   {"manifest_hash", hash_hex(hash_)},
                   {"wall_clock_seconds", wall_clock_}};
  nlohmann::json arts = nlohmann::json::array();
  for (const auto& [p, h] : artifacts_)
    arts.push_back({{"path", p}, {"hash", h}});
  j["artifacts"] = arts;
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path);
  out << j.dump(2) << "\n";
}

CsvWriter::CsvWriter(const std::string& path, const std::string& header,
                     std::uint64_t manifest_hash)
    : path_(path) {
  buffer_ = "# manifest " + hash_hex(manifest_hash) + "\n" + header + "\n";
}

CsvWriter::~CsvWriter() {
  std::ofstream out(path_, std::ios::binary);
  out << buffer_;
}

void CsvWriter::row(std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) buffer_ += ',';
    buffer_ += format_double(values[i]);
  }
  buffer_ += '\n';
}

void CsvWriter::raw_row(const std::string& line) {
  buffer_ += line;
  buffer_ += '\n';
}

}  // namespace dynrmt
