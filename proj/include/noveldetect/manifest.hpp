#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace noveldetect {

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file, then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

struct FileDigest {
  std::string path;
  std::string sha256;
};

/// Provenance record written next to every CLI output as <output>.manifest.json.
struct RunManifest {
  std::string command;
  std::vector<std::string> arguments;  // argv without the program name
  nlohmann::ordered_json config;
  std::vector<FileDigest> inputs;
  nlohmann::ordered_json params;
  std::optional<std::uint64_t> seed;
  std::vector<FileDigest> outputs;

  std::string to_json() const;
};

std::string toolkit_version();

std::filesystem::path manifest_path_for(const std::filesystem::path& output);

}  // namespace noveldetect
