#include "noveldetect/manifest.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

#ifndef NOVELDETECT_VERSION
#define NOVELDETECT_VERSION "0.0.0"
#endif

namespace noveldetect {

std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
    throw std::runtime_error("sha256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_file(path)); }

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("short write to '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot move output into place at '" + path.string() + "': " + ec.message());
  }
}

std::string toolkit_version() { return NOVELDETECT_VERSION; }

std::filesystem::path manifest_path_for(const std::filesystem::path& output) {
  auto p = output;
  p += ".manifest.json";
  return p;
}

std::string RunManifest::to_json() const {
  auto digests = [](const std::vector<FileDigest>& files) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& f : files) arr.push_back({{"path", f.path}, {"sha256", f.sha256}});
    return arr;
  };
  nlohmann::ordered_json j;
  j["tool"] = "noveldetect";
  j["version"] = toolkit_version();
  j["command"] = command;
  j["arguments"] = arguments;
  j["config"] = config;
  j["inputs"] = digests(inputs);
  j["params"] = params;
  j["seed"] = seed ? nlohmann::ordered_json(*seed) : nlohmann::ordered_json(nullptr);
  j["outputs"] = digests(outputs);
  return j.dump(2) + "\n";
}

}  // namespace noveldetect
