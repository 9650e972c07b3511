#include "spikedeig/manifest.hpp"

#include <array>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <memory>

#include <openssl/evp.h>

#include "spikedeig/errors.hpp"

namespace spikedeig {

std::string sha256_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(Errc::Io, "cannot open " + path + " for hashing");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error(Errc::Io, "sha256 init failed");
  std::array<char, 1 << 16> buf;
  while (is) {
    is.read(buf.data(), buf.size());
    if (is.gcount() > 0 && EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(is.gcount())) != 1)
      throw Error(Errc::Io, "sha256 update failed");
  }
  if (is.bad()) throw Error(Errc::Io, "read failed for " + path);
  std::array<unsigned char, EVP_MAX_MD_SIZE> md;
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1) throw Error(Errc::Io, "sha256 final failed");
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    char b[3];
    std::snprintf(b, sizeof b, "%02x", md[i]);
    hex += b;
  }
  return hex;
}

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void RunManifest::add_file(const std::string& relative_path) {
  const std::string full = (std::filesystem::path(output_dir) / relative_path).string();
  std::error_code ec;
  const auto bytes = std::filesystem::file_size(full, ec);
  if (ec) throw Error(Errc::Io, "cannot stat " + full);
  files.push_back({relative_path, sha256_file(full), bytes});
}

Json RunManifest::to_json() const {
  Json list = Json::array();
  for (const auto& f : files) list.push_back(Json{{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  return Json{{"command", command},     {"config_path", config_path}, {"output_dir", output_dir},
              {"version", version},     {"master_seed", master_seed}, {"started", started},
              {"finished", finished},   {"files", list}};
}

void RunManifest::write() const {
  write_json((std::filesystem::path(output_dir) / "manifest.json").string(), to_json());
}

}  // namespace spikedeig
