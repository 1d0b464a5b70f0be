// Copyright 2026 The mtrvp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Run manifests: what a command was asked to do and what it read and wrote.

#ifndef MTRVP_TOOLS__MANIFEST_HPP_
#define MTRVP_TOOLS__MANIFEST_HPP_

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace mtrvp::cli
{

inline constexpr const char * kToolVersion = "0.1.0";

/// Hex SHA-256 of a file's bytes.
inline std::string sha256_file(const std::string & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open '" + path + "' for hashing");
  }
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 init failed");
  }
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  std::string hex;
  char b[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(b, sizeof(b), "%02x", md[i]);
    hex += b;
  }
  return hex;
}

struct FileDigest
{
  std::string path;
  std::string sha256;
};

struct RunManifest
{
  std::string command;
  std::uint64_t seed{0};
  // Resolved flag values in the CLI's config-file syntax; replay feeds this back.
  std::string flags;
  nlohmann::json config;
  std::vector<FileDigest> inputs;
  std::vector<FileDigest> outputs;
  std::string version{kToolVersion};
};

inline std::vector<FileDigest> digest_all(const std::vector<std::string> & paths)
{
  std::vector<FileDigest> out;
  for (const auto & p : paths) out.push_back({p, sha256_file(p)});
  return out;
}

inline nlohmann::json to_json(const RunManifest & m)
{
  auto files = [](const std::vector<FileDigest> & v) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto & f : v) a.push_back({{"path", f.path}, {"sha256", f.sha256}});
    return a;
  };
  return {{"tool", "mtrvp"},     {"version", m.version}, {"command", m.command},          {"seed", m.seed},
          {"flags", m.flags},    {"config", m.config},   {"inputs", files(m.inputs)},     {"outputs", files(m.outputs)}};
}

inline RunManifest manifest_from_json(const nlohmann::json & j)
{
  RunManifest m;
  m.version = j.at("version").get<std::string>();
  m.command = j.at("command").get<std::string>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.flags = j.at("flags").get<std::string>();
  m.config = j.at("config");
  for (const auto & f : j.at("inputs")) m.inputs.push_back({f.at("path"), f.at("sha256")});
  for (const auto & f : j.at("outputs")) m.outputs.push_back({f.at("path"), f.at("sha256")});
  return m;
}

inline void write_manifest(const std::string & path, const RunManifest & m)
{
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open '" + path + "' for writing");
  }
  out << to_json(m).dump(2) << '\n';
}

inline RunManifest read_manifest(const std::string & path)
{
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open manifest '" + path + "'");
  }
  return manifest_from_json(nlohmann::json::parse(in));
}

}  // namespace mtrvp::cli

#endif  // MTRVP_TOOLS__MANIFEST_HPP_
