// Copyright 2026 The warmlab Authors
// SPDX-License-Identifier: Apache-2.0
//
// Run manifests: what was run, with which resolved configuration, and the
// SHA-256 digest of every data file it produced.
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace warmlab {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kManifestName = "run.json";

struct RunManifest {
  std::string command;                 // e.g. "urn simulate"
  std::vector<std::string> arguments;  // argv after the program name, without --out and --threads
  nlohmann::json config;               // resolved parameters
  std::uint64_t seed = 0;
  std::string version = kVersion;
  std::string started;                 // UTC, ISO 8601
  std::string finished;
  std::map<std::string, std::string> outputs;  // path relative to the output dir -> sha256 hex
};

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

/// Digests every regular file under `dir` except the manifest itself.
std::map<std::string, std::string> digest_outputs(const std::filesystem::path& dir);

nlohmann::json to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const nlohmann::json& j);

void write_manifest(const std::filesystem::path& dir, const RunManifest& manifest);
RunManifest read_manifest(const std::filesystem::path& path);

}  // namespace warmlab
