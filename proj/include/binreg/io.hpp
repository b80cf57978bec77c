#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "binreg/links.hpp"
#include "binreg/losses.hpp"
#include "binreg/model.hpp"

namespace binreg {

inline constexpr const char* kArtifactVersion = "0.1.0";

// Dataset CSV: header `y,x1,...,xd`, one row per observation, features written
// with 17 significant digits so a write/read cycle is bit-exact.
void write_dataset_csv(std::ostream& out, const Dataset& data);
Dataset read_dataset_csv(std::istream& in, const std::string& source = "<stream>");
Dataset load_dataset(const std::filesystem::path& path);
void save_dataset(const std::filesystem::path& path, const Dataset& data);

// Provenance block written next to (or inside) every output file.
struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> config;
  std::uint64_t seed = 0;
  std::string artifact_version = kArtifactVersion;
  std::string started_at;
  std::string finished_at;
};

std::string utc_timestamp();
void write_manifest(std::ostream& out, const RunManifest& manifest);

// Model file: `key=value` lines with link, loss, d and theta_0..theta_d at full
// precision. Anything after a `[section]` line is ignored on reading.
struct ModelFile {
  Link link = Link::logit;
  LossSpec loss = LossSpec::ml();
  ParameterVector theta = ParameterVector::zeros(0);
};

void write_model(std::ostream& out, const ModelFile& model);
ModelFile read_model(std::istream& in, const std::string& source = "<stream>");
ModelFile load_model(const std::filesystem::path& path);

// Writes via a temporary file renamed into place.
void write_text_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace binreg
