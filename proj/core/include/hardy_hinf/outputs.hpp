#pragma once

// File outputs: report.json with a fixed field order, CSV series with header
// rows, SVG plots, and a manifest of SHA-256 digests.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hardy_hinf/pipeline.hpp"

namespace hardy_hinf {

struct ManifestEntry {
  std::string path;  // relative to the output directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct Manifest {
  std::vector<ManifestEntry> files;
};

/// Deterministic JSON text of the report (timings excluded).
std::string report_json(const SynthesisReport& report);

/// Writes every artifact plus manifest.json into `dir` (created if needed).
/// Wall-times go to timings.json, which is listed in the manifest under
/// "volatile" rather than hashed. Throws std::runtime_error naming the path
/// on IO failure.
Manifest emit_outputs(const SynthesisReport& report,
                      const std::vector<Trajectory>& trajectories,
                      const FrequencyResponse* frequency,
                      const KernelField* kernel, const Grid* grid,
                      const std::filesystem::path& dir);

Manifest emit_outputs(const PipelineResult& result, const std::filesystem::path& dir);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace hardy_hinf
