#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "grove/env/environment.hpp"
#include "grove/nn/mlp.hpp"

namespace grove::data {

/// Poses stored as rows of flattened joint angles (joint-major: j0.x, j0.y,
/// j0.z, j1.x, ...).
struct PoseDataset {
    int joints = 0;
    nn::Matrix angles;                 // n x 3J
    std::vector<std::string> sources;  // one tag per pose

    std::size_t size() const { return static_cast<std::size_t>(angles.rows()); }
    bool empty() const { return angles.rows() == 0; }
    env::PoseVector pose(std::size_t i) const;
    void append(const env::PoseVector& pose, const std::string& source);
    /// Rows i with i % every == 0, preserving order.
    PoseDataset subsample(int every) const;
};

/// Mixture of `modes` isotropic Gaussians (sigma 0.1 rad) in flattened angle
/// space; means uniform in [-pi/2, pi/2]; samples clipped to [-pi, pi].
PoseDataset synth_corpus(std::size_t n, std::size_t modes, int joints, std::uint64_t seed);

class IngestError : public std::runtime_error {
public:
    IngestError(int line, const std::string& message);
    int line() const { return line_; }

private:
    int line_;
};

struct IngestIssue {
    int line = 0;
    std::string message;
};

struct IngestResult {
    PoseDataset dataset;
    std::vector<IngestIssue> warnings;
};

/// Reads `<joint>_{x|y|z}` columns (any column order, extra columns ignored).
/// Missing columns throw. Malformed rows (wrong cell count, non-numeric
/// cell, |angle| > pi) are skipped with a warning, or throw in strict mode.
IngestResult ingest_csv(const std::filesystem::path& path, const env::EnvSpec& spec, bool strict = false);
IngestResult ingest_csv_text(const std::string& text, const env::EnvSpec& spec, bool strict = false,
                             const std::string& source = "csv");

/// Header plus one row per pose, angles printed with 9 significant digits.
std::string export_csv_text(const PoseDataset& dataset, const env::EnvSpec& spec);
void export_csv(const PoseDataset& dataset, const env::EnvSpec& spec, const std::filesystem::path& path);

}  // namespace grove::data
