#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "grove/core/orchestrator.hpp"
#include "grove/llm/generate.hpp"

namespace grove::core {

/// metrics.csv header, in column order.
const std::vector<std::string>& metrics_columns();
std::string metrics_row(const ppo::IterationStats& stats, bool regenerated);

/// API keys are left out of the snapshot.
nlohmann::json config_to_json(const RunConfig& config);
RunConfig config_from_json(const nlohmann::json& j);
RunConfig read_config_snapshot(const std::filesystem::path& path);

/// Writes the run directory. Every method is a no-op when constructed with
/// an empty path, so library callers can run without touching the disk.
class RunWriter {
public:
    explicit RunWriter(const std::filesystem::path& dir);

    bool enabled() const { return !dir_.empty(); }
    const std::filesystem::path& dir() const { return dir_; }

    void config(const RunConfig& config);
    void metrics(const ppo::IterationStats& stats, bool regenerated);
    /// One JSON object per line: {"seq", "iteration", "event", ...extra}.
    void event(int iteration, const std::string& name, nlohmann::json extra = nlohmann::json::object());
    /// rewards/NNN.dsl with the program and rewards/NNN.log.json with every attempt.
    void program(int index, int iteration, const llm::GenerationResult& result);
    void text(const std::string& name, const std::string& content);
    void json(const std::string& name, const nlohmann::json& value);

private:
    std::filesystem::path dir_;
    std::ofstream metrics_;
    std::ofstream events_;
    long seq_ = 0;
};

}  // namespace grove::core
