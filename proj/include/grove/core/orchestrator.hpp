#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "grove/embedding/mapper.hpp"
#include "grove/env/environment.hpp"
#include "grove/llm/client.hpp"
#include "grove/ppo/ppo.hpp"
#include "grove/vlm/vlm.hpp"

namespace grove::core {

struct RewardWeights {
    double v = 0.5;
    double l = 0.5;

    /// Both non-negative and finite, sum positive.
    void check() const;
};

/// w.v * r_v + w.l * r_l.
double combine(double r_v, double r_l, const RewardWeights& weights);

inline constexpr int kTriggerWindow = 8;
inline constexpr double kTriggerThreshold = 0.1;

/// True iff the last `window` deltas of `trace` are all strictly negative
/// and the last value is below `threshold`. Shorter traces give false.
bool should_regenerate(std::span<const double> trace, int window = kTriggerWindow,
                       double threshold = kTriggerThreshold);

/// Per-iteration mean R_V. Values are never removed; a regeneration only
/// moves the point the trigger looks back to.
class FitnessTrace {
public:
    /// Throws std::invalid_argument on a non-finite value.
    void append(double value);
    /// Starts a new drop count at the next appended value.
    void mark_regeneration();

    const std::vector<double>& values() const { return values_; }
    /// Values appended since the last regeneration mark.
    std::span<const double> current() const;

private:
    std::vector<double> values_;
    std::size_t start_ = 0;
};

struct RunConfig {
    std::string instruction;
    std::string env = "stick_humanoid";
    RewardWeights weights;
    int trigger_window = kTriggerWindow;
    double trigger_threshold = kTriggerThreshold;
    int max_regens = 5;
    int updates = 100;
    std::uint64_t seed = 0;
    /// "mock", "http", "adversarial" (pose-matching program aimed at the
    /// pose the VLM reward likes least) or "none" (R_L path disabled).
    std::string llm = "mock";
    std::string vlm = "mock";
    std::filesystem::path mapper;  // required for a VLM reward
    std::filesystem::path out_dir;
    /// 0 keeps the PPO defaults.
    int n_envs = 0;
    int horizon = 0;
    int max_retries = 3;
    llm::HttpChatConfig llm_http;
    vlm::HttpEmbedConfig vlm_http;

    /// Throws std::invalid_argument naming the first bad field.
    void check() const;
};

/// Clients and models a run uses. Built from the config by make_services,
/// or assembled by hand in tests.
struct RunServices {
    std::unique_ptr<llm::ChatClient> chat;  // null when llm == "none"
    std::unique_ptr<vlm::TextEmbedder> embedder;
    std::optional<embedding::MapperModel> mapper;
};

RunServices make_services(const RunConfig& config, const env::Environment& environment);

struct RegenerationEvent {
    int iteration = 0;
    double fitness = 0.0;
    int program_index = 0;
};

struct RunSummary {
    std::vector<ppo::IterationStats> iterations;
    std::vector<RegenerationEvent> regenerations;
    std::vector<double> fitness;
    int programs = 0;
    bool degraded = false;
    /// Samples whose R_L evaluation raised an error and counted as 0.
    std::size_t rl_eval_errors = 0;
    double semantic_score = std::numeric_limits<double>::quiet_NaN();
    double reward_distance = std::numeric_limits<double>::quiet_NaN();
};

/// Runs the full loop and writes config.snapshot, metrics.csv, events.jsonl,
/// policy.ckpt, trajectory.csv, summary.json and rewards/NNN.{dsl,log.json}
/// into config.out_dir (when non-empty).
RunSummary run_training(const RunConfig& config);
RunSummary run_training(const RunConfig& config, RunServices& services);

/// Expert reward used for logging: the env's default task when it has one,
/// otherwise (stick_humanoid with an anchored instruction) the oracle cosine
/// to the anchor pose. Empty when neither applies.
using ExpertFn = std::function<double(const env::EnvState&)>;
ExpertFn make_expert(const env::EnvSpec& spec, const std::string& instruction,
                     const std::optional<embedding::MapperModel>& mapper);

}  // namespace grove::core
