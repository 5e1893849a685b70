#include "grove/core/run_artifacts.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "grove/common/csv.hpp"

namespace grove::core {

namespace {

// Round-trip precision keeps reruns byte-identical and comparable.
std::string num(double v) { return csv::format_number(v, 17); }

void ensure(const std::ofstream& out, const std::filesystem::path& path) {
    if (!out) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
}

}  // namespace

const std::vector<std::string>& metrics_columns() {
    static const std::vector<std::string> cols = {"update_index", "mean_episode_return", "mean_rv",
                                                  "mean_rl",      "expert_reward_mean",  "kl",
                                                  "clip_fraction", "regen_flag"};
    return cols;
}

std::string metrics_row(const ppo::IterationStats& s, bool regenerated) {
    return csv::join({std::to_string(s.index), num(s.mean_episode_return), num(s.mean_rv), num(s.mean_rl),
                      num(s.expert_reward_mean), num(s.update.approx_kl), num(s.update.clip_fraction),
                      regenerated ? "1" : "0"});
}

nlohmann::json config_to_json(const RunConfig& c) {
    return {
        {"instruction", c.instruction},
        {"env", c.env},
        {"weights", {{"v", c.weights.v}, {"l", c.weights.l}}},
        {"trigger_window", c.trigger_window},
        {"trigger_threshold", c.trigger_threshold},
        {"max_regens", c.max_regens},
        {"updates", c.updates},
        {"seed", c.seed},
        {"llm", c.llm},
        {"vlm", c.vlm},
        {"mapper", c.mapper.string()},
        {"out_dir", c.out_dir.string()},
        {"n_envs", c.n_envs},
        {"horizon", c.horizon},
        {"max_retries", c.max_retries},
        {"llm_http", {{"endpoint", c.llm_http.endpoint}, {"model", c.llm_http.model},
                      {"temperature", c.llm_http.temperature}}},
        {"vlm_http", {{"endpoint", c.vlm_http.endpoint}, {"model", c.vlm_http.model}}},
    };
}

RunConfig config_from_json(const nlohmann::json& j) {
    RunConfig c;
    try {
        c.instruction = j.at("instruction").get<std::string>();
        c.env = j.at("env").get<std::string>();
        c.weights.v = j.at("weights").at("v").get<double>();
        c.weights.l = j.at("weights").at("l").get<double>();
        c.trigger_window = j.at("trigger_window").get<int>();
        c.trigger_threshold = j.at("trigger_threshold").get<double>();
        c.max_regens = j.at("max_regens").get<int>();
        c.updates = j.at("updates").get<int>();
        c.seed = j.at("seed").get<std::uint64_t>();
        c.llm = j.at("llm").get<std::string>();
        c.vlm = j.at("vlm").get<std::string>();
        c.mapper = j.at("mapper").get<std::string>();
        c.out_dir = j.at("out_dir").get<std::string>();
        c.n_envs = j.at("n_envs").get<int>();
        c.horizon = j.at("horizon").get<int>();
        c.max_retries = j.at("max_retries").get<int>();
        c.llm_http.endpoint = j.at("llm_http").at("endpoint").get<std::string>();
        c.llm_http.model = j.at("llm_http").at("model").get<std::string>();
        c.llm_http.temperature = j.at("llm_http").at("temperature").get<double>();
        c.vlm_http.endpoint = j.at("vlm_http").at("endpoint").get<std::string>();
        c.vlm_http.model = j.at("vlm_http").at("model").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("config snapshot: ") + e.what());
    }
    return c;
}

RunConfig read_config_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open '" + path.string() + "'");
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("config snapshot '" + path.string() + "': " + e.what());
    }
    return config_from_json(j);
}

RunWriter::RunWriter(const std::filesystem::path& dir) : dir_(dir) {
    if (dir_.empty()) {
        return;
    }
    std::filesystem::create_directories(dir_ / "rewards");
    metrics_.open(dir_ / "metrics.csv", std::ios::trunc);
    ensure(metrics_, dir_ / "metrics.csv");
    metrics_ << csv::join(metrics_columns()) << "\n";
    events_.open(dir_ / "events.jsonl", std::ios::trunc);
    ensure(events_, dir_ / "events.jsonl");
}

void RunWriter::config(const RunConfig& c) {
    if (enabled()) {
        json("config.snapshot", config_to_json(c));
    }
}

void RunWriter::metrics(const ppo::IterationStats& stats, bool regenerated) {
    if (enabled()) {
        metrics_ << metrics_row(stats, regenerated) << "\n";
        metrics_.flush();
    }
}

void RunWriter::event(int iteration, const std::string& name, nlohmann::json extra) {
    if (!enabled()) {
        return;
    }
    nlohmann::json line = {{"seq", seq_++}, {"iteration", iteration}, {"event", name}};
    for (auto it = extra.begin(); it != extra.end(); ++it) {
        line[it.key()] = it.value();
    }
    events_ << line.dump() << "\n";
    events_.flush();
}

void RunWriter::program(int index, int iteration, const llm::GenerationResult& result) {
    if (!enabled()) {
        return;
    }
    char stem[16];
    std::snprintf(stem, sizeof(stem), "%03d", index);
    text(std::string("rewards/") + stem + ".dsl", result.source);
    nlohmann::json attempts = nlohmann::json::array();
    for (const auto& a : result.log) {
        attempts.push_back({{"response", a.response}, {"source", a.source}, {"error", a.error}});
    }
    json(std::string("rewards/") + stem + ".log.json",
         {{"index", index}, {"iteration", iteration}, {"attempts", result.attempts},
          {"degraded", result.degraded}, {"log", attempts}});
}

void RunWriter::text(const std::string& name, const std::string& content) {
    if (!enabled()) {
        return;
    }
    std::ofstream out(dir_ / name, std::ios::trunc | std::ios::binary);
    ensure(out, dir_ / name);
    out << content;
}

void RunWriter::json(const std::string& name, const nlohmann::json& value) { text(name, value.dump(2) + "\n"); }

}  // namespace grove::core
