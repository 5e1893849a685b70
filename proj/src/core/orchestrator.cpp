#include "grove/core/orchestrator.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

#include "grove/core/run_artifacts.hpp"
#include "grove/dsl/dsl.hpp"
#include "grove/embedding/checkpoint.hpp"
#include "grove/eval/metrics.hpp"
#include "grove/llm/generate.hpp"
#include "grove/ppo/checkpoint.hpp"

namespace grove::core {

void RewardWeights::check() const {
    if (!std::isfinite(v) || !std::isfinite(l) || v < 0.0 || l < 0.0) {
        throw std::invalid_argument("reward weights must be finite and non-negative");
    }
    if (!(v + l > 0.0)) {
        throw std::invalid_argument("reward weights must not both be zero");
    }
}

double combine(double r_v, double r_l, const RewardWeights& weights) { return weights.v * r_v + weights.l * r_l; }

bool should_regenerate(std::span<const double> trace, int window, double threshold) {
    if (window < 1) {
        throw std::invalid_argument("should_regenerate: window must be >= 1");
    }
    const auto w = static_cast<std::size_t>(window);
    if (trace.size() < w + 1) {
        return false;
    }
    for (std::size_t k = trace.size() - w; k < trace.size(); ++k) {
        if (!(trace[k] - trace[k - 1] < 0.0)) {
            return false;
        }
    }
    return trace.back() < threshold;
}

void FitnessTrace::append(double value) {
    if (!std::isfinite(value)) {
        throw std::invalid_argument("fitness trace: non-finite value at entry " + std::to_string(values_.size()));
    }
    values_.push_back(value);
}

void FitnessTrace::mark_regeneration() { start_ = values_.size(); }

std::span<const double> FitnessTrace::current() const {
    return std::span<const double>(values_).subspan(start_);
}

void RunConfig::check() const {
    auto fail = [](const std::string& what) { throw std::invalid_argument("run config: " + what); };
    if (instruction.empty()) fail("instruction is empty");
    weights.check();
    if (trigger_window < 1) fail("trigger window must be >= 1");
    if (!std::isfinite(trigger_threshold)) fail("trigger threshold must be finite");
    if (max_regens < 0) fail("max regenerations must be >= 0");
    if (updates < 0) fail("updates must be >= 0");
    if (llm != "mock" && llm != "http" && llm != "adversarial" && llm != "none") {
        fail("llm must be mock, http, adversarial or none (got '" + llm + "')");
    }
    if (vlm != "mock" && vlm != "http") fail("vlm must be mock or http (got '" + vlm + "')");
    if (n_envs < 0 || horizon < 0) fail("n_envs and horizon must be >= 0");
    if (max_retries < 1) fail("max retries must be >= 1");
}

namespace {

// Reachable joint targets are |a| * pi/2 with |a| <= 1; stay a little inside.
constexpr double kAdversaryLimit = 1.4;

}  // namespace

RunServices make_services(const RunConfig& config, const env::Environment& environment) {
    const env::EnvSpec& spec = environment.spec();
    RunServices s;
    if (!config.mapper.empty()) {
        s.mapper = embedding::load_mapper(config.mapper);
        if (s.mapper->joints() != spec.num_joints()) {
            throw std::invalid_argument("mapper '" + config.mapper.string() + "' is for " +
                                        std::to_string(s.mapper->joints()) + " joints; env '" + spec.name +
                                        "' has " + std::to_string(spec.num_joints()));
        }
        std::unique_ptr<vlm::TextEmbedder> inner;
        if (config.vlm == "http") {
            inner = std::make_unique<vlm::HttpTextEmbedder>(config.vlm_http);
        } else {
            inner = std::make_unique<vlm::MockTextEmbedder>(spec.name, spec.num_joints(), s.mapper->dim(),
                                                            s.mapper->oracle_seed);
        }
        s.embedder = std::make_unique<vlm::CachedTextEmbedder>(std::move(inner));
    } else if (spec.name == "stick_humanoid") {
        throw std::invalid_argument("stick_humanoid runs need a mapper checkpoint (--mapper)");
    }

    if (config.llm == "mock") {
        s.chat = std::make_unique<llm::MockChatClient>();
    } else if (config.llm == "http") {
        s.chat = std::make_unique<llm::HttpChatClient>(config.llm_http);
    } else if (config.llm == "adversarial") {
        if (spec.name != "stick_humanoid") {
            throw std::invalid_argument("the adversarial client only targets stick_humanoid");
        }
        const embedding::MapperModel& mapper = *s.mapper;
        const Eigen::VectorXd text = s.embedder->embed(config.instruction);
        const env::PoseVector target = vlm::least_similar_pose(
            [&](const env::PoseVector& p) { return Eigen::VectorXd(mapper.forward(p)); }, spec.num_joints(), text,
            kAdversaryLimit, config.seed);
        s.chat = std::make_unique<llm::AdversarialChatClient>(target);
    }
    return s;
}

ExpertFn make_expert(const env::EnvSpec& spec, const std::string& instruction,
                     const std::optional<embedding::MapperModel>& mapper) {
    const std::string task = env::default_expert_task(spec);
    if (!task.empty()) {
        return [spec, task](const env::EnvState& s) { return env::expert_reward(spec, s, task); };
    }
    const auto anchor = vlm::find_anchor(instruction, spec.name);
    if (anchor && mapper) {
        const embedding::Oracle oracle(spec.num_joints(), mapper->dim(), mapper->oracle_seed);
        const Eigen::VectorXd target = oracle.embed(anchor->anchor);
        return [spec, oracle, target](const env::EnvState& s) {
            return vlm::cosine(target, oracle.embed(env::pose_of(spec, s)));
        };
    }
    return {};
}

namespace {

ppo::PpoConfig ppo_config_for(const RunConfig& config, const env::EnvSpec& spec) {
    ppo::PpoConfig c = ppo::PpoConfig::for_env(spec);
    c.seed = config.seed;
    if (config.n_envs > 0) c.n_envs = config.n_envs;
    if (config.horizon > 0) c.horizon = config.horizon;
    return c;
}

/// One greedy episode (mean actions) from a fixed reset; the initial state included.
std::vector<env::EnvState> greedy_episode(const env::Environment& environment, const ppo::Policy& policy,
                                          std::uint64_t seed) {
    const env::EnvSpec& spec = environment.spec();
    std::vector<env::EnvState> states{environment.reset(seed)};
    nn::Matrix obs(1, ppo::observation_dim(spec));
    for (int t = 0; t < spec.episode_length; ++t) {
        ppo::observe(states.back().embed, obs.row(0));
        const nn::Matrix a = policy.mean(obs);
        env::StepResult r =
            environment.step(states.back(), std::span<const double>(a.data(), static_cast<std::size_t>(a.cols())));
        states.push_back(std::move(r.state));
        if (r.done) {
            break;
        }
    }
    return states;
}

}  // namespace

RunSummary run_training(const RunConfig& config) {
    config.check();
    const auto environment = env::make_environment(config.env);
    RunServices services = make_services(config, *environment);
    return run_training(config, services);
}

RunSummary run_training(const RunConfig& config, RunServices& services) {
    config.check();
    const auto environment = env::make_environment(config.env);
    const env::EnvSpec& spec = environment->spec();
    RunWriter writer(config.out_dir);
    writer.config(config);
    RunSummary summary;

    std::optional<vlm::VlmReward> vlm_reward;
    Eigen::VectorXd text;
    if (services.mapper && services.embedder) {
        // The embedding is a hard dependency: transport errors propagate and end the run.
        text = services.embedder->embed(config.instruction);
        vlm_reward.emplace(spec, *services.mapper, text);
    } else {
        std::cerr << "warning: no mapper configured; R_V is 0 and regeneration cannot trigger\n";
        writer.event(0, "warning", {{"message", "no mapper configured; R_V disabled"}});
    }
    const ExpertFn expert = make_expert(spec, config.instruction, services.mapper);

    const llm::AgentDescription agent = llm::AgentDescription::from_spec(spec);
    std::optional<dsl::CompiledProgram> program;
    auto generate = [&](int iteration) {
        const llm::GenerationResult g =
            llm::generate_reward(config.instruction, spec, agent, *services.chat, config.max_retries);
        writer.program(summary.programs, iteration, g);
        writer.event(iteration, "program", {{"index", summary.programs}, {"attempts", g.attempts},
                                            {"degraded", g.degraded}});
        ++summary.programs;
        if (g.degraded) {
            summary.degraded = true;
            std::cerr << "warning: reward generation failed; continuing with R_L = 0 (VLM only)\n";
        }
        program.emplace(g.program, spec);
    };
    if (services.chat) {
        generate(0);
    }

    ppo::PpoTrainer trainer(*environment, ppo_config_for(config, spec), ppo::PolicyConfig::for_env(spec));
    std::size_t eval_errors = 0;
    const ppo::RewardFn reward_fn = [&](const std::vector<env::EnvState>& next, const nn::Matrix& actions,
                                        std::vector<ppo::RewardSample>& out) {
        const std::vector<double> rv = vlm_reward ? vlm_reward->batch(next) : std::vector<double>(next.size(), 0.0);
        for (std::size_t i = 0; i < next.size(); ++i) {
            double rl = 0.0;
            if (program) {
                const auto row = static_cast<Eigen::Index>(i);
                try {
                    rl = program
                             ->evaluate(next[i].embed, std::span<const double>(actions.row(row).data(),
                                                                               static_cast<std::size_t>(actions.cols())))
                             .total;
                } catch (const dsl::EvalError&) {
                    ++eval_errors;
                }
            }
            out[i].r_v = rv[i];
            out[i].r_l = rl;
            out[i].total = combine(rv[i], rl, config.weights);
            if (expert) {
                out[i].expert = expert(next[i]);
            }
        }
    };

    FitnessTrace trace;
    for (int u = 0; u < config.updates; ++u) {
        writer.event(u, "rollout_start");
        ppo::IterationStats stats;
        const std::size_t errors_before = eval_errors;
        ppo::RolloutBuffer buffer = trainer.collect(reward_fn, stats);
        writer.event(u, "rollout_end", {{"mean_rv", stats.mean_rv}});
        if (eval_errors > errors_before) {
            writer.event(u, "warning", {{"message", "R_L evaluation errors counted as 0"},
                                        {"count", eval_errors - errors_before}});
        }

        trace.append(stats.mean_rv);
        bool regenerated = false;
        if (services.chat && static_cast<int>(summary.regenerations.size()) < config.max_regens &&
            should_regenerate(trace.current(), config.trigger_window, config.trigger_threshold)) {
            writer.event(u, "regeneration", {{"fitness", stats.mean_rv}});
            summary.regenerations.push_back({u, stats.mean_rv, summary.programs});
            generate(u);
            trace.mark_regeneration();
            regenerated = true;
        }

        trainer.update(buffer, stats);
        writer.event(u, "update_end");
        writer.metrics(stats, regenerated);
        summary.iterations.push_back(stats);
    }
    summary.fitness = trace.values();
    summary.rl_eval_errors = eval_errors;

    // Final greedy episode for trajectory-level metrics.
    const std::vector<env::EnvState> episode = greedy_episode(*environment, trainer.policy(), config.seed ^ 0x7a3cull);
    std::vector<env::StateEmbed> frames;
    std::vector<env::PoseVector> poses;
    for (const auto& s : episode) {
        frames.push_back(s.embed);
        poses.push_back(env::pose_of(spec, s));
    }
    if (vlm_reward) {
        const embedding::MapperModel& mapper = *services.mapper;
        summary.semantic_score = eval::semantic_score(
            poses, text, [&](const env::PoseVector& p) { return Eigen::VectorXd(mapper.forward(p)); });
    }
    eval::ExpertCurve curve;
    curve.cap = env::expert_reward_cap(spec);
    for (const auto& it : summary.iterations) {
        if (!std::isnan(it.expert_reward_mean)) {
            curve.iterations.push_back(it.index);
            curve.values.push_back(std::min(it.expert_reward_mean, curve.cap));
        }
    }
    if (!curve.values.empty()) {
        summary.reward_distance = eval::reward_distance(curve);
    }

    if (writer.enabled()) {
        ppo::save_policy(trainer.policy(), writer.dir() / "policy.ckpt");
        writer.text("trajectory.csv", eval::format_trajectory_csv(spec, frames));
        nlohmann::json regens = nlohmann::json::array();
        for (const auto& r : summary.regenerations) {
            regens.push_back({{"iteration", r.iteration}, {"fitness", r.fitness}, {"program_index", r.program_index}});
        }
        const double smooth = frames.size() >= 4 ? eval::smoothness(frames, spec.dt) : std::nan("");
        writer.json("summary.json",
                    {{"updates", config.updates},
                     {"programs", summary.programs},
                     {"degraded", summary.degraded},
                     {"regenerations", regens},
                     {"rl_eval_errors", summary.rl_eval_errors},
                     {"initial_mean_rv", summary.fitness.empty() ? std::nan("") : summary.fitness.front()},
                     {"final_mean_rv", summary.fitness.empty() ? std::nan("") : summary.fitness.back()},
                     {"semantic_score", summary.semantic_score},
                     {"reward_distance", summary.reward_distance},
                     {"smoothness", smooth}});
    }
    return summary;
}

}  // namespace grove::core
