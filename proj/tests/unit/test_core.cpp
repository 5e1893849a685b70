#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "grove/common/csv.hpp"
#include "grove/core/orchestrator.hpp"
#include "grove/core/run_artifacts.hpp"
#include "grove/embedding/checkpoint.hpp"
#include "grove/env/envs.hpp"
#include "grove/ppo/checkpoint.hpp"
#include "test_util.hpp"

using namespace grove;

namespace {

std::vector<nlohmann::json> read_events(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::vector<nlohmann::json> out;
    std::string line;
    while (std::getline(in, line)) out.push_back(nlohmann::json::parse(line));
    return out;
}

std::vector<std::vector<std::string>> read_rows(const std::filesystem::path& path) {
    std::istringstream in(testing::slurp(path));
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) rows.push_back(csv::split_line(line));
    return rows;
}

/// Small humanoid run: random 16-d mapper, mock text embedder.
core::RunServices humanoid_services(std::unique_ptr<llm::ChatClient> chat) {
    core::RunServices s;
    embedding::MapperModel m(15, 16);
    m.init(3);
    m.oracle_seed = 5;
    s.mapper = m;
    s.embedder = std::make_unique<vlm::CachedTextEmbedder>(
        std::make_unique<vlm::MockTextEmbedder>("stick_humanoid", 15, 16, 5));
    s.chat = std::move(chat);
    return s;
}

core::RunConfig humanoid_config() {
    core::RunConfig c;
    c.instruction = "arms folded over chest";
    c.env = "stick_humanoid";
    c.updates = 12;
    c.n_envs = 2;
    c.horizon = 8;
    c.seed = 4;
    return c;
}

}  // namespace

TEST_CASE("combine examples") {
    CHECK(core::combine(0.5, 0.2, {1.0, 1.0}) == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(core::combine(0.8, 123.0, {0.5, 0.0}) == 0.4);
    CHECK(core::combine(1.0, 1.0, {0.5, 0.5}) == 1.0);
    for (double a : {-2.0, 0.5, 3.0}) {
        const core::RewardWeights w{0.3, 0.9};
        CHECK(core::combine(a * 0.7, a * -0.1, w) == doctest::Approx(a * core::combine(0.7, -0.1, w)).epsilon(1e-14));
    }
}

TEST_CASE("weights validation") {
    const core::RewardWeights ok{0.0, 1.0};
    const core::RewardWeights zero{0.0, 0.0};
    const core::RewardWeights negative{-0.1, 1.0};
    const core::RewardWeights nan{NAN, 1.0};
    CHECK_NOTHROW(ok.check());
    CHECK_THROWS_AS(zero.check(), std::invalid_argument);
    CHECK_THROWS_AS(negative.check(), std::invalid_argument);
    CHECK_THROWS_AS(nan.check(), std::invalid_argument);
}

TEST_CASE("trigger examples") {
    std::vector<double> falling;
    for (int i = 0; i < 9; ++i) falling.push_back(0.5 - 0.05 * i);
    CHECK(falling.back() == doctest::Approx(0.1));
    falling.back() = 0.05;
    CHECK(core::should_regenerate(falling));

    std::vector<double> high = {0.6, 0.55, 0.5, 0.45, 0.4, 0.35, 0.3, 0.2, 0.15};
    CHECK_FALSE(core::should_regenerate(high));

    std::vector<double> seven = {0.4, 0.35, 0.3, 0.25, 0.2, 0.15, 0.1, 0.05};
    CHECK_FALSE(core::should_regenerate(seven));
    seven.insert(seven.begin(), 0.45);
    CHECK(core::should_regenerate(seven));

    std::vector<double> flat = {0.5, 0.4, 0.3, 0.3, 0.2, 0.15, 0.1, 0.07, 0.05};
    CHECK_FALSE(core::should_regenerate(flat));
    CHECK_FALSE(core::should_regenerate(std::vector<double>{}));
    CHECK(core::should_regenerate(std::vector<double>{0.2, 0.05}, 1, 0.1));
    CHECK_THROWS_AS(core::should_regenerate(std::vector<double>{0.2}, 0), std::invalid_argument);
}

TEST_CASE("fitness trace marks regenerations") {
    core::FitnessTrace t;
    for (double v : {0.5, 0.4, 0.3}) t.append(v);
    CHECK(t.current().size() == 3);
    t.mark_regeneration();
    CHECK(t.current().empty());
    t.append(0.2);
    CHECK(t.current().size() == 1);
    CHECK(t.current()[0] == 0.2);
    CHECK(t.values().size() == 4);
    CHECK_THROWS_AS(t.append(INFINITY), std::invalid_argument);
    CHECK(t.values().size() == 4);
}

TEST_CASE("config json round trip") {
    core::RunConfig c = humanoid_config();
    c.weights = {0.25, 0.75};
    c.trigger_window = 5;
    c.trigger_threshold = 0.2;
    c.max_regens = 2;
    c.llm = "http";
    c.mapper = "/tmp/m.bin";
    c.out_dir = "/tmp/run";
    c.llm_http.endpoint = "http://x/v1";
    c.llm_http.api_key = "hidden";
    const nlohmann::json j = core::config_to_json(c);
    CHECK(j.dump().find("hidden") == std::string::npos);
    const core::RunConfig back = core::config_from_json(j);
    CHECK(back.instruction == c.instruction);
    CHECK(back.weights.v == 0.25);
    CHECK(back.weights.l == 0.75);
    CHECK(back.trigger_window == 5);
    CHECK(back.trigger_threshold == 0.2);
    CHECK(back.max_regens == 2);
    CHECK(back.updates == c.updates);
    CHECK(back.seed == c.seed);
    CHECK(back.llm == "http");
    CHECK(back.mapper == c.mapper);
    CHECK(back.n_envs == 2);
    CHECK(back.horizon == 8);
    CHECK(back.llm_http.endpoint == "http://x/v1");
    CHECK(core::config_to_json(back) == j);
}

TEST_CASE("run config validation") {
    core::RunConfig c = humanoid_config();
    CHECK_NOTHROW(c.check());
    c.llm = "gpt";
    CHECK_THROWS_AS(c.check(), std::invalid_argument);
    c = humanoid_config();
    c.instruction.clear();
    CHECK_THROWS_AS(c.check(), std::invalid_argument);
    c = humanoid_config();
    c.trigger_window = 0;
    CHECK_THROWS_AS(c.check(), std::invalid_argument);
    c = humanoid_config();
    CHECK_THROWS_AS(core::run_training(c), std::invalid_argument);  // humanoid without a mapper
}

TEST_CASE("metrics row") {
    CHECK(core::metrics_columns() == std::vector<std::string>{"update_index", "mean_episode_return", "mean_rv",
                                                              "mean_rl", "expert_reward_mean", "kl", "clip_fraction",
                                                              "regen_flag"});
    ppo::IterationStats s;
    s.index = 3;
    s.mean_rv = 0.5;
    s.mean_rl = 0.25;
    s.update.approx_kl = 0.001;
    s.update.clip_fraction = 0.125;
    const auto cells = csv::split_line(core::metrics_row(s, true));
    REQUIRE(cells.size() == 8);
    CHECK(cells[0] == "3");
    CHECK(csv::parse_number(cells[2]) == 0.5);
    CHECK(csv::parse_number(cells[3]) == 0.25);
    CHECK(csv::parse_number(cells[6]) == 0.125);
    CHECK(cells[7] == "1");
    CHECK(csv::split_line(core::metrics_row(s, false))[7] == "0");
}

TEST_CASE("short cartpole run writes every artifact") {
    testing::TempDir dir("core_cart");
    core::RunConfig c;
    c.instruction = "keep the pole upright";
    c.env = "cartpole";
    c.updates = 3;
    c.n_envs = 2;
    c.horizon = 16;
    c.out_dir = dir.path();
    const auto summary = core::run_training(c);
    CHECK(summary.iterations.size() == 3);
    CHECK(summary.programs == 1);
    CHECK_FALSE(summary.degraded);
    CHECK(std::isfinite(summary.reward_distance));
    for (const char* name : {"config.snapshot", "metrics.csv", "events.jsonl", "policy.ckpt", "trajectory.csv",
                             "summary.json", "rewards/000.dsl", "rewards/000.log.json"}) {
        CHECK_MESSAGE(std::filesystem::exists(dir / name), name);
    }
    const auto rows = read_rows(dir / "metrics.csv");
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == core::metrics_columns());
    CHECK(rows[3][0] == "2");
    CHECK(core::read_config_snapshot(dir / "config.snapshot").instruction == c.instruction);
    CHECK(ppo::load_policy(dir / "policy.ckpt").action_dim() == 1);
    const auto summary_json = nlohmann::json::parse(testing::slurp(dir / "summary.json"));
    CHECK(summary_json["updates"] == 3);
    CHECK(testing::slurp(dir / "rewards/000.dsl").find("return") != std::string::npos);
}

TEST_CASE("regeneration happens only between rollout and update") {
    testing::TempDir dir("core_regen");
    core::RunConfig c = humanoid_config();
    // Any drop triggers: exercises the regeneration path in a few updates.
    c.trigger_window = 1;
    c.trigger_threshold = 10.0;
    c.max_regens = 3;
    c.out_dir = dir.path();
    auto services = humanoid_services(std::make_unique<llm::MockChatClient>());
    const auto summary = core::run_training(c, services);
    REQUIRE(summary.regenerations.size() >= 1);
    CHECK(summary.regenerations.size() <= 3);
    CHECK(summary.programs == 1 + static_cast<int>(summary.regenerations.size()));

    const auto events = read_events(dir / "events.jsonl");
    long last_seq = -1;
    std::string phase = "idle";
    int regen_events = 0;
    for (const auto& e : events) {
        CHECK(e["seq"].get<long>() == last_seq + 1);
        last_seq = e["seq"].get<long>();
        const std::string name = e["event"];
        if (name == "rollout_start") {
            CHECK(phase == "idle");
            phase = "rolling";
        } else if (name == "rollout_end") {
            CHECK(phase == "rolling");
            phase = "collected";
        } else if (name == "regeneration") {
            CHECK(phase == "collected");
            ++regen_events;
        } else if (name == "update_end") {
            CHECK(phase == "collected");
            phase = "idle";
        }
    }
    CHECK(regen_events == static_cast<int>(summary.regenerations.size()));

    const auto rows = read_rows(dir / "metrics.csv");
    int flagged = 0;
    for (std::size_t r = 1; r < rows.size(); ++r) flagged += rows[r][7] == "1";
    CHECK(flagged == regen_events);
    for (int k = 0; k < summary.programs; ++k) {
        char stem[32];
        std::snprintf(stem, sizeof(stem), "rewards/%03d.dsl", k);
        CHECK(std::filesystem::exists(dir / stem));
    }

    // Same trigger settings with no regeneration budget.
    core::RunConfig none = c;
    none.max_regens = 0;
    none.out_dir.clear();
    auto services2 = humanoid_services(std::make_unique<llm::MockChatClient>());
    const auto quiet = core::run_training(none, services2);
    CHECK(quiet.regenerations.empty());
    CHECK(quiet.programs == 1);
}

TEST_CASE("with zero language weight the program is inert") {
    core::RunConfig a = humanoid_config();
    a.weights = {0.5, 0.0};
    a.updates = 4;
    core::RunConfig b = a;
    b.llm = "none";
    auto sa = humanoid_services(std::make_unique<llm::MockChatClient>());
    auto sb = humanoid_services(nullptr);
    const auto ra = core::run_training(a, sa);
    const auto rb = core::run_training(b, sb);
    CHECK(ra.programs == 1);
    CHECK(rb.programs == 0);
    CHECK(ra.fitness == rb.fitness);
    REQUIRE(ra.iterations.size() == rb.iterations.size());
    for (std::size_t i = 0; i < ra.iterations.size(); ++i) {
        CHECK(ra.iterations[i].mean_reward == rb.iterations[i].mean_reward);
        CHECK(ra.iterations[i].update.approx_kl == rb.iterations[i].update.approx_kl);
    }
}

TEST_CASE("degraded generation keeps training") {
    core::RunConfig c = humanoid_config();
    c.updates = 2;
    auto s = humanoid_services(std::make_unique<llm::ScriptedChatClient>(std::vector<std::string>{"no code"}));
    const auto r = core::run_training(c, s);
    CHECK(r.degraded);
    CHECK(r.iterations.size() == 2);
    for (const auto& it : r.iterations) CHECK(it.mean_rl == 0.0);
}

TEST_CASE("services are built from the config") {
    testing::TempDir dir("core_services");
    embedding::MapperModel m(15, 16);
    m.init(1);
    m.oracle_seed = 9;
    embedding::save_mapper(m, dir / "mapper.bin");
    env::StickHumanoid hum;
    core::RunConfig c = humanoid_config();
    c.mapper = dir / "mapper.bin";
    auto s = core::make_services(c, hum);
    REQUIRE(s.mapper.has_value());
    CHECK(s.mapper->dim() == 16);
    REQUIRE(s.embedder);
    const auto anchor = vlm::find_anchor(c.instruction, "stick_humanoid")->anchor;
    CHECK(s.embedder->embed(c.instruction) == embedding::oracle_embed(anchor, 9, 16));
    CHECK(dynamic_cast<llm::MockChatClient*>(s.chat.get()) != nullptr);
    c.llm = "none";
    CHECK(core::make_services(c, hum).chat == nullptr);

    env::Cartpole cart;
    core::RunConfig cc;
    cc.instruction = "keep the pole upright";
    cc.env = "cartpole";
    cc.mapper = dir / "mapper.bin";
    CHECK_THROWS_AS(core::make_services(cc, cart), std::invalid_argument);
    cc.llm = "adversarial";
    cc.mapper.clear();
    CHECK_THROWS_AS(core::make_services(cc, cart), std::invalid_argument);
}

TEST_CASE("expert function") {
    env::Cartpole cart;
    const auto f = core::make_expert(cart.spec(), "anything", std::nullopt);
    REQUIRE(f);
    const env::EnvState s0 = cart.reset(0);
    CHECK(f(s0) == env::expert_reward(cart.spec(), s0, "balance"));
    CHECK(f(s0) > 0.99);
    env::StickHumanoid hum;
    embedding::MapperModel m(15, 8);
    m.oracle_seed = 2;
    const auto g = core::make_expert(hum.spec(), "arms folded over chest", m);
    REQUIRE(g);
    const auto anchor = vlm::find_anchor("arms folded over chest", "stick_humanoid")->anchor;
    CHECK(g(hum.state_from_pose(anchor)) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_FALSE(core::make_expert(hum.spec(), "juggle", m));
}
