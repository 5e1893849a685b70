#include <doctest.h>

#include <cmath>
#include <random>
#include <thread>

#include "grove/data/kmeans.hpp"
#include "grove/embedding/trainer.hpp"
#include "grove/env/envs.hpp"
#include "grove/vlm/vlm.hpp"

#include <httplib.h>

using namespace grove;

namespace {

constexpr std::uint64_t kOracleSeed = 7;
constexpr int kDim = 64;
const char* const kFolded = "arms folded over chest";

env::PoseVector random_pose(std::mt19937_64& rng, double limit) {
    std::uniform_real_distribution<double> u(-limit, limit);
    env::PoseVector p(15, 3);
    for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = u(rng);
    return p;
}

}  // namespace

TEST_CASE("cosine examples") {
    Eigen::VectorXd v(3);
    v << 0.3, -1.2, 2.0;
    CHECK(vlm::cosine(v, v) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(vlm::cosine(Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)) == 0.0);
    CHECK(vlm::cosine(Eigen::Vector2d(1, 0), Eigen::Vector2d(1, 1)) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(vlm::cosine(v, -v) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(vlm::cosine(Eigen::Vector2d::Zero(), Eigen::Vector2d(1, 0)), std::invalid_argument);
    CHECK_THROWS_AS(vlm::cosine(Eigen::Vector2d(1, 0), Eigen::Vector3d(1, 0, 0)), std::invalid_argument);
}

TEST_CASE("cosine is scale invariant") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n(0, 1);
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::VectorXd a(kDim), b(kDim);
        for (int i = 0; i < kDim; ++i) {
            a[i] = n(rng);
            b[i] = n(rng);
        }
        const double base = vlm::cosine(a, b);
        for (double s : {1e-3, 0.5, 7.0, 1e4}) {
            CHECK(std::abs(vlm::cosine(s * a, b) - base) < 1e-12);
            CHECK(std::abs(vlm::cosine(a, s * b) - base) < 1e-12);
        }
    }
}

TEST_CASE("anchors are registered and valid") {
    REQUIRE(vlm::find_anchor(kFolded, "stick_humanoid").has_value());
    CHECK_FALSE(vlm::find_anchor(kFolded, "cartpole").has_value());
    CHECK_FALSE(vlm::find_anchor("dance", "stick_humanoid").has_value());
    for (const auto& t : vlm::anchor_tasks()) {
        auto e = env::make_environment(t.env);
        CHECK(t.anchor.rows() == e->spec().num_joints());
        CHECK(t.anchor.cwiseAbs().maxCoeff() <= M_PI);
    }
}

TEST_CASE("mock embeds an anchored instruction as its anchor pose") {
    vlm::MockTextEmbedder mock("stick_humanoid", 15, kDim, kOracleSeed);
    const auto anchor = vlm::find_anchor(kFolded, "stick_humanoid")->anchor;
    const Eigen::VectorXd e = mock.embed(kFolded);
    const Eigen::VectorXd expected = embedding::oracle_embed(anchor, kOracleSeed, kDim);
    CHECK(e == expected);
    CHECK(e.norm() == doctest::Approx(1.0));
    CHECK_THROWS_AS(mock.embed(""), std::invalid_argument);
}

TEST_CASE("unknown instructions embed as distinct unit vectors") {
    int close = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        vlm::MockTextEmbedder mock("stick_humanoid", 15, kDim, seed);
        const Eigen::VectorXd a = mock.embed("juggle three balls");
        const Eigen::VectorXd b = mock.embed("sit cross legged");
        CHECK(a.norm() == doctest::Approx(1.0));
        CHECK(mock.embed("juggle three balls") == a);
        if (vlm::cosine(a, b) >= 0.5) ++close;
    }
    CHECK(close == 0);
}

TEST_CASE("cache computes each embedding once") {
    vlm::CachedTextEmbedder cached(std::make_unique<vlm::MockTextEmbedder>("stick_humanoid", 15, kDim, kOracleSeed));
    const Eigen::VectorXd a = cached.embed(kFolded);
    const Eigen::VectorXd b = cached.embed(kFolded);
    CHECK(a == b);
    CHECK(cached.misses() == 1);
    cached.embed("wave");
    CHECK(cached.misses() == 2);
}

TEST_CASE("oracle reward peaks at the anchor") {
    env::StickHumanoid hum;
    const auto anchor = vlm::find_anchor(kFolded, "stick_humanoid")->anchor;
    vlm::MockTextEmbedder mock("stick_humanoid", 15, kDim, kOracleSeed);
    const Eigen::VectorXd text = mock.embed(kFolded);
    embedding::Oracle oracle(15, kDim, kOracleSeed);
    auto r_oracle = [&](const env::PoseVector& p) {
        return vlm::cosine(text, oracle.embed(env::pose_of(hum.spec(), hum.state_from_pose(p))));
    };
    const double at_anchor = r_oracle(anchor);
    CHECK(std::abs(at_anchor - 1.0) <= 1e-6);

    std::mt19937_64 rng(2);
    double best = -1.0;
    int far_violations = 0;
    for (int i = 0; i < 10000; ++i) {
        const double r = r_oracle(random_pose(rng, M_PI / 2));
        best = std::max(best, r);
        if (r >= 0.9) ++far_violations;
    }
    CHECK(best <= at_anchor - 1e-3);
    CHECK(far_violations == 0);
}

TEST_CASE("least similar pose lowers the cosine") {
    embedding::Oracle oracle(15, kDim, kOracleSeed);
    const auto anchor = vlm::find_anchor(kFolded, "stick_humanoid")->anchor;
    const Eigen::VectorXd target = oracle.embed(anchor);
    auto embed = [&](const env::PoseVector& p) { return oracle.embed(p); };
    const auto worst = vlm::least_similar_pose(embed, 15, target, M_PI / 2, 3, 1);
    CHECK(worst.cwiseAbs().maxCoeff() <= M_PI / 2);
    std::mt19937_64 rng(4);
    double typical = 0.0;
    for (int i = 0; i < 50; ++i) typical += vlm::cosine(target, oracle.embed(random_pose(rng, M_PI / 2))) / 50;
    CHECK(vlm::cosine(target, oracle.embed(worst)) < typical);
    CHECK_THROWS_AS(vlm::least_similar_pose(embed, 15, target, 0.0, 3), std::invalid_argument);
}

TEST_CASE("mapper reward obeys the spherical bound") {
    env::StickHumanoid hum;
    const auto anchor = vlm::find_anchor(kFolded, "stick_humanoid")->anchor;
    // Poses near the anchor, memorized by a small mapper.
    data::PoseDataset ds;
    ds.joints = 15;
    std::mt19937_64 rng(5);
    std::normal_distribution<double> jitter(0.0, 0.05);
    ds.append(anchor, "anchor");
    for (int i = 0; i < 9; ++i) {
        env::PoseVector p = anchor;
        for (Eigen::Index k = 0; k < p.size(); ++k) p.data()[k] += jitter(rng);
        ds.append(p, "near");
    }
    const auto idx = data::kmeans_pp(ds, 10, 1);
    embedding::Oracle oracle(15, 16, kOracleSeed);
    embedding::TrainConfig c;
    c.dim = 16;
    c.epochs = 150;
    c.batch_size = 10;
    c.learning_rate = 1e-3;
    c.validation_fraction = 0.0;
    c.seed = 1;
    const auto trained = embedding::train_mapper(ds, idx, oracle, c);

    vlm::MockTextEmbedder mock("stick_humanoid", 15, 16, kOracleSeed);
    const vlm::VlmReward reward(hum.spec(), trained.model, mock.embed(kFolded));
    std::vector<env::EnvState> states;
    for (std::size_t i = 0; i < ds.size(); ++i) states.push_back(hum.state_from_pose(ds.pose(i)));
    const auto batch = reward.batch(states);
    const Eigen::VectorXd text = reward.text_embedding();
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const Eigen::VectorXd truth = oracle.embed(ds.pose(i));
        const double c_map = vlm::cosine(trained.model.forward(ds.pose(i)), truth);
        const double c_pose = vlm::cosine(truth, text);
        const double cmin = std::min(c_map, c_pose);
        CHECK(cmin > 0.9);
        const double r = reward(states[i]);
        CHECK(r >= 2 * cmin * cmin - 1 - 1e-12);
        CHECK(r <= 1.0);
        CHECK(std::abs(batch[i] - r) < 1e-12);
    }
    CHECK(reward(states[0]) > 0.99);

    env::Cartpole cart;
    CHECK_THROWS_AS(vlm::VlmReward(cart.spec(), trained.model, text), std::invalid_argument);
    CHECK_THROWS_AS(vlm::VlmReward(hum.spec(), trained.model, Eigen::VectorXd::Ones(3)), std::invalid_argument);
}

TEST_CASE("http embedder speaks the embedding protocol") {
    httplib::Server server;
    nlohmann::json seen;
    server.Post("/v1/embeddings", [&](const httplib::Request& req, httplib::Response& res) {
        seen = nlohmann::json::parse(req.body);
        nlohmann::json reply;
        reply["data"] = {{{"embedding", {0.5, -0.5, 1.0}}}};
        res.set_content(reply.dump(), "application/json");
    });
    server.Post("/empty", [&](const httplib::Request&, httplib::Response& res) {
        res.set_content("{\"data\": []}", "application/json");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread t([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    vlm::HttpEmbedConfig cfg;
    cfg.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1/embeddings";
    cfg.api_key = "k";
    cfg.request.retry.initial_backoff = std::chrono::milliseconds(1);
    vlm::HttpTextEmbedder embedder(cfg);
    const Eigen::VectorXd e = embedder.embed("wave");
    CHECK(e == Eigen::Vector3d(0.5, -0.5, 1.0));
    CHECK(seen["input"] == "wave");
    CHECK(seen["model"] == cfg.model);

    cfg.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/empty";
    vlm::HttpTextEmbedder empty(cfg);
    CHECK_THROWS_AS(empty.embed("wave"), http::TransportError);

    server.stop();
    t.join();
}
