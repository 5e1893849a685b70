#include <doctest.h>

#include <cmath>
#include <random>

#include "fd_check.hpp"
#include "grove/data/dataset.hpp"
#include "grove/data/kmeans.hpp"
#include "grove/embedding/checkpoint.hpp"
#include "grove/embedding/mapper.hpp"
#include "grove/embedding/oracle.hpp"
#include "grove/embedding/trainer.hpp"
#include "test_util.hpp"

using namespace grove;
using embedding::MapperModel;
using nn::Matrix;

namespace {

env::PoseVector random_pose(int joints, std::mt19937_64& rng, double limit = M_PI) {
    std::uniform_real_distribution<double> u(-limit, limit);
    env::PoseVector p(joints, 3);
    for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = u(rng);
    return p;
}

double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return a.dot(b) / (a.norm() * b.norm()); }

}  // namespace

TEST_CASE("oracle embeddings are deterministic unit vectors") {
    embedding::Oracle oracle(15, 64, 3);
    std::mt19937_64 rng(1);
    for (int i = 0; i < 100; ++i) {
        const auto p = random_pose(15, rng);
        const auto e = oracle.embed(p);
        REQUIRE(e.size() == 64);
        CHECK(std::abs(e.norm() - 1.0) <= 1e-9);
        CHECK(e == embedding::Oracle(15, 64, 3).embed(p));
    }
    const auto p = random_pose(15, rng);
    CHECK(embedding::oracle_embed(p, 3, 64) == oracle.embed(p));
    CHECK_FALSE(embedding::oracle_embed(p, 4, 64) == oracle.embed(p));
}

TEST_CASE("oracle batch matches single poses") {
    embedding::Oracle oracle(4, 16, 9);
    std::mt19937_64 rng(2);
    Matrix rows(5, 12);
    std::vector<env::PoseVector> poses;
    for (int i = 0; i < 5; ++i) {
        poses.push_back(random_pose(4, rng));
        rows.row(i) = embedding::flatten_pose(poses.back());
    }
    const Matrix batch = oracle.embed_batch(rows);
    for (int i = 0; i < 5; ++i) {
        CHECK((batch.row(i).transpose() - oracle.embed(poses[static_cast<std::size_t>(i)])).cwiseAbs().maxCoeff() <
              1e-14);
    }
    CHECK_THROWS_AS(oracle.embed(random_pose(5, rng)), std::invalid_argument);
}

TEST_CASE("oracle is smooth under tiny pose changes") {
    embedding::Oracle oracle(15, 512, 1);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n(0.0, 1.0);
    double worst = 1.0;
    for (int i = 0; i < 100; ++i) {
        const auto p = random_pose(15, rng);
        env::PoseVector d(15, 3);
        for (Eigen::Index k = 0; k < d.size(); ++k) d.data()[k] = n(rng);
        const env::PoseVector q = p + d * (0.999e-3 / d.norm());
        worst = std::min(worst, cosine(oracle.embed(p), oracle.embed(q)));
    }
    CHECK(worst > 0.999);
}

TEST_CASE("pose flattening") {
    env::PoseVector p(2, 3);
    p << 1, 2, 3, 4, 5, 6;
    const Eigen::RowVectorXd f = embedding::flatten_pose(p);
    CHECK(f(3) == 4.0);
    CHECK(embedding::unflatten_pose(f) == p);
    CHECK_THROWS_AS(embedding::unflatten_pose(Eigen::RowVectorXd::Zero(4)), std::invalid_argument);
}

TEST_CASE("parameter count formula") {
    CHECK(MapperModel::parameter_count(15, 512) == 799744);
    CHECK(MapperModel(15, 512).net().parameter_count() == 799744);
    CHECK(MapperModel(15, 64).net().parameter_count() == MapperModel::parameter_count(15, 64));
    CHECK(MapperModel(15, 64).net().dims() == std::vector<int>{45, 256, 1024, 64});
}

TEST_CASE("zero mapper maps to zero") {
    MapperModel m(3, 8);
    for (double& p : m.net().parameters()) p = 0.0;
    std::mt19937_64 rng(4);
    CHECK(m.forward(random_pose(3, rng)).isZero(0.0));
}

TEST_CASE("batch of one equals the single-pose path bitwise") {
    MapperModel m(15, 32);
    m.init(5);
    std::mt19937_64 rng(6);
    const auto p = random_pose(15, rng);
    const Matrix one = embedding::flatten_pose(p);
    CHECK(m.forward(one).row(0).transpose() == m.forward(p));
    CHECK_THROWS_AS(m.forward(random_pose(14, rng)), std::invalid_argument);
    const Matrix wide = Matrix::Zero(2, 44);
    CHECK_THROWS_AS(m.forward(wide), std::invalid_argument);
}

TEST_CASE("mse loss") {
    const Matrix a = Matrix::Random(4, 3);
    CHECK(embedding::mse_loss(a, a) == 0.0);
    CHECK(embedding::mse_loss(a, a.array() + 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(embedding::mse_loss(a, Matrix::Zero(4, 2)), std::invalid_argument);
}

TEST_CASE("mapper gradient on a 5-pose batch matches finite differences") {
    MapperModel m(15, 16);
    m.init(7);
    std::mt19937_64 rng(8);
    Matrix x(5, 45);
    for (int i = 0; i < 5; ++i) x.row(i) = embedding::flatten_pose(random_pose(15, rng, 1.5));
    const Matrix y = embedding::Oracle(15, 16, 1).embed_batch(x);
    std::vector<std::size_t> idx;
    std::uniform_int_distribution<std::size_t> pick(0, m.net().parameter_count() - 1);
    for (int i = 0; i < 400; ++i) idx.push_back(pick(rng));
    // Every bias and a few weights of the last layer, where gradients are largest.
    const std::size_t last = m.net().parameter_count() - 16;
    for (std::size_t i = last; i < m.net().parameter_count(); ++i) idx.push_back(i);
    CHECK(testing::mse_gradient_error(m.net(), x, y, idx) <= 1e-4);
}

TEST_CASE("learning-rate schedule endpoints") {
    embedding::TrainConfig c;
    c.learning_rate = 1e-4;
    const std::size_t total = 1000;
    CHECK(embedding::learning_rate_at(0, total, c) == 0.0);
    CHECK(embedding::learning_rate_at(50, total, c) == doctest::Approx(0.5e-4));
    CHECK(embedding::learning_rate_at(100, total, c) == doctest::Approx(1e-4).epsilon(1e-12));
    CHECK(embedding::learning_rate_at(550, total, c) == doctest::Approx(0.5e-4).epsilon(1e-12));
    CHECK(std::abs(embedding::learning_rate_at(1000, total, c)) < 1e-20);
    double prev = 1.0;
    for (std::size_t s = 100; s <= 1000; s += 10) {
        const double lr = embedding::learning_rate_at(s, total, c);
        CHECK(lr <= prev);
        prev = lr;
    }
}

TEST_CASE("train config validation") {
    embedding::TrainConfig c;
    CHECK_NOTHROW(c.check());
    c.learning_rate = 0.0;
    CHECK_THROWS_AS(c.check(), std::invalid_argument);
    c = {};
    c.warmup_fraction = 1.0;
    CHECK_THROWS_AS(c.check(), std::invalid_argument);
}

TEST_CASE("cluster-disjoint split") {
    const auto ds = data::synth_corpus(500, 20, 3, 1);
    const auto idx = data::kmeans_pp(ds, 20, 1);
    const auto split = embedding::cluster_disjoint_split(idx, 0.1, 3);
    CHECK(split.validation_clusters.size() == 2);
    CHECK(split.train.size() + split.validation.size() == ds.size());
    for (auto i : split.validation) {
        CHECK(std::count(split.validation_clusters.begin(), split.validation_clusters.end(), idx.assignment[i]) == 1);
    }
    for (auto i : split.train) {
        CHECK(std::count(split.validation_clusters.begin(), split.validation_clusters.end(), idx.assignment[i]) == 0);
    }
    CHECK(embedding::cluster_disjoint_split(idx, 0.0, 3).validation.empty());
}

TEST_CASE("memorizes ten poses") {
    const auto ds = data::synth_corpus(10, 10, 15, 11);
    const auto idx = data::kmeans_pp(ds, 10, 1);
    embedding::Oracle oracle(15, 16, 2);
    embedding::TrainConfig c;
    c.dim = 16;
    c.epochs = 200;
    c.batch_size = 10;
    c.learning_rate = 1e-3;
    c.validation_fraction = 0.0;
    c.seed = 3;
    const auto r = embedding::train_mapper(ds, idx, oracle, c);
    const double mse = embedding::mse_loss(r.model.forward(ds.angles), oracle.embed_batch(ds.angles));
    CHECK(mse < 1e-4);
    CHECK(r.metrics.epochs.size() == 200);
    CHECK(r.metrics.epochs.back().train_mse < 1e-4);
    CHECK(std::isnan(r.metrics.epochs.back().validation_cosine));
    CHECK(r.model.oracle_seed == 2);

    const auto again = embedding::train_mapper(ds, idx, oracle, c);
    const auto a = r.model.net().parameters();
    const auto b = again.model.net().parameters();
    CHECK(std::equal(a.begin(), a.end(), b.begin(), b.end()));
}

TEST_CASE("training loss trends down") {
    const auto ds = data::synth_corpus(2000, 40, 15, 5);
    const auto idx = data::kmeans_pp(ds, 40, 1);
    embedding::Oracle oracle(15, 16, 3);
    embedding::TrainConfig c;
    c.dim = 16;
    c.epochs = 40;
    c.batch_size = 256;
    c.seed = 2;
    int callbacks = 0;
    const auto r = embedding::train_mapper(ds, idx, oracle, c, [&](const embedding::EpochMetrics&) { ++callbacks; });
    CHECK(callbacks == 40);
    std::vector<double> avg;
    for (std::size_t e = 9; e < r.metrics.epochs.size(); ++e) {
        double s = 0.0;
        for (std::size_t k = e - 9; k <= e; ++k) s += r.metrics.epochs[k].train_mse;
        avg.push_back(s / 10.0);
    }
    int violations = 0;
    for (std::size_t i = 1; i < avg.size(); ++i) violations += avg[i] > avg[i - 1] ? 1 : 0;
    CHECK(violations <= 2);
    CHECK(r.metrics.epochs.back().validation_cosine > r.metrics.epochs.front().validation_cosine);
}

TEST_CASE("divergence names the step") {
    const auto ds = data::synth_corpus(20, 2, 2, 1);
    const auto idx = data::kmeans_pp(ds, 2, 1);
    Matrix targets = Matrix::Zero(20, 4);
    targets(3, 1) = std::numeric_limits<double>::infinity();
    embedding::TrainConfig c;
    c.dim = 4;
    c.epochs = 2;
    c.batch_size = 20;
    c.validation_fraction = 0.0;
    try {
        embedding::train_mapper(ds, idx, targets, c);
        FAIL("no divergence");
    } catch (const embedding::DivergenceError& e) {
        CHECK(e.step() == 0);
    }
}

TEST_CASE("checkpoint round trip") {
    MapperModel m(15, 24);
    m.init(9);
    m.oracle_seed = 77;
    testing::TempDir dir("map");
    embedding::save_mapper(m, dir / "m.bin");
    const MapperModel back = embedding::load_mapper(dir / "m.bin");
    CHECK(back.joints() == 15);
    CHECK(back.dim() == 24);
    CHECK(back.seed == 9);
    CHECK(back.oracle_seed == 77);
    const auto a = m.net().parameters();
    const auto b = back.net().parameters();
    for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE(b[i] == static_cast<double>(static_cast<float>(a[i])));
    }
    embedding::save_mapper(back, dir / "m2.bin");
    CHECK(testing::slurp(dir / "m.bin") == testing::slurp(dir / "m2.bin"));

    std::string bytes = testing::slurp(dir / "m.bin");
    bytes[0] = 'X';
    testing::spit(dir / "bad.bin", bytes);
    CHECK_THROWS(embedding::load_mapper(dir / "bad.bin"));
    testing::spit(dir / "short.bin", testing::slurp(dir / "m.bin").substr(0, 100));
    CHECK_THROWS(embedding::load_mapper(dir / "short.bin"));
}
