#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "grove/core/orchestrator.hpp"
#include "grove/core/run_artifacts.hpp"
#include "grove/data/dataset.hpp"
#include "grove/data/kmeans.hpp"
#include "grove/dsl/dsl.hpp"
#include "grove/embedding/checkpoint.hpp"
#include "grove/embedding/trainer.hpp"
#include "grove/env/state_json.hpp"
#include "grove/eval/metrics.hpp"

namespace {

using namespace grove;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct DataOptions {
    std::string env = "stick_humanoid";
    std::size_t n = 10000;
    std::size_t modes = 100;
    std::uint64_t seed = 0;
    std::string input;
    std::string out;
    bool strict = false;
    int subsample = 1;
    int k = 500;
};

void data_synth(const DataOptions& o) {
    const auto environment = env::make_environment(o.env);
    const auto ds = data::synth_corpus(o.n, o.modes, environment->spec().num_joints(), o.seed);
    data::export_csv(ds, environment->spec(), o.out);
    std::cout << "wrote " << ds.size() << " poses to " << o.out << "\n";
}

void data_ingest(const DataOptions& o) {
    const auto environment = env::make_environment(o.env);
    const auto result = data::ingest_csv(o.input, environment->spec(), o.strict);
    for (const auto& w : result.warnings) {
        std::cerr << "warning: line " << w.line << ": " << w.message << "\n";
    }
    const auto kept = o.subsample > 1 ? result.dataset.subsample(o.subsample) : result.dataset;
    data::export_csv(kept, environment->spec(), o.out);
    std::cout << "ingested " << kept.size() << " poses (" << result.warnings.size() << " rows skipped)\n";
}

void data_cluster(const DataOptions& o) {
    const auto environment = env::make_environment(o.env);
    const auto ds = data::ingest_csv(o.input, environment->spec(), true).dataset;
    data::KMeansReport report;
    const auto index = data::kmeans_pp(ds, o.k, o.seed, {}, &report);
    data::save_cluster_index(index, o.out);
    std::cout << "k=" << index.k << " iterations=" << report.iterations
              << " sse=" << (report.sse_history.empty() ? 0.0 : report.sse_history.back())
              << " repaired=" << report.repaired_clusters << "\n";
}

struct MapperOptions {
    std::string env = "stick_humanoid";
    std::string data;
    std::string clusters;
    std::string out;
    std::string mapper;
    std::uint64_t oracle_seed = 1;
    embedding::TrainConfig train;
};

void mapper_train(const MapperOptions& o) {
    const auto environment = env::make_environment(o.env);
    const auto ds = data::ingest_csv(o.data, environment->spec(), true).dataset;
    const auto index = data::load_cluster_index(o.clusters);
    const embedding::Oracle oracle(ds.joints, o.train.dim, o.oracle_seed);
    const auto result = embedding::train_mapper(ds, index, oracle, o.train, [](const embedding::EpochMetrics& m) {
        std::printf("epoch %d train_mse %.6g val_cosine %.4f lr %.3g\n", m.epoch + 1, m.train_mse,
                    m.validation_cosine, m.last_learning_rate);
        std::fflush(stdout);
    });
    embedding::save_mapper(result.model, o.out);
    std::cout << "saved mapper to " << o.out << "\n";
}

void mapper_eval(const MapperOptions& o) {
    const auto environment = env::make_environment(o.env);
    const auto model = embedding::load_mapper(o.mapper);
    const auto ds = o.data.empty() ? data::synth_corpus(2000, 20, model.joints(), 0x5eed)
                                   : data::ingest_csv(o.data, environment->spec(), true).dataset;
    const embedding::Oracle oracle(model.joints(), model.dim(), model.oracle_seed);
    const double c = embedding::mean_cosine(model, ds.angles, oracle.embed_batch(ds.angles));
    std::printf("poses %zu mean_cosine %.6f\n", ds.size(), c);
}

void dsl_check(const std::string& file, const std::string& env_name) {
    const auto environment = env::make_environment(env_name);
    const auto program = dsl::parse(read_file(file));
    dsl::validate(program, environment->spec());
    std::cout << "ok\n" << dsl::print(program);
}

void dsl_eval(const std::string& file, const std::string& state_file, std::string env_name) {
    const nlohmann::json j = nlohmann::json::parse(read_file(state_file));
    if (j.contains("env")) {
        env_name = j.at("env").get<std::string>();
    }
    const auto environment = env::make_environment(env_name);
    const auto in = env::state_from_json(*environment, j);
    const auto program = dsl::parse(read_file(file));
    const auto result = dsl::evaluate(program, environment->spec(), in.state.embed, in.action);
    nlohmann::json out = {{"total", result.total}, {"components", result.components}};
    std::cout << out.dump(2) << "\n";
}

void train(const core::RunConfig& config) {
    const auto summary = core::run_training(config);
    std::cout << "updates " << summary.iterations.size() << ", programs " << summary.programs << ", regenerations "
              << summary.regenerations.size() << (summary.degraded ? ", degraded" : "") << "\n";
    if (!summary.fitness.empty()) {
        std::printf("mean r_v first %.4f last %.4f\n", summary.fitness.front(), summary.fitness.back());
    }
    if (!config.out_dir.empty()) {
        std::cout << "artifacts in " << config.out_dir.string() << "\n";
    }
}

void eval_rd(const std::string& run_dir) {
    const std::filesystem::path dir(run_dir);
    const auto config = core::read_config_snapshot(dir / "config.snapshot");
    const auto environment = env::make_environment(config.env);
    const auto curve = eval::read_expert_curve(dir / "metrics.csv", env::expert_reward_cap(environment->spec()));
    if (curve.values.empty()) {
        throw std::runtime_error("run has no expert reward samples");
    }
    std::printf("reward_distance %.6f (points %zu, cap %g)\n", eval::reward_distance(curve), curve.values.size(),
                curve.cap);
}

void eval_matrix(const std::string& pred, const std::string& gt, bool raw) {
    const auto m = eval::read_matrix_csv(pred);
    const auto g = eval::read_matrix_csv(gt);
    if (m.columns != g.columns) {
        throw std::runtime_error("prediction and ground truth have different instruction columns");
    }
    const auto mn = raw ? m.values : eval::normalize_columns(m.values);
    const auto gn = raw ? g.values : eval::normalize_columns(g.values);
    std::printf("matrix_similarity %.6f\n", eval::matrix_similarity(mn, gn));
}

void eval_smooth(const std::string& traj, double dt, const std::string& env_name) {
    if (!(dt > 0.0)) {
        dt = env::make_environment(env_name)->spec().dt;
    }
    const auto track = eval::read_trajectory_csv(traj);
    std::printf("smoothness %.6f (frames %zu, dt %g)\n", eval::smoothness(track, dt), track.size(), dt);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"grove: language-guided reward generation and PPO training"};
    app.require_subcommand(1);

    auto* data_cmd = app.add_subcommand("data", "pose corpus tools");
    data_cmd->require_subcommand(1);
    DataOptions d;
    auto* synth = data_cmd->add_subcommand("synth", "write a synthetic pose corpus as CSV");
    synth->add_option("--env", d.env, "environment name")->capture_default_str();
    synth->add_option("--n", d.n, "number of poses")->capture_default_str();
    synth->add_option("--modes", d.modes, "mixture modes")->capture_default_str();
    synth->add_option("--seed", d.seed)->capture_default_str();
    synth->add_option("--out", d.out, "output CSV")->required();
    synth->callback([&] { data_synth(d); });
    auto* ingest = data_cmd->add_subcommand("ingest", "validate and normalize a pose CSV");
    ingest->add_option("input", d.input)->required()->check(CLI::ExistingFile);
    ingest->add_option("--env", d.env)->capture_default_str();
    ingest->add_flag("--strict", d.strict, "fail on the first malformed row");
    ingest->add_option("--subsample", d.subsample, "keep every n-th pose")->check(CLI::PositiveNumber);
    ingest->add_option("--out", d.out)->required();
    ingest->callback([&] { data_ingest(d); });
    auto* cluster = data_cmd->add_subcommand("cluster", "k-means++ over a pose CSV");
    cluster->add_option("--data", d.input)->required()->check(CLI::ExistingFile);
    cluster->add_option("--env", d.env)->capture_default_str();
    cluster->add_option("--k", d.k)->capture_default_str();
    cluster->add_option("--seed", d.seed)->capture_default_str();
    cluster->add_option("--out", d.out)->required();
    cluster->callback([&] { data_cluster(d); });

    auto* mapper_cmd = app.add_subcommand("mapper", "pose-to-embedding mapper");
    mapper_cmd->require_subcommand(1);
    MapperOptions m;
    auto* mtrain = mapper_cmd->add_subcommand("train", "train a mapper against the synthetic oracle");
    mtrain->add_option("--env", m.env)->capture_default_str();
    mtrain->add_option("--data", m.data)->required()->check(CLI::ExistingFile);
    mtrain->add_option("--clusters", m.clusters)->required()->check(CLI::ExistingFile);
    mtrain->add_option("--dim", m.train.dim)->capture_default_str();
    mtrain->add_option("--epochs", m.train.epochs)->capture_default_str();
    mtrain->add_option("--lr", m.train.learning_rate)->capture_default_str();
    mtrain->add_option("--batch", m.train.batch_size)->capture_default_str();
    mtrain->add_option("--seed", m.train.seed)->capture_default_str();
    mtrain->add_option("--oracle-seed", m.oracle_seed)->capture_default_str();
    mtrain->add_option("--out", m.out)->required();
    mtrain->callback([&] { mapper_train(m); });
    auto* meval = mapper_cmd->add_subcommand("eval", "mean cosine to the oracle on a pose CSV");
    meval->add_option("--ckpt,--mapper", m.mapper)->required()->check(CLI::ExistingFile);
    meval->add_option("--data", m.data, "pose CSV (default: 2000 fresh synthetic poses)")->check(CLI::ExistingFile);
    meval->add_option("--env", m.env)->capture_default_str();
    meval->callback([&] { mapper_eval(m); });

    auto* dsl_cmd = app.add_subcommand("dsl", "reward program tools");
    dsl_cmd->require_subcommand(1);
    std::string dsl_file, state_file, dsl_env = "stick_humanoid";
    auto* check = dsl_cmd->add_subcommand("check", "parse and validate a program");
    check->add_option("file", dsl_file)->required()->check(CLI::ExistingFile);
    check->add_option("--env", dsl_env)->capture_default_str();
    check->callback([&] { dsl_check(dsl_file, dsl_env); });
    auto* deval = dsl_cmd->add_subcommand("eval", "evaluate a program on a state");
    deval->add_option("file", dsl_file)->required()->check(CLI::ExistingFile);
    deval->add_option("--state", state_file)->required()->check(CLI::ExistingFile);
    deval->add_option("--env", dsl_env, "used when the state file names no env")->capture_default_str();
    deval->callback([&] { dsl_eval(dsl_file, state_file, dsl_env); });

    core::RunConfig run;
    std::string mapper_path, out_dir;
    auto* train_cmd = app.add_subcommand("train", "run the full training loop");
    train_cmd->add_option("--instruction", run.instruction)->required();
    train_cmd->add_option("--env", run.env)->capture_default_str();
    train_cmd->add_option("--mapper", mapper_path, "mapper checkpoint");
    train_cmd->add_option("--llm", run.llm)
        ->check(CLI::IsMember({"mock", "http", "adversarial", "none"}))
        ->capture_default_str();
    train_cmd->add_option("--vlm", run.vlm)->check(CLI::IsMember({"mock", "http"}))->capture_default_str();
    train_cmd->add_option("--llm-endpoint", run.llm_http.endpoint);
    train_cmd->add_option("--llm-model", run.llm_http.model)->capture_default_str();
    train_cmd->add_option("--vlm-endpoint", run.vlm_http.endpoint);
    train_cmd->add_option("--vlm-model", run.vlm_http.model)->capture_default_str();
    train_cmd->add_option("--wv", run.weights.v)->capture_default_str();
    train_cmd->add_option("--wl", run.weights.l)->capture_default_str();
    train_cmd->add_option("--updates", run.updates)->capture_default_str();
    train_cmd->add_option("--max-regens", run.max_regens)->capture_default_str();
    train_cmd->add_option("--envs", run.n_envs, "parallel environments (0: default)")->capture_default_str();
    train_cmd->add_option("--horizon", run.horizon, "steps per env per update (0: default)")->capture_default_str();
    train_cmd->add_option("--seed", run.seed)->capture_default_str();
    train_cmd->add_option("--out", out_dir, "run directory");
    train_cmd->callback([&] {
        run.mapper = mapper_path;
        run.out_dir = out_dir;
        train(run);
    });

    auto* eval_cmd = app.add_subcommand("eval", "metrics");
    eval_cmd->require_subcommand(1);
    std::string run_dir, pred, gt, traj, smooth_env = "stick_humanoid";
    bool raw = false;
    double dt = 0.0;
    auto* rd = eval_cmd->add_subcommand("rd", "reward distance of a run");
    rd->add_option("--run", run_dir)->required()->check(CLI::ExistingDirectory);
    rd->callback([&] { eval_rd(run_dir); });
    auto* matrix = eval_cmd->add_subcommand("matrix", "matrix similarity between two CSV matrices");
    matrix->add_option("--pred", pred)->required()->check(CLI::ExistingFile);
    matrix->add_option("--gt", gt)->required()->check(CLI::ExistingFile);
    matrix->add_flag("--raw", raw, "skip per-column min-max normalization");
    matrix->callback([&] { eval_matrix(pred, gt, raw); });
    auto* smooth = eval_cmd->add_subcommand("smooth", "smoothness of a trajectory CSV");
    smooth->add_option("--traj", traj)->required()->check(CLI::ExistingFile);
    smooth->add_option("--dt", dt, "frame interval (default: the env's dt)");
    smooth->add_option("--env", smooth_env)->capture_default_str();
    smooth->callback([&] { eval_smooth(traj, dt, smooth_env); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
