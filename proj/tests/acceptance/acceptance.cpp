// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstring>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dsl_reference.hpp"
#include "fd_check.hpp"
#include "grove/common/csv.hpp"
#include "grove/core/orchestrator.hpp"
#include "grove/data/dataset.hpp"
#include "grove/data/kmeans.hpp"
#include "grove/data/sampler.hpp"
#include "grove/dsl/dsl.hpp"
#include "grove/embedding/checkpoint.hpp"
#include "grove/embedding/trainer.hpp"
#include "grove/env/envs.hpp"
#include "grove/eval/metrics.hpp"
#include "grove/ppo/ppo.hpp"
#include "test_util.hpp"

using namespace grove;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* format, double a) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), format, a);
    return buf;
}

/// Shared state between criteria: the seed-1 mapper trained for criterion 4
/// is reused by the end-to-end runs.
struct Context {
    std::filesystem::path scratch;
    std::optional<std::filesystem::path> mapper_path;
    std::vector<double> kmeans_sse_violations;  // per k-means run: number of SSE increases
};

// ---------------------------------------------------------------- criterion 1

/// Independent statement of the trigger: the last 8 of the 10 deltas are all
/// strictly negative and the final value is below 0.1.
bool trigger_oracle(const std::vector<int>& signs, double final_value) {
    for (std::size_t k = signs.size() - 8; k < signs.size(); ++k) {
        if (signs[k] >= 0) return false;
    }
    return final_value < 0.1;
}

Outcome trigger_brute_force(Context&) {
    int cases = 0;
    int agree = 0;
    // Non-negative deltas are drawn as +step, and in a second pass as exact zeros.
    for (double positive_step : {0.01, 0.0}) {
        for (int mask = 0; mask < (1 << 10); ++mask) {
            for (double final_value : {0.05, 0.15}) {
                std::vector<int> signs(10);
                std::vector<double> trace(11, 0.0);
                for (int k = 0; k < 10; ++k) {
                    const bool drop = (mask >> k) & 1;
                    signs[k] = drop ? -1 : (positive_step > 0 ? 1 : 0);
                    trace[k + 1] = trace[k] + (drop ? -0.01 : positive_step);
                }
                const double shift = final_value - trace.back();
                for (double& v : trace) v += shift;
                // Re-derive the signs from the shifted values: rounding must not flip them.
                for (int k = 0; k < 10; ++k) {
                    const double d = trace[k + 1] - trace[k];
                    signs[k] = d < 0 ? -1 : (d > 0 ? 1 : 0);
                }
                ++cases;
                agree += core::should_regenerate(trace) == trigger_oracle(signs, trace.back());
            }
        }
    }
    return {agree == cases, std::to_string(agree) + "/" + std::to_string(cases) + " traces agree with the oracle"};
}

// ---------------------------------------------------------------- criterion 2

Outcome dsl_differential(Context&) {
    const auto hum = env::make_environment("stick_humanoid");
    const env::EnvSpec& spec = hum->spec();
    testing::ProgramGenerator gen(spec, 2024);
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int compared = 0;
    int errors_matched = 0;
    int mismatches = 0;
    for (int p = 0; p < 200; ++p) {
        const dsl::RewardProgram program = dsl::parse(gen.next());
        dsl::validate(program, spec);
        const dsl::CompiledProgram compiled(program, spec);
        for (int s = 0; s < 50; ++s) {
            const env::StateEmbed embed = testing::random_embed(spec, rng);
            std::vector<double> action(static_cast<std::size_t>(spec.action_dim));
            for (double& a : action) a = u(rng);
            std::string e1, e2;
            double v1 = 0.0, v2 = 0.0;
            try {
                v1 = compiled.evaluate(embed, action).total;
            } catch (const dsl::EvalError& e) {
                e1 = e.binding();
            }
            try {
                v2 = testing::reference_evaluate(program, spec, embed, action);
            } catch (const dsl::EvalError& e) {
                e2 = e.binding();
            }
            if (e1 != e2 || (e1.empty() && std::memcmp(&v1, &v2, sizeof(double)) != 0)) {
                ++mismatches;
            } else if (e1.empty()) {
                ++compared;
            } else {
                ++errors_matched;
            }
        }
    }

    env::StateEmbed s;
    s.joints.resize(static_cast<std::size_t>(spec.num_joints()));
    s.joints[static_cast<std::size_t>(spec.joint_index("left_hand"))].pos = {0.2, 0.0, 0.0};
    const std::vector<double> zeros(static_cast<std::size_t>(spec.action_dim), 0.0);
    const double exemplar = dsl::evaluate(dsl::parse("temp = 0.2\n"
                                                     "d = norm(left_hand.pos - torso.pos)\n"
                                                     "r = exp(-d / temp)\n"
                                                     "return r\n"),
                                          spec, s, zeros)
                                .total;
    const bool exemplar_ok = std::abs(exemplar - std::exp(-1.0)) <= 1e-9;
    std::ostringstream d;
    d << "10000 evaluations, " << compared << " bit-identical values, " << errors_matched
      << " identical guarded errors, " << mismatches << " mismatches; exemplar = " << fmt("%.9f", exemplar);
    return {mismatches == 0 && exemplar_ok, d.str()};
}

// ---------------------------------------------------------------- criterion 3

Outcome mapper_gradients(Context&) {
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> joints(1, 4);
    std::uniform_int_distribution<int> hidden(3, 12);
    std::uniform_int_distribution<int> dims(2, 8);
    double worst = 0.0;
    std::ostringstream shapes;
    for (int m = 0; m < 5; ++m) {
        const int j = joints(rng);
        const std::vector<int> layout{3 * j, hidden(rng), hidden(rng), dims(rng)};
        nn::Mlp net(layout, nn::Activation::Gelu);
        net.init_uniform(rng);
        const nn::Matrix x = nn::Matrix::Random(6, layout.front());
        const nn::Matrix y = nn::Matrix::Random(6, layout.back());
        worst = std::max(worst, testing::mse_gradient_error(net, x, y));
        shapes << (m ? " " : "") << "[" << layout[0] << "," << layout[1] << "," << layout[2] << "," << layout[3] << "]";
    }
    // The production architecture too, on a random parameter subset.
    embedding::MapperModel mapper(2, 4);
    mapper.init(5);
    const nn::Matrix x = nn::Matrix::Random(4, 6);
    const nn::Matrix y = nn::Matrix::Random(4, 4);
    std::vector<std::size_t> subset;
    std::uniform_int_distribution<std::size_t> pick(0, mapper.net().parameter_count() - 1);
    for (int i = 0; i < 300; ++i) subset.push_back(pick(rng));
    const double mapper_err = testing::mse_gradient_error(mapper.net(), x, y, subset);
    worst = std::max(worst, mapper_err);
    return {worst <= 1e-4, "max relative error " + fmt("%.2e", worst) + " over " + shapes.str() +
                               " and the [6,256,1024,4] mapper (tolerance 1e-4)"};
}

// ---------------------------------------------------------------- criterion 4

Outcome mapper_training(Context& ctx) {
    std::ostringstream d;
    bool pass = true;
    for (std::uint64_t seed : {1, 2, 3}) {
        const auto ds = data::synth_corpus(10000, 100, 15, seed);
        data::KMeansReport report;
        const auto clusters = data::kmeans_pp(ds, 500, seed, {}, &report);
        int increases = 0;
        for (std::size_t i = 1; i < report.sse_history.size(); ++i) increases += report.sse_history[i] > report.sse_history[i - 1];
        ctx.kmeans_sse_violations.push_back(increases);

        const embedding::Oracle oracle(15, 64, 1234 + seed);
        embedding::TrainConfig cfg;
        cfg.dim = 64;
        cfg.epochs = 50;
        cfg.seed = seed;
        const auto result = embedding::train_mapper(ds, clusters, oracle, cfg);
        const double val = result.metrics.epochs.back().validation_cosine;
        pass = pass && val >= 0.85;
        d << (seed == 1 ? "" : ", ") << "seed " << seed << " val cosine " << fmt("%.4f", val);
        if (seed == 1) {
            ctx.mapper_path = ctx.scratch / "mapper_d64_seed1.bin";
            embedding::save_mapper(result.model, *ctx.mapper_path);
        }
    }
    d << " (threshold 0.85 after 50 epochs)";
    return {pass, d.str()};
}

std::filesystem::path mapper_for_runs(Context& ctx) {
    if (!ctx.mapper_path) {
        const auto ds = data::synth_corpus(10000, 100, 15, 1);
        const auto clusters = data::kmeans_pp(ds, 500, 1);
        const embedding::Oracle oracle(15, 64, 1235);
        embedding::TrainConfig cfg;
        cfg.dim = 64;
        cfg.epochs = 50;
        cfg.seed = 1;
        ctx.mapper_path = ctx.scratch / "mapper_d64_seed1.bin";
        embedding::save_mapper(embedding::train_mapper(ds, clusters, oracle, cfg).model, *ctx.mapper_path);
    }
    return *ctx.mapper_path;
}

// ---------------------------------------------------------------- criterion 5

double brute_force_two_means(const std::vector<double>& xs) {
    double best = 1e300;
    const int n = static_cast<int>(xs.size());
    for (int mask = 1; mask < (1 << n) - 1; ++mask) {
        double sse = 0.0;
        for (int side = 0; side < 2; ++side) {
            double sum = 0.0;
            int count = 0;
            for (int i = 0; i < n; ++i)
                if (((mask >> i) & 1) == side) sum += xs[i], ++count;
            for (int i = 0; i < n; ++i)
                if (((mask >> i) & 1) == side) sse += (xs[i] - sum / count) * (xs[i] - sum / count);
        }
        best = std::min(best, sse);
    }
    return best;
}

Outcome clustering(Context& ctx) {
    int increases = 0;
    int runs = 0;
    for (double v : ctx.kmeans_sse_violations) increases += static_cast<int>(v), ++runs;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto ds = data::synth_corpus(3000, 40, 15, 100 + seed);
        data::KMeansReport report;
        data::kmeans_pp(ds, 50, seed, {}, &report);
        for (std::size_t i = 1; i < report.sse_history.size(); ++i) increases += report.sse_history[i] > report.sse_history[i - 1];
        ++runs;
    }

    nn::Matrix toy(3, 1);
    toy << 0.0, 1.0, 10.0;
    const double best = brute_force_two_means({0.0, 1.0, 10.0});
    int toy_ok = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto idx = data::kmeans_pp(toy, 2, seed);
        toy_ok += data::within_cluster_sse(toy, idx) == best && idx.assignment[0] == idx.assignment[1] &&
                  idx.assignment[0] != idx.assignment[2];
    }

    // 50 clusters of very different sizes; count the cluster of each drawn point.
    data::ClusterIndex idx;
    idx.k = 50;
    idx.centroids = nn::Matrix::Zero(50, 1);
    for (int c = 0; c < 50; ++c) idx.assignment.insert(idx.assignment.end(), 1 + 3 * c * c, c);
    const double critical = 74.919;  // chi-square, 49 dof, alpha 0.01
    auto chi2_of = [&](std::uint64_t seed) {
        data::BalancedSampler sampler(idx, seed);
        std::vector<double> counts(50, 0.0);
        for (int i = 0; i < 100000; ++i) counts[static_cast<std::size_t>(idx.assignment[sampler.draw()])] += 1.0;
        double chi2 = 0.0;
        for (double c : counts) chi2 += (c - 2000.0) * (c - 2000.0) / 2000.0;
        return chi2;
    };
    const double chi2 = chi2_of(42);
    // A single fixed stream rejects a correct sampler 1% of the time, so the
    // rejection rate over 200 further streams is reported and bounded too:
    // P(Binomial(200, 0.01) >= 8) is about 1e-3.
    int rejections = 0;
    for (std::uint64_t seed = 1000; seed < 1200; ++seed) rejections += chi2_of(seed) >= critical;

    std::ostringstream d;
    d << runs << " k-means runs with " << increases << " SSE increases; {0,1,10} brute-force SSE " << best
      << " matched by " << toy_ok << "/20 seeds; sampler chi2 " << fmt("%.2f", chi2) << " (critical " << critical
      << "), " << rejections << "/200 extra streams rejected (limit 7)";
    return {increases == 0 && toy_ok == 20 && best == 0.5 && chi2 < critical && rejections <= 7, d.str()};
}

// ---------------------------------------------------------------- criterion 6

std::vector<double> gae_oracle(const std::vector<double>& r, const std::vector<double>& v, const std::vector<char>& d,
                               double boot, double gamma, double lambda) {
    const std::size_t n = r.size();
    std::vector<double> a(n, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        double weight = 1.0;
        for (std::size_t k = t; k < n; ++k) {
            const double next = k + 1 < n ? v[k + 1] : boot;
            a[t] += weight * (r[k] + gamma * next * (d[k] ? 0.0 : 1.0) - v[k]);
            if (d[k]) break;
            weight *= gamma * lambda;
        }
    }
    return a;
}

Outcome ppo_sanity(Context&) {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> g(0.0, 1.0);
    std::bernoulli_distribution done(0.05);
    double gae_err = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> r(50), v(50);
        std::vector<char> dn(50);
        for (int t = 0; t < 50; ++t) r[t] = g(rng), v[t] = g(rng), dn[t] = done(rng);
        const double boot = g(rng);
        const auto got = ppo::gae(r, v, dn, boot, 0.99, 0.95).advantages;
        const auto want = gae_oracle(r, v, dn, boot, 0.99, 0.95);
        for (int t = 0; t < 50; ++t) gae_err = std::max(gae_err, std::abs(got[t] - want[t]));
    }

    const auto cart = env::make_environment("cartpole");
    const env::EnvSpec& spec = cart->spec();
    const double target = 0.9 * spec.episode_length;
    const ppo::RewardFn reward = [&](const std::vector<env::EnvState>& next, const nn::Matrix&,
                                     std::vector<ppo::RewardSample>& out) {
        for (std::size_t i = 0; i < next.size(); ++i) {
            out[i].total = env::expert_reward(spec, next[i], "balance");
            out[i].expert = out[i].total;
        }
    };
    std::ostringstream d;
    bool solved_all = true;
    for (std::uint64_t seed : {0, 1, 2}) {
        ppo::PpoConfig cfg = ppo::PpoConfig::for_env(spec);
        cfg.seed = seed;
        ppo::PpoTrainer trainer(*cart, cfg, ppo::PolicyConfig::for_env(spec));
        int solved_at = -1;
        for (int u = 0; u < 200 && solved_at < 0; ++u) {
            const auto s = trainer.iterate(reward);
            if (s.mean_episode_return >= target) solved_at = u + 1;
        }
        solved_all = solved_all && solved_at > 0;
        d << "seed " << seed << (solved_at > 0 ? " reached " + fmt("%.0f", target) + " at update " +
                                                     std::to_string(solved_at)
                                               : std::string(" not solved in 200 updates"))
          << ", ";
    }
    d << "GAE max error " << fmt("%.1e", gae_err);
    return {solved_all && gae_err <= 1e-10, d.str()};
}

// ---------------------------------------------------------------- criterion 7

core::RunConfig humanoid_run(Context& ctx, const std::string& name) {
    core::RunConfig c;
    c.instruction = "arms folded over chest";
    c.env = "stick_humanoid";
    c.mapper = mapper_for_runs(ctx);
    c.out_dir = ctx.scratch / name;
    return c;
}

std::vector<std::vector<std::string>> metrics_rows(const std::filesystem::path& path) {
    std::istringstream in(testing::slurp(path));
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) rows.push_back(csv::split_line(line));
    return rows;
}

Outcome end_to_end(Context& ctx) {
    std::ostringstream d;

    core::RunConfig anchor = humanoid_run(ctx, "anchor");
    anchor.updates = 100;
    anchor.seed = 0;
    const auto a = core::run_training(anchor);
    const double gain = a.fitness.back() - a.fitness.front();
    d << "anchor r_v " << fmt("%.3f", a.fitness.front()) << " -> " << fmt("%.3f", a.fitness.back()) << " (gain "
      << fmt("%.3f", gain) << ", need 0.3); ";

    // Pose-matching program aimed at the pose the VLM reward likes least, with
    // the VLM term switched off so R_V can fall. An instruction without an
    // anchor starts R_V near the 0.1 threshold, so the steep part of the
    // collapse happens below it.
    core::RunConfig adv = humanoid_run(ctx, "adversarial");
    adv.instruction = "crouch with arms spread wide";
    adv.llm = "adversarial";
    adv.weights = {0.0, 1.0};
    adv.horizon = 300;
    adv.updates = 60;
    adv.seed = 0;
    const auto b = core::run_training(adv);
    d << "adversarial run: " << b.regenerations.size() << " regeneration(s)";
    if (!b.regenerations.empty()) {
        d << " (first at update " << b.regenerations.front().iteration << ", r_v "
          << fmt("%.3f", b.regenerations.front().fitness) << ")";
    }

    core::RunConfig ablation = adv;
    ablation.max_regens = 0;
    ablation.out_dir = ctx.scratch / "ablation";
    const auto c = core::run_training(ablation);
    const auto with = metrics_rows(adv.out_dir / "metrics.csv");
    const auto without = metrics_rows(ablation.out_dir / "metrics.csv");
    // The adversary's prompt never changes, so regenerating yields the same
    // program; apart from regen_flag both runs must match row for row.
    bool same_path = with.size() == without.size();
    for (std::size_t r = 0; same_path && r < with.size(); ++r) {
        same_path = std::equal(with[r].begin(), with[r].end() - 1, without[r].begin(), without[r].end() - 1);
    }
    int flags = 0;
    for (std::size_t r = 1; r < without.size(); ++r) flags += without[r].back() != "0";
    d << "; max-regens 0: " << c.regenerations.size() << " regenerations, " << flags << " flagged rows, "
      << (same_path ? "same training path" : "training path differs");

    const bool pass = gain >= 0.3 && !b.regenerations.empty() && c.regenerations.empty() && c.programs == 1 &&
                      flags == 0 && same_path;
    return {pass, d.str()};
}

// ---------------------------------------------------------------- criterion 8

Outcome metric_oracles(Context&) {
    nn::Matrix eye(2, 2), swap(2, 2);
    eye << 1, 0, 0, 1;
    swap << 0, 1, 1, 0;
    const double s_same = eval::matrix_similarity(eye, eye);
    const double s_swap = eval::matrix_similarity(eye, swap);
    const double s_zero = eval::matrix_similarity(eye, nn::Matrix::Zero(2, 2));

    eval::ExpertCurve curve;
    curve.iterations = {0, 1, 2};
    curve.values = {0.0, 0.5, 1.0};
    curve.cap = 1.0;
    const double rd = eval::reward_distance(curve);

    auto track = [](const std::function<double(double)>& f) {
        eval::PositionTrack t;
        for (int i = 0; i < 8; ++i) t.push_back({Eigen::Vector3d(f(i), 0.5 * f(i), -1.0)});
        return t;
    };
    const double s_const = eval::smoothness(track([](double) { return 2.0; }), 1.0 / 30.0);
    const double s_lin = eval::smoothness(track([](double t) { return 3.0 * t - 1.0; }), 1.0);
    const double s_quad = eval::smoothness(track([](double t) { return t * t; }), 1.0);

    const bool pass = s_same == 1.0 && s_swap == 0.0 && s_zero == 0.0 && rd == 1.5 && s_const == 0.0 &&
                      s_lin == 0.0 && s_quad == 0.0;
    std::ostringstream d;
    d << "similarity " << s_same << " / " << s_swap << " / " << s_zero << ", reward distance " << rd
      << ", smoothness " << s_const << " / " << s_lin << " / " << s_quad;
    return {pass, d.str()};
}

// ---------------------------------------------------------------- criterion 9

Outcome reproducibility(Context& ctx) {
    std::vector<std::string> csvs;
    for (const char* name : {"repro_a", "repro_b"}) {
        core::RunConfig c = humanoid_run(ctx, name);
        c.llm = "mock";
        c.vlm = "mock";
        c.updates = 15;
        c.seed = 11;
        core::run_training(c);
        csvs.push_back(testing::slurp(c.out_dir / "metrics.csv"));
    }
    std::vector<std::string> cart_csvs;
    for (const char* name : {"repro_cart_a", "repro_cart_b"}) {
        core::RunConfig c;
        c.instruction = "keep the pole upright";
        c.env = "cartpole";
        c.updates = 15;
        c.seed = 11;
        c.out_dir = ctx.scratch / name;
        core::run_training(c);
        cart_csvs.push_back(testing::slurp(c.out_dir / "metrics.csv"));
    }
    const bool same = csvs[0] == csvs[1] && !csvs[0].empty();
    const bool same_cart = cart_csvs[0] == cart_csvs[1] && !cart_csvs[0].empty();
    return {same && same_cart, std::string("stick_humanoid metrics.csv ") + (same ? "identical" : "DIFFERENT") +
                                   " (" + std::to_string(csvs[0].size()) + " bytes), cartpole metrics.csv " +
                                   (same_cart ? "identical" : "DIFFERENT") + ", mock clients, no network"};
}

struct Criterion {
    int id;
    const char* name;
    double budget_seconds;  // 0 = no limit
    std::function<Outcome(Context&)> run;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GROVE acceptance checks"};
    std::vector<int> only;
    std::string report_path = "acceptance_report.txt";
    app.add_option("criteria", only, "Run only these criterion numbers (default: all)")->check(CLI::Range(1, 9));
    app.add_option("--report", report_path, "Also write the PASS/FAIL lines to this file");
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> criteria = {
        {1, "trigger oracle", 1, trigger_brute_force},
        {2, "DSL differential", 10, dsl_differential},
        {3, "mapper gradients", 30, mapper_gradients},
        {4, "mapper training", 600, mapper_training},
        {5, "k-means++ and sampler", 60, clustering},
        {6, "PPO sanity", 300, ppo_sanity},
        {7, "end-to-end (mock clients)", 900, end_to_end},
        {8, "metric oracles", 1, metric_oracles},
        {9, "offline reproducibility", 0, reproducibility},
    };

    testing::TempDir scratch("acceptance");
    Context ctx;
    ctx.scratch = scratch.path();
    std::ofstream report(report_path);
    int failed = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run(ctx);
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = c.budget_seconds <= 0 || secs < c.budget_seconds;
        const bool pass = o.pass && in_time;
        failed += !pass;
        std::ostringstream line;
        line << (pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "): " << o.detail << " ["
             << fmt("%.2f", secs) << " s";
        if (c.budget_seconds > 0) line << ", budget " << c.budget_seconds << " s" << (in_time ? "" : " EXCEEDED");
        line << "]";
        std::cout << line.str() << std::endl;
        report << line.str() << "\n";
        report.flush();
    }
    return failed == 0 ? 0 : 1;
}
