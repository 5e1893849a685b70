#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "grove/env/environment.hpp"
#include "grove/nn/mlp.hpp"

namespace grove::eval {

/// Expert reward sampled once per training iteration.
struct ExpertCurve {
    std::vector<int> iterations;
    std::vector<double> values;
    double cap = 1.0;

    /// Throws std::invalid_argument unless iterations strictly increase,
    /// values are finite and no value exceeds cap + 1e-9.
    void check() const;
};

inline constexpr double kCapTolerance = 1e-9;

/// Area above the curve up to `cap`: sum over points of (cap - r_t), unit
/// step per iteration. Lower is better.
double reward_distance(const ExpertCurve& curve);

/// Rows are poses or runs, columns are instructions.
struct SimilarityMatrix {
    std::vector<std::string> columns;
    std::vector<std::string> rows;  // optional row labels (empty or one per row)
    nn::Matrix values;
};

/// Per column (x - min) / (max - min); a constant column becomes all zeros.
nn::Matrix normalize_columns(const nn::Matrix& m);

/// 1 - ||M - G||_F / sqrt(sum(M^2 + G^2)). Both zero counts as identical (1).
double matrix_similarity(const nn::Matrix& m, const nn::Matrix& ground_truth);

/// Joint world positions per frame; enough for smoothness.
using PositionTrack = std::vector<std::vector<Eigen::Vector3d>>;

PositionTrack positions_of(const std::vector<env::StateEmbed>& trajectory);

/// Mean over t and joints of |a_{t+1} - a_t| where
/// a_t = (x_{t+1} - 2 x_t + x_{t-1}) / dt^2. Needs at least 4 frames.
double smoothness(const PositionTrack& track, double dt);
double smoothness(const std::vector<env::StateEmbed>& trajectory, double dt);

using PoseEmbedding = std::function<Eigen::VectorXd(const env::PoseVector&)>;

/// 100 * mean over poses of cosine(text_embedding, embed(pose)).
double semantic_score(const std::vector<env::PoseVector>& poses, const Eigen::VectorXd& text_embedding,
                      const PoseEmbedding& embed);

/// Similarity matrix CSV: header row of column labels. When the first
/// header cell is empty or "label", the first column holds row labels.
SimilarityMatrix read_matrix_csv(const std::filesystem::path& path);
SimilarityMatrix parse_matrix_csv(const std::string& text);
std::string format_matrix_csv(const SimilarityMatrix& matrix);

/// Trajectory CSV: "step" then "<joint>.x,<joint>.y,<joint>.z" per joint.
std::string format_trajectory_csv(const env::EnvSpec& spec, const std::vector<env::StateEmbed>& trajectory);
PositionTrack parse_trajectory_csv(const std::string& text);
PositionTrack read_trajectory_csv(const std::filesystem::path& path);

/// Reads (update_index, expert_reward_mean) from a run's metrics CSV,
/// skipping rows whose expert value is empty or NaN.
ExpertCurve read_expert_curve(const std::filesystem::path& metrics_csv, double cap);

}  // namespace grove::eval
