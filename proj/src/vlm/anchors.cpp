#include "grove/vlm/vlm.hpp"

#include <random>

namespace grove::vlm {

namespace {

env::PoseVector humanoid_pose(std::initializer_list<std::pair<int, Eigen::RowVector3d>> rows) {
    env::PoseVector p = env::PoseVector::Zero(15, 3);
    for (const auto& [joint, angles] : rows) {
        p.row(joint) = angles;
    }
    return p;
}

}  // namespace

const std::vector<AnchorTask>& anchor_tasks() {
    // Stick-humanoid joints: 3/4 right upper/lower arm, 6/7 left upper/lower arm.
    static const std::vector<AnchorTask> tasks = {
        // Full-body posture: folded arms with a turned, leaning trunk and a bent
        // stance, so the target differs from rest in nearly every angle.
        {"arms folded over chest", "stick_humanoid",
         humanoid_pose({{0, {0.9, 0.0, 1.2}},
                        {1, {1.1, -0.9, 0.6}},
                        {2, {-1.2, 0.9, -1.0}},
                        {3, {-1.33, -0.95, -1.45}},
                        {4, {0.0, 1.45, -1.45}},
                        {5, {1.0, -1.1, 0.9}},
                        {6, {1.45, 1.02, 1.45}},
                        {7, {0.0, 1.43, 1.45}},
                        {8, {-1.0, 1.1, -0.9}},
                        {9, {-1.3, 0.6, 0.9}},
                        {10, {1.4, -0.7, -0.8}},
                        {11, {-0.9, 1.0, 1.1}},
                        {12, {-1.3, -0.6, -0.9}},
                        {13, {1.4, 0.7, 0.8}},
                        {14, {-0.9, -1.0, -1.1}}})},
        {"boxing with two arms", "stick_humanoid",
         humanoid_pose({{3, {-0.28, -0.37, -1.45}},
                        {4, {0.0, 1.45, -1.45}},
                        {6, {-0.28, 0.37, 1.45}},
                        {7, {0.0, -1.45, 1.45}}})},
        {"keep the pole upright", "cartpole", env::PoseVector::Zero(2, 3)},
    };
    return tasks;
}

std::optional<AnchorTask> find_anchor(const std::string& instruction, const std::string& env_name) {
    for (const auto& t : anchor_tasks()) {
        if (t.instruction == instruction && t.env == env_name) {
            return t;
        }
    }
    return std::nullopt;
}

}  // namespace grove::vlm

namespace grove::vlm {

env::PoseVector least_similar_pose(const PoseEmbedFn& embed, int joints, const Eigen::VectorXd& target, double limit,
                                   std::uint64_t seed, int restarts) {
    if (!(limit > 0.0) || restarts < 1) {
        throw std::invalid_argument("least_similar_pose: limit and restarts must be positive");
    }
    constexpr int kGrid = 13;
    constexpr int kSweeps = 6;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-limit, limit);
    env::PoseVector best;
    double best_score = 2.0;
    for (int r = 0; r < restarts; ++r) {
        env::PoseVector pose(joints, 3);
        for (Eigen::Index i = 0; i < pose.size(); ++i) {
            pose.data()[i] = u(rng);
        }
        double score = cosine(target, embed(pose));
        for (int sweep = 0; sweep < kSweeps; ++sweep) {
            bool moved = false;
            for (Eigen::Index i = 0; i < pose.size(); ++i) {
                const double keep = pose.data()[i];
                double arg = keep;
                for (int g = 0; g < kGrid; ++g) {
                    pose.data()[i] = -limit + 2.0 * limit * g / (kGrid - 1);
                    const double s = cosine(target, embed(pose));
                    if (s < score - 1e-12) {
                        score = s;
                        arg = pose.data()[i];
                    }
                }
                pose.data()[i] = arg;
                moved = moved || arg != keep;
            }
            if (!moved) {
                break;
            }
        }
        if (score < best_score) {
            best_score = score;
            best = pose;
        }
    }
    return best;
}

}  // namespace grove::vlm
