#include "grove/eval/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "grove/vlm/vlm.hpp"

namespace grove::eval {

void ExpertCurve::check() const {
    if (iterations.size() != values.size()) {
        throw std::invalid_argument("expert curve: iterations and values differ in length");
    }
    if (values.empty()) {
        throw std::invalid_argument("expert curve: needs at least one point");
    }
    if (!std::isfinite(cap)) {
        throw std::invalid_argument("expert curve: cap must be finite");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0 && iterations[i] <= iterations[i - 1]) {
            throw std::invalid_argument("expert curve: iterations must strictly increase (at index " +
                                        std::to_string(i) + ")");
        }
        if (!std::isfinite(values[i])) {
            throw std::invalid_argument("expert curve: non-finite value at iteration " +
                                        std::to_string(iterations[i]));
        }
        if (values[i] > cap + kCapTolerance) {
            throw std::invalid_argument("expert curve: value " + std::to_string(values[i]) + " at iteration " +
                                        std::to_string(iterations[i]) + " exceeds cap " + std::to_string(cap));
        }
    }
}

double reward_distance(const ExpertCurve& curve) {
    curve.check();
    double area = 0.0;
    for (double r : curve.values) {
        area += curve.cap - r;
    }
    return area;
}

nn::Matrix normalize_columns(const nn::Matrix& m) {
    if (m.size() == 0) {
        throw std::invalid_argument("normalize_columns: empty matrix");
    }
    nn::Matrix out(m.rows(), m.cols());
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        const double lo = m.col(c).minCoeff();
        const double hi = m.col(c).maxCoeff();
        if (hi > lo) {
            out.col(c) = (m.col(c).array() - lo) / (hi - lo);
        } else {
            out.col(c).setZero();
        }
    }
    return out;
}

double matrix_similarity(const nn::Matrix& m, const nn::Matrix& ground_truth) {
    if (m.rows() != ground_truth.rows() || m.cols() != ground_truth.cols()) {
        throw std::invalid_argument("matrix_similarity: shapes " + std::to_string(m.rows()) + "x" +
                                    std::to_string(m.cols()) + " and " + std::to_string(ground_truth.rows()) + "x" +
                                    std::to_string(ground_truth.cols()) + " differ");
    }
    const double denom = std::sqrt(m.squaredNorm() + ground_truth.squaredNorm());
    if (denom == 0.0) {
        return 1.0;
    }
    return 1.0 - (m - ground_truth).norm() / denom;
}

PositionTrack positions_of(const std::vector<env::StateEmbed>& trajectory) {
    PositionTrack track;
    track.reserve(trajectory.size());
    for (const auto& frame : trajectory) {
        std::vector<Eigen::Vector3d> pos;
        pos.reserve(frame.joints.size());
        for (const auto& j : frame.joints) {
            pos.push_back(j.pos);
        }
        track.push_back(std::move(pos));
    }
    return track;
}

double smoothness(const PositionTrack& track, double dt) {
    if (track.size() < 4) {
        throw std::invalid_argument("smoothness: trajectory needs at least 4 frames, got " +
                                    std::to_string(track.size()));
    }
    if (!(dt > 0.0)) {
        throw std::invalid_argument("smoothness: dt must be positive");
    }
    const std::size_t joints = track.front().size();
    for (const auto& frame : track) {
        if (frame.size() != joints) {
            throw std::invalid_argument("smoothness: frames disagree in joint count");
        }
    }
    if (joints == 0) {
        throw std::invalid_argument("smoothness: frames have no joints");
    }
    const double inv_dt2 = 1.0 / (dt * dt);
    auto accel = [&](std::size_t t, std::size_t j) {
        return ((track[t + 1][j] - 2.0 * track[t][j] + track[t - 1][j]) * inv_dt2).eval();
    };
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t t = 1; t + 2 < track.size(); ++t) {
        for (std::size_t j = 0; j < joints; ++j) {
            total += (accel(t + 1, j) - accel(t, j)).norm();
            ++count;
        }
    }
    return total / static_cast<double>(count);
}

double smoothness(const std::vector<env::StateEmbed>& trajectory, double dt) {
    return smoothness(positions_of(trajectory), dt);
}

double semantic_score(const std::vector<env::PoseVector>& poses, const Eigen::VectorXd& text_embedding,
                      const PoseEmbedding& embed) {
    if (poses.empty()) {
        throw std::invalid_argument("semantic_score: empty trajectory");
    }
    double sum = 0.0;
    for (const auto& p : poses) {
        sum += vlm::cosine(text_embedding, embed(p));
    }
    return 100.0 * sum / static_cast<double>(poses.size());
}

}  // namespace grove::eval
