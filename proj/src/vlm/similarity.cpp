#include <algorithm>

#include "grove/embedding/oracle.hpp"
#include "grove/vlm/vlm.hpp"

namespace grove::vlm {

double cosine(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("cosine: dimension mismatch (" + std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()) + ")");
    }
    const double na = a.norm();
    const double nb = b.norm();
    if (na == 0.0 || nb == 0.0) {
        throw std::invalid_argument("cosine: zero vector");
    }
    return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

VlmReward::VlmReward(const env::EnvSpec& spec, const embedding::MapperModel& mapper, Eigen::VectorXd text_embedding)
    : spec_(spec), mapper_(mapper), text_(std::move(text_embedding)) {
    if (mapper.joints() != spec.num_joints()) {
        throw std::invalid_argument("VlmReward: mapper was trained for " + std::to_string(mapper.joints()) +
                                    " joints, env '" + spec.name + "' has " + std::to_string(spec.num_joints()));
    }
    if (text_.size() != mapper.dim()) {
        throw std::invalid_argument("VlmReward: text embedding has dimension " + std::to_string(text_.size()) +
                                    ", mapper outputs " + std::to_string(mapper.dim()));
    }
}

double VlmReward::operator()(const env::EnvState& state) const {
    return cosine(text_, mapper_.forward(env::pose_of(spec_, state)));
}

std::vector<double> VlmReward::batch(const std::vector<env::EnvState>& states) const {
    nn::Matrix angles(static_cast<Eigen::Index>(states.size()), 3 * spec_.num_joints());
    for (std::size_t i = 0; i < states.size(); ++i) {
        angles.row(static_cast<Eigen::Index>(i)) = embedding::flatten_pose(env::pose_of(spec_, states[i]));
    }
    const nn::Matrix out = mapper_.forward(angles);
    std::vector<double> r(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        r[i] = cosine(text_, out.row(static_cast<Eigen::Index>(i)).transpose());
    }
    return r;
}

}  // namespace grove::vlm
