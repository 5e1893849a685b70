#include "grove/env/state_json.hpp"

#include <cmath>
#include <stdexcept>

#include "grove/env/envs.hpp"

namespace grove::env {

namespace {

std::vector<double> numbers(const nlohmann::json& j, std::size_t n, const std::string& what) {
    if (!j.is_array() || j.size() != n) {
        throw std::invalid_argument(what + ": expected an array of " + std::to_string(n) + " numbers");
    }
    std::vector<double> out;
    for (const auto& v : j) {
        if (!v.is_number()) {
            throw std::invalid_argument(what + ": expected numbers");
        }
        out.push_back(v.get<double>());
        if (!std::isfinite(out.back())) {
            throw std::invalid_argument(what + ": non-finite value");
        }
    }
    return out;
}

Eigen::Vector3d vec3(const nlohmann::json& j, const std::string& what) {
    const auto v = numbers(j, 3, what);
    return {v[0], v[1], v[2]};
}

}  // namespace

StateInput state_from_json(const Environment& environment, const nlohmann::json& j) {
    const EnvSpec& spec = environment.spec();
    if (!j.is_object()) {
        throw std::invalid_argument("state json: expected an object");
    }
    const int keys = static_cast<int>(j.contains("joints")) + static_cast<int>(j.contains("pose")) +
                     static_cast<int>(j.contains("reset_seed"));
    if (keys != 1) {
        throw std::invalid_argument("state json: give exactly one of 'joints', 'pose', 'reset_seed'");
    }
    StateInput in;
    if (j.contains("reset_seed")) {
        in.state = environment.reset(j.at("reset_seed").get<std::uint64_t>());
    } else if (j.contains("pose")) {
        const auto* humanoid = dynamic_cast<const StickHumanoid*>(&environment);
        if (humanoid == nullptr) {
            throw std::invalid_argument("state json: 'pose' is only supported for stick_humanoid");
        }
        const auto& rows = j.at("pose");
        if (!rows.is_array() || static_cast<int>(rows.size()) != spec.num_joints()) {
            throw std::invalid_argument("state json: 'pose' needs " + std::to_string(spec.num_joints()) + " rows");
        }
        PoseVector pose(spec.num_joints(), 3);
        for (int r = 0; r < spec.num_joints(); ++r) {
            pose.row(r) = vec3(rows[static_cast<std::size_t>(r)], "pose row " + std::to_string(r)).transpose();
        }
        in.state = humanoid->state_from_pose(pose);
    } else {
        in.state.embed.joints.assign(static_cast<std::size_t>(spec.num_joints()), JointState{});
        const auto& joints = j.at("joints");
        if (!joints.is_object()) {
            throw std::invalid_argument("state json: 'joints' must be an object keyed by joint name");
        }
        for (auto it = joints.begin(); it != joints.end(); ++it) {
            const int idx = spec.joint_index(it.key());
            if (idx < 0) {
                throw std::invalid_argument("state json: unknown joint '" + it.key() + "' for env '" + spec.name + "'");
            }
            JointState& js = in.state.embed.joints[static_cast<std::size_t>(idx)];
            const auto& v = it.value();
            for (auto ch = v.begin(); ch != v.end(); ++ch) {
                const std::string what = it.key() + "." + ch.key();
                if (ch.key() == "pos") {
                    js.pos = vec3(ch.value(), what);
                } else if (ch.key() == "vel") {
                    js.vel = vec3(ch.value(), what);
                } else if (ch.key() == "angvel") {
                    js.ang_vel = vec3(ch.value(), what);
                } else if (ch.key() == "rot") {
                    const auto q = numbers(ch.value(), 4, what);
                    js.rot = Eigen::Quaterniond(q[3], q[0], q[1], q[2]);
                    if (js.rot.norm() == 0.0) {
                        throw std::invalid_argument(what + ": zero quaternion");
                    }
                    js.rot.normalize();
                } else {
                    throw std::invalid_argument("state json: unknown channel '" + what + "'");
                }
            }
        }
    }
    in.action.assign(static_cast<std::size_t>(spec.action_dim), 0.0);
    if (j.contains("action")) {
        in.action = numbers(j.at("action"), static_cast<std::size_t>(spec.action_dim), "action");
    }
    return in;
}

}  // namespace grove::env
