#pragma once

#include <vector>

#include <json.hpp>

#include "grove/env/environment.hpp"

namespace grove::env {

struct StateInput {
    EnvState state;
    std::vector<double> action;
};

/// Accepted shapes (exactly one of the state keys):
///   {"joints": {"<name>": {"pos": [3], "rot": [x, y, z, w], "vel": [3], "angvel": [3]}}}
///     unspecified joints and channels stay at zero / identity;
///   {"pose": [[x, y, z] per joint]}  (stick_humanoid only);
///   {"reset_seed": n}.
/// "action": [..] is optional and defaults to zeros. Throws
/// std::invalid_argument on unknown joints or malformed arrays.
StateInput state_from_json(const Environment& environment, const nlohmann::json& j);

}  // namespace grove::env
