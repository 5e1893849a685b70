#pragma once

#include <filesystem>

#include "grove/ppo/policy.hpp"

namespace grove::ppo {

/// Layout: "GROVEPOL", u32 version, then for the mean and the value network
/// u32 dim count, u32 dims..., f64 parameters; finally u32 action count and
/// f64 log-std entries. All little-endian.
void save_policy(const Policy& policy, const std::filesystem::path& path);
Policy load_policy(const std::filesystem::path& path);

}  // namespace grove::ppo
