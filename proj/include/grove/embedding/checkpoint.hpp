#pragma once

#include <filesystem>

#include "grove/embedding/mapper.hpp"

namespace grove::embedding {

/// Layout: "GROVEMAP", u32 version, u32 J, u32 D, u32 layer count + 1,
/// u32 dims..., u64 seed, u64 oracle seed, then per layer the row-major
/// weight block and the bias block as little-endian float32.
void save_mapper(const MapperModel& model, const std::filesystem::path& path);
MapperModel load_mapper(const std::filesystem::path& path);

}  // namespace grove::embedding
