#include "grove/embedding/checkpoint.hpp"

#include <fstream>

#include "grove/common/binary_io.hpp"

namespace grove::embedding {

namespace {
constexpr char kMagic[] = "GROVEMAP";
constexpr std::uint32_t kVersion = 1;
}  // namespace

void save_mapper(const MapperModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    io::BinaryWriter w(out);
    w.magic(kMagic);
    w.u32(kVersion);
    w.u32(static_cast<std::uint32_t>(model.joints()));
    w.u32(static_cast<std::uint32_t>(model.dim()));
    const auto& dims = model.net().dims();
    w.u32(static_cast<std::uint32_t>(dims.size()));
    for (int d : dims) {
        w.u32(static_cast<std::uint32_t>(d));
    }
    w.u64(model.seed);
    w.u64(model.oracle_seed);
    // The flat parameter buffer is already per layer: weights then biases.
    for (double p : model.net().parameters()) {
        w.f32(static_cast<float>(p));
    }
    if (!out) {
        throw std::runtime_error("write failed for '" + path.string() + "'");
    }
}

MapperModel load_mapper(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open '" + path.string() + "'");
    }
    io::BinaryReader r(in);
    r.expect_magic(kMagic);
    const std::uint32_t version = r.u32();
    if (version != kVersion) {
        throw io::FormatError("unsupported mapper checkpoint version " + std::to_string(version));
    }
    const int joints = static_cast<int>(r.u32());
    const int dim = static_cast<int>(r.u32());
    const std::uint32_t n_dims = r.u32();
    std::vector<int> dims;
    for (std::uint32_t i = 0; i < n_dims; ++i) {
        dims.push_back(static_cast<int>(r.u32()));
    }
    MapperModel model(joints, dim);
    if (dims != model.net().dims()) {
        throw io::FormatError("mapper checkpoint layer dims do not match [3J, 256, 1024, D]");
    }
    model.seed = r.u64();
    model.oracle_seed = r.u64();
    for (double& p : model.net().parameters()) {
        p = r.f32();
    }
    return model;
}

}  // namespace grove::embedding
