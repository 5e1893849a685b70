#include "grove/ppo/checkpoint.hpp"

#include <fstream>

#include "grove/common/binary_io.hpp"

namespace grove::ppo {

namespace {

constexpr char kMagic[] = "GROVEPOL";
constexpr std::uint32_t kVersion = 1;

void write_net(io::BinaryWriter& w, const nn::Mlp& net) {
    w.u32(static_cast<std::uint32_t>(net.dims().size()));
    for (int d : net.dims()) {
        w.u32(static_cast<std::uint32_t>(d));
    }
    for (double p : net.parameters()) {
        w.f64(p);
    }
}

nn::Mlp read_net(io::BinaryReader& r) {
    const std::uint32_t count = r.u32();
    if (count < 2 || count > 64) {
        throw io::FormatError("policy checkpoint has an implausible layer count");
    }
    std::vector<int> dims;
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::uint32_t d = r.u32();
        if (d == 0 || d > (1u << 20)) {
            throw io::FormatError("policy checkpoint has an implausible layer width");
        }
        dims.push_back(static_cast<int>(d));
    }
    nn::Mlp net(dims, nn::Activation::Elu);
    for (double& p : net.parameters()) {
        p = r.f64();
    }
    return net;
}

}  // namespace

void save_policy(const Policy& policy, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    io::BinaryWriter w(out);
    w.magic(kMagic);
    w.u32(kVersion);
    write_net(w, policy.mean_net());
    write_net(w, policy.value_net());
    w.u32(static_cast<std::uint32_t>(policy.log_std().size()));
    for (double s : policy.log_std()) {
        w.f64(s);
    }
    if (!out) {
        throw std::runtime_error("write failed for '" + path.string() + "'");
    }
}

Policy load_policy(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open '" + path.string() + "'");
    }
    io::BinaryReader r(in);
    r.expect_magic(kMagic);
    const std::uint32_t version = r.u32();
    if (version != kVersion) {
        throw io::FormatError("unsupported policy checkpoint version " + std::to_string(version));
    }
    nn::Mlp mean = read_net(r);
    nn::Mlp value = read_net(r);
    const std::uint32_t act = r.u32();
    if (static_cast<int>(act) != mean.output_dim() || value.output_dim() != 1 ||
        value.input_dim() != mean.input_dim()) {
        throw io::FormatError("policy checkpoint networks disagree in shape");
    }
    PolicyConfig cfg;
    cfg.hidden.assign(mean.dims().begin() + 1, mean.dims().end() - 1);
    Policy policy(mean.input_dim(), mean.output_dim(), cfg, 0);
    policy.mean_net() = std::move(mean);
    policy.value_net() = std::move(value);
    for (double& s : policy.log_std()) {
        s = r.f64();
    }
    policy.clamp_log_std();
    return policy;
}

}  // namespace grove::ppo
