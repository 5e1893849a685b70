#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "grove/common/http.hpp"
#include "grove/embedding/mapper.hpp"
#include "grove/embedding/oracle.hpp"
#include "grove/env/environment.hpp"

namespace grove::vlm {

/// a.b / (|a| |b|), clamped to [-1, 1]. Throws std::invalid_argument on a
/// dimension mismatch or a zero vector.
double cosine(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b);

struct AnchorTask {
    std::string instruction;
    std::string env;
    env::PoseVector anchor;
};

const std::vector<AnchorTask>& anchor_tasks();
std::optional<AnchorTask> find_anchor(const std::string& instruction, const std::string& env_name);

using PoseEmbedFn = std::function<Eigen::VectorXd(const env::PoseVector&)>;

/// Pose with every angle in [-limit, limit] whose embedding has (locally) the
/// lowest cosine to `target`. Seeded multi-start coordinate search.
env::PoseVector least_similar_pose(const PoseEmbedFn& embed, int joints, const Eigen::VectorXd& target, double limit,
                                   std::uint64_t seed, int restarts = 4);

class TextEmbedder {
public:
    virtual ~TextEmbedder() = default;
    virtual Eigen::VectorXd embed(const std::string& text) = 0;
};

/// Offline embedder: an anchored instruction embeds as the oracle embedding
/// of its anchor pose; any other text as a unit vector drawn from a PRNG
/// seeded with hash(text) ^ oracle seed.
class MockTextEmbedder final : public TextEmbedder {
public:
    MockTextEmbedder(std::string env_name, int joints, int dim, std::uint64_t oracle_seed);
    Eigen::VectorXd embed(const std::string& text) override;

private:
    std::string env_name_;
    embedding::Oracle oracle_;
};

/// Unit vector for text not covered by an anchor.
Eigen::VectorXd hashed_unit_vector(const std::string& text, int dim, std::uint64_t seed);

struct HttpEmbedConfig {
    std::string endpoint;
    std::string api_key;  // defaults to $GROVE_VLM_KEY when empty
    std::string model = "clip-vit-b-32";
    http::RequestOptions request;
};

/// {model, input} -> data[0].embedding.
class HttpTextEmbedder final : public TextEmbedder {
public:
    explicit HttpTextEmbedder(HttpEmbedConfig config);
    Eigen::VectorXd embed(const std::string& text) override;

private:
    HttpEmbedConfig config_;
};

/// Computes each text's embedding once and serves it from memory afterwards.
class CachedTextEmbedder final : public TextEmbedder {
public:
    explicit CachedTextEmbedder(std::unique_ptr<TextEmbedder> inner);
    Eigen::VectorXd embed(const std::string& text) override;
    std::size_t misses() const { return misses_; }

private:
    std::unique_ptr<TextEmbedder> inner_;
    std::map<std::string, Eigen::VectorXd> cache_;
    std::size_t misses_ = 0;
};

/// r_v(s) = cosine(text embedding, pose embedding of pose_of(s)), with the
/// pose embedding from a frozen mapper (or any pose -> embedding function).
class VlmReward {
public:
    VlmReward(const env::EnvSpec& spec, const embedding::MapperModel& mapper, Eigen::VectorXd text_embedding);

    double operator()(const env::EnvState& state) const;
    /// One value per state, batched through the mapper.
    std::vector<double> batch(const std::vector<env::EnvState>& states) const;

    const Eigen::VectorXd& text_embedding() const { return text_; }

private:
    const env::EnvSpec& spec_;
    const embedding::MapperModel& mapper_;
    Eigen::VectorXd text_;
};

}  // namespace grove::vlm
