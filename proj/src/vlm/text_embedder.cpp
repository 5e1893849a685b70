#include <random>

#include "grove/vlm/vlm.hpp"

namespace grove::vlm {

namespace {

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace

Eigen::VectorXd hashed_unit_vector(const std::string& text, int dim, std::uint64_t seed) {
    std::mt19937_64 rng(fnv1a(text) ^ seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) {
        v[i] = normal(rng);
    }
    return v.normalized();
}

MockTextEmbedder::MockTextEmbedder(std::string env_name, int joints, int dim, std::uint64_t oracle_seed)
    : env_name_(std::move(env_name)), oracle_(joints, dim, oracle_seed) {}

Eigen::VectorXd MockTextEmbedder::embed(const std::string& text) {
    if (text.empty()) {
        throw std::invalid_argument("embed_text: empty instruction");
    }
    if (const auto anchor = find_anchor(text, env_name_); anchor && anchor->anchor.rows() == oracle_.joints()) {
        return oracle_.embed(anchor->anchor);
    }
    return hashed_unit_vector(text, oracle_.dim(), oracle_.seed());
}

HttpTextEmbedder::HttpTextEmbedder(HttpEmbedConfig config) : config_(std::move(config)) {
    if (config_.endpoint.empty()) {
        throw std::invalid_argument("HttpTextEmbedder: endpoint is required");
    }
    if (config_.api_key.empty()) {
        config_.api_key = http::key_from_env("GROVE_VLM_KEY");
    }
    config_.request.bearer_token = config_.api_key;
}

Eigen::VectorXd HttpTextEmbedder::embed(const std::string& text) {
    if (text.empty()) {
        throw std::invalid_argument("embed_text: empty instruction");
    }
    const nlohmann::json reply = http::post_json(config_.endpoint, {{"model", config_.model}, {"input", text}},
                                                 config_.request);
    std::vector<double> values;
    try {
        values = reply.at("data").at(0).at("embedding").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw http::TransportError(std::string("embedding response missing data[0].embedding: ") + e.what());
    }
    if (values.empty()) {
        throw http::TransportError("embedding response is empty");
    }
    return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

CachedTextEmbedder::CachedTextEmbedder(std::unique_ptr<TextEmbedder> inner) : inner_(std::move(inner)) {}

Eigen::VectorXd CachedTextEmbedder::embed(const std::string& text) {
    const auto it = cache_.find(text);
    if (it != cache_.end()) {
        return it->second;
    }
    ++misses_;
    return cache_.emplace(text, inner_->embed(text)).first->second;
}

}  // namespace grove::vlm
