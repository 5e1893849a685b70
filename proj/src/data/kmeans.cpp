#include "grove/data/kmeans.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <random>

#include "grove/common/binary_io.hpp"

namespace grove::data {

namespace {

constexpr char kMagic[] = "GROVECLU";
constexpr std::uint32_t kVersion = 1;

double squared_distance(const nn::Matrix& a, Eigen::Index i, const nn::Matrix& b, Eigen::Index j) {
    return (a.row(i) - b.row(j)).squaredNorm();
}

// Nearest centroid per point. The expanded form |x|^2 + |c|^2 - 2 x.c keeps
// this a single matrix product; ties keep the lower cluster id.
std::vector<int> assign(const nn::Matrix& points, const nn::Matrix& centroids) {
    const Eigen::VectorXd c2 = centroids.rowwise().squaredNorm();
    const nn::Matrix cross = points * centroids.transpose();
    std::vector<int> out(static_cast<std::size_t>(points.rows()));
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        Eigen::Index best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
            const double d = c2[c] - 2.0 * cross(i, c);
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        out[static_cast<std::size_t>(i)] = static_cast<int>(best);
    }
    return out;
}

double sse_of(const nn::Matrix& points, const nn::Matrix& centroids, const std::vector<int>& assignment) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        total += squared_distance(points, i, centroids, assignment[static_cast<std::size_t>(i)]);
    }
    return total;
}

// Moves the centroid of every empty cluster onto the point currently farthest
// from its own centroid, and reassigns that point.
int repair_empty(const nn::Matrix& points, nn::Matrix& centroids, std::vector<int>& assignment) {
    const int k = static_cast<int>(centroids.rows());
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (int a : assignment) {
        ++counts[static_cast<std::size_t>(a)];
    }
    int repaired = 0;
    for (int c = 0; c < k; ++c) {
        if (counts[static_cast<std::size_t>(c)] > 0) {
            continue;
        }
        Eigen::Index far = -1;
        double far_d = -1.0;
        for (Eigen::Index i = 0; i < points.rows(); ++i) {
            const int owner = assignment[static_cast<std::size_t>(i)];
            if (counts[static_cast<std::size_t>(owner)] < 2) {
                continue;  // taking it would empty another cluster
            }
            const double d = squared_distance(points, i, centroids, owner);
            if (d > far_d) {
                far_d = d;
                far = i;
            }
        }
        if (far < 0) {
            continue;
        }
        --counts[static_cast<std::size_t>(assignment[static_cast<std::size_t>(far)])];
        assignment[static_cast<std::size_t>(far)] = c;
        counts[static_cast<std::size_t>(c)] = 1;
        centroids.row(c) = points.row(far);
        ++repaired;
    }
    return repaired;
}

nn::Matrix means_of(const nn::Matrix& points, const nn::Matrix& previous, const std::vector<int>& assignment) {
    nn::Matrix sums = nn::Matrix::Zero(previous.rows(), previous.cols());
    std::vector<std::size_t> counts(static_cast<std::size_t>(previous.rows()), 0);
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        const int c = assignment[static_cast<std::size_t>(i)];
        sums.row(c) += points.row(i);
        ++counts[static_cast<std::size_t>(c)];
    }
    nn::Matrix out = previous;
    for (Eigen::Index c = 0; c < previous.rows(); ++c) {
        if (counts[static_cast<std::size_t>(c)] > 0) {
            out.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
        }
    }
    return out;
}

}  // namespace

std::vector<std::vector<std::size_t>> ClusterIndex::members() const {
    std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        out[static_cast<std::size_t>(assignment[i])].push_back(i);
    }
    return out;
}

std::vector<std::size_t> ClusterIndex::cluster_sizes() const {
    std::vector<std::size_t> out(static_cast<std::size_t>(k), 0);
    for (int a : assignment) {
        ++out[static_cast<std::size_t>(a)];
    }
    return out;
}

std::vector<double> nearest_squared_distances(const nn::Matrix& points, const nn::Matrix& centroids, int count) {
    std::vector<double> out(static_cast<std::size_t>(points.rows()), std::numeric_limits<double>::infinity());
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        for (int c = 0; c < count; ++c) {
            out[static_cast<std::size_t>(i)] =
                std::min(out[static_cast<std::size_t>(i)], squared_distance(points, i, centroids, c));
        }
    }
    return out;
}

std::vector<double> seeding_probabilities(const nn::Matrix& points, const nn::Matrix& centroids, int count) {
    std::vector<double> d2 = nearest_squared_distances(points, centroids, count);
    double total = 0.0;
    for (double d : d2) {
        total += d;
    }
    for (double& d : d2) {
        d = total > 0.0 ? d / total : 1.0 / static_cast<double>(d2.size());
    }
    return d2;
}

ClusterIndex kmeans_pp(const nn::Matrix& points, int k, std::uint64_t seed, const KMeansOptions& options,
                       KMeansReport* report) {
    const Eigen::Index n = points.rows();
    if (k < 1) {
        throw std::invalid_argument("kmeans_pp: k must be >= 1");
    }
    if (n < k) {
        throw std::invalid_argument("kmeans_pp: dataset has " + std::to_string(n) + " points, fewer than k = " +
                                    std::to_string(k));
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    nn::Matrix centroids(k, points.cols());
    std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
    centroids.row(0) = points.row(first(rng));

    std::vector<double> d2(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        d2[static_cast<std::size_t>(i)] = squared_distance(points, i, centroids, 0);
    }
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (double d : d2) {
            total += d;
        }
        Eigen::Index chosen = n - 1;
        if (total > 0.0) {
            const double target = unit(rng) * total;
            double acc = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                acc += d2[static_cast<std::size_t>(i)];
                if (target < acc) {
                    chosen = i;
                    break;
                }
            }
            while (d2[static_cast<std::size_t>(chosen)] == 0.0 && chosen > 0) {
                --chosen;  // rounding at the tail must not pick a zero-weight point
            }
        } else {
            chosen = first(rng);
        }
        centroids.row(c) = points.row(chosen);
        for (Eigen::Index i = 0; i < n; ++i) {
            d2[static_cast<std::size_t>(i)] =
                std::min(d2[static_cast<std::size_t>(i)], squared_distance(points, i, centroids, c));
        }
    }

    KMeansReport local;
    KMeansReport& rep = report != nullptr ? *report : local;
    rep = KMeansReport{};

    std::vector<int> assignment = assign(points, centroids);
    rep.repaired_clusters += repair_empty(points, centroids, assignment);
    double sse = sse_of(points, centroids, assignment);
    rep.sse_history.push_back(sse);

    for (int iter = 0; iter < options.max_iters; ++iter) {
        nn::Matrix next = means_of(points, centroids, assignment);
        const double shift = (next - centroids).rowwise().norm().maxCoeff();
        std::vector<int> next_assignment = assign(points, next);
        const int repaired = repair_empty(points, next, next_assignment);
        const double next_sse = sse_of(points, next, next_assignment);
        if (next_sse > sse) {
            // Rounding in the expanded-distance assignment can only matter at
            // convergence; keep the better solution and stop.
            break;
        }
        centroids = std::move(next);
        assignment = std::move(next_assignment);
        sse = next_sse;
        rep.repaired_clusters += repaired;
        rep.sse_history.push_back(sse);
        rep.iterations = iter + 1;
        if (shift < options.tol) {
            break;
        }
    }

    ClusterIndex out;
    out.k = k;
    out.centroids = std::move(centroids);
    out.assignment = std::move(assignment);
    return out;
}

ClusterIndex kmeans_pp(const PoseDataset& dataset, int k, std::uint64_t seed, const KMeansOptions& options,
                       KMeansReport* report) {
    return kmeans_pp(dataset.angles, k, seed, options, report);
}

double within_cluster_sse(const nn::Matrix& points, const ClusterIndex& index) {
    return sse_of(points, index.centroids, index.assignment);
}

void save_cluster_index(const ClusterIndex& index, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    io::BinaryWriter w(out);
    w.magic(kMagic);
    w.u32(kVersion);
    w.u32(static_cast<std::uint32_t>(index.k));
    w.u32(static_cast<std::uint32_t>(index.centroids.cols()));
    w.u64(index.assignment.size());
    for (Eigen::Index i = 0; i < index.centroids.size(); ++i) {
        w.f64(index.centroids.data()[i]);
    }
    for (int a : index.assignment) {
        w.u32(static_cast<std::uint32_t>(a));
    }
    if (!out) {
        throw std::runtime_error("write failed for '" + path.string() + "'");
    }
}

ClusterIndex load_cluster_index(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open '" + path.string() + "'");
    }
    io::BinaryReader r(in);
    r.expect_magic(kMagic);
    const std::uint32_t version = r.u32();
    if (version != kVersion) {
        throw io::FormatError("unsupported cluster index version " + std::to_string(version));
    }
    ClusterIndex out;
    out.k = static_cast<int>(r.u32());
    const auto dim = static_cast<Eigen::Index>(r.u32());
    const std::uint64_t n = r.u64();
    out.centroids.resize(out.k, dim);
    for (Eigen::Index i = 0; i < out.centroids.size(); ++i) {
        out.centroids.data()[i] = r.f64();
    }
    out.assignment.resize(n);
    for (auto& a : out.assignment) {
        a = static_cast<int>(r.u32());
        if (a < 0 || a >= out.k) {
            throw io::FormatError("cluster id out of range in '" + path.string() + "'");
        }
    }
    return out;
}

}  // namespace grove::data
