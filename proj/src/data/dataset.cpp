#include "grove/data/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "grove/common/csv.hpp"

namespace grove::data {

env::PoseVector PoseDataset::pose(std::size_t i) const {
    env::PoseVector p(joints, 3);
    for (int j = 0; j < joints; ++j) {
        for (int c = 0; c < 3; ++c) {
            p(j, c) = angles(static_cast<Eigen::Index>(i), 3 * j + c);
        }
    }
    return p;
}

void PoseDataset::append(const env::PoseVector& pose, const std::string& source) {
    if (joints == 0) {
        joints = static_cast<int>(pose.rows());
    }
    if (angles.rows() == 0) {
        angles.resize(0, 3 * joints);
    }
    if (pose.rows() != joints) {
        throw std::invalid_argument("PoseDataset::append: joint count mismatch");
    }
    const Eigen::Index row = angles.rows();
    angles.conservativeResize(row + 1, Eigen::NoChange);
    for (int j = 0; j < joints; ++j) {
        for (int c = 0; c < 3; ++c) {
            angles(row, 3 * j + c) = pose(j, c);
        }
    }
    sources.push_back(source);
}

PoseDataset PoseDataset::subsample(int every) const {
    if (every < 1) {
        throw std::invalid_argument("subsample factor must be >= 1");
    }
    PoseDataset out;
    out.joints = joints;
    const Eigen::Index n = (angles.rows() + every - 1) / every;
    out.angles.resize(n, angles.cols());
    for (Eigen::Index i = 0; i < n; ++i) {
        out.angles.row(i) = angles.row(i * every);
        out.sources.push_back(sources[static_cast<std::size_t>(i * every)]);
    }
    return out;
}

PoseDataset synth_corpus(std::size_t n, std::size_t modes, int joints, std::uint64_t seed) {
    if (modes < 1 || n < modes || joints < 1) {
        throw std::invalid_argument("synth_corpus: need n >= modes >= 1 and joints >= 1");
    }
    constexpr double pi = std::numbers::pi;
    constexpr double sigma = 0.1;
    const int dim = 3 * joints;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> mean_dist(-pi / 2, pi / 2);
    std::normal_distribution<double> noise(0.0, sigma);
    std::uniform_int_distribution<std::size_t> pick(0, modes - 1);

    nn::Matrix means(static_cast<Eigen::Index>(modes), dim);
    for (Eigen::Index i = 0; i < means.size(); ++i) {
        means.data()[i] = mean_dist(rng);
    }

    PoseDataset out;
    out.joints = joints;
    out.angles.resize(static_cast<Eigen::Index>(n), dim);
    out.sources.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t m = pick(rng);
        for (int d = 0; d < dim; ++d) {
            const double v = means(static_cast<Eigen::Index>(m), d) + noise(rng);
            out.angles(static_cast<Eigen::Index>(i), d) = std::clamp(v, -pi, pi);
        }
        out.sources.push_back("synth:mode" + std::to_string(m));
    }
    return out;
}

IngestError::IngestError(int line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

namespace {

std::string format_angle(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

}  // namespace

IngestResult ingest_csv_text(const std::string& text, const env::EnvSpec& spec, bool strict,
                             const std::string& source) {
    IngestResult result;
    result.dataset.joints = spec.num_joints();
    result.dataset.angles.resize(0, 3 * spec.num_joints());

    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") != std::string::npos) {
            header = csv::split_line(line);
            break;
        }
    }
    if (header.empty()) {
        throw IngestError(line_no, "missing header row");
    }

    std::map<std::string, std::size_t> column;
    for (std::size_t i = 0; i < header.size(); ++i) {
        column[header[i]] = i;
    }
    std::vector<std::size_t> index;
    std::vector<std::string> missing;
    for (const auto& joint : spec.joint_names) {
        for (const char* axis : {"_x", "_y", "_z"}) {
            const auto it = column.find(joint + axis);
            if (it == column.end()) {
                missing.push_back(joint + axis);
            } else {
                index.push_back(it->second);
            }
        }
    }
    if (!missing.empty()) {
        std::string msg = "missing columns:";
        for (const auto& m : missing) {
            msg += " " + m;
        }
        throw IngestError(line_no, msg);
    }

    std::vector<Eigen::RowVectorXd> rows;
    auto reject = [&](int at, const std::string& msg) {
        if (strict) {
            throw IngestError(at, msg);
        }
        result.warnings.push_back({at, msg});
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        const auto cells = csv::split_line(line);
        if (cells.size() != header.size()) {
            reject(line_no, "expected " + std::to_string(header.size()) + " cells, found " +
                                std::to_string(cells.size()));
            continue;
        }
        Eigen::RowVectorXd row(static_cast<Eigen::Index>(index.size()));
        bool ok = true;
        for (std::size_t k = 0; k < index.size() && ok; ++k) {
            const std::string& cell = cells[index[k]];
            const std::optional<double> parsed = csv::parse_number(cell);
            const double v = parsed.value_or(0.0);
            if (!parsed || !std::isfinite(v)) {
                reject(line_no, "non-numeric value '" + cell + "' in column " + header[index[k]]);
                ok = false;
            } else if (std::abs(v) > std::numbers::pi) {
                reject(line_no, "angle " + cell + " in column " + header[index[k]] + " is outside [-pi, pi]");
                ok = false;
            } else {
                row[static_cast<Eigen::Index>(k)] = v;
            }
        }
        if (ok) {
            rows.push_back(std::move(row));
        }
    }

    auto& ds = result.dataset;
    ds.angles.resize(static_cast<Eigen::Index>(rows.size()), 3 * spec.num_joints());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        ds.angles.row(static_cast<Eigen::Index>(i)) = rows[i];
        ds.sources.push_back(source);
    }
    if (ds.empty()) {
        result.warnings.push_back({line_no, "no pose rows found"});
    }
    return result;
}

IngestResult ingest_csv(const std::filesystem::path& path, const env::EnvSpec& spec, bool strict) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IngestError(0, "cannot open '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return ingest_csv_text(buf.str(), spec, strict, path.filename().string());
}

std::string export_csv_text(const PoseDataset& dataset, const env::EnvSpec& spec) {
    if (dataset.joints != spec.num_joints() && !dataset.empty()) {
        throw std::invalid_argument("export_csv: dataset joints do not match env '" + spec.name + "'");
    }
    std::string out;
    bool first = true;
    for (const auto& joint : spec.joint_names) {
        for (const char* axis : {"_x", "_y", "_z"}) {
            out += first ? "" : ",";
            out += joint + axis;
            first = false;
        }
    }
    out += '\n';
    for (Eigen::Index i = 0; i < dataset.angles.rows(); ++i) {
        for (Eigen::Index d = 0; d < dataset.angles.cols(); ++d) {
            out += d == 0 ? "" : ",";
            out += format_angle(dataset.angles(i, d));
        }
        out += '\n';
    }
    return out;
}

void export_csv(const PoseDataset& dataset, const env::EnvSpec& spec, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    out << export_csv_text(dataset, spec);
}

}  // namespace grove::data
