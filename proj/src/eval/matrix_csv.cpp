#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "grove/common/csv.hpp"
#include "grove/eval/metrics.hpp"

namespace grove::eval {

namespace {

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Non-blank lines with their 1-based line numbers.
std::vector<std::pair<int, std::string>> lines_of(const std::string& text) {
    std::vector<std::pair<int, std::string>> out;
    std::istringstream in(text);
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") != std::string::npos) {
            out.emplace_back(n, line);
        }
    }
    return out;
}

double number_at(const std::string& cell, int line, const std::string& column) {
    const auto v = csv::parse_number(cell);
    if (!v) {
        throw std::invalid_argument("line " + std::to_string(line) + ": non-numeric value '" + cell +
                                    "' in column " + column);
    }
    return *v;
}

}  // namespace

SimilarityMatrix parse_matrix_csv(const std::string& text) {
    const auto lines = lines_of(text);
    if (lines.empty()) {
        throw std::invalid_argument("matrix csv: missing header row");
    }
    const auto header = csv::split_line(lines.front().second);
    const bool labelled = header.front().empty() || header.front() == "label";
    SimilarityMatrix m;
    m.columns.assign(header.begin() + (labelled ? 1 : 0), header.end());
    if (m.columns.empty()) {
        throw std::invalid_argument("matrix csv: header has no instruction columns");
    }
    const auto rows = static_cast<Eigen::Index>(lines.size() - 1);
    const auto cols = static_cast<Eigen::Index>(m.columns.size());
    if (rows == 0) {
        throw std::invalid_argument("matrix csv: no data rows");
    }
    m.values.resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& [line_no, line] = lines[static_cast<std::size_t>(r) + 1];
        const auto cells = csv::split_line(line);
        if (cells.size() != header.size()) {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": expected " +
                                        std::to_string(header.size()) + " cells, found " +
                                        std::to_string(cells.size()));
        }
        if (labelled) {
            m.rows.push_back(cells.front());
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            const double v = number_at(cells[static_cast<std::size_t>(c) + (labelled ? 1 : 0)], line_no,
                                       m.columns[static_cast<std::size_t>(c)]);
            if (!std::isfinite(v)) {
                throw std::invalid_argument("line " + std::to_string(line_no) + ": non-finite entry");
            }
            m.values(r, c) = v;
        }
    }
    return m;
}

SimilarityMatrix read_matrix_csv(const std::filesystem::path& path) { return parse_matrix_csv(slurp(path)); }

std::string format_matrix_csv(const SimilarityMatrix& matrix) {
    const bool labelled = !matrix.rows.empty();
    if (labelled && static_cast<Eigen::Index>(matrix.rows.size()) != matrix.values.rows()) {
        throw std::invalid_argument("format_matrix_csv: row labels do not match the row count");
    }
    if (static_cast<Eigen::Index>(matrix.columns.size()) != matrix.values.cols()) {
        throw std::invalid_argument("format_matrix_csv: column labels do not match the column count");
    }
    std::vector<std::string> header;
    if (labelled) {
        header.push_back("label");
    }
    header.insert(header.end(), matrix.columns.begin(), matrix.columns.end());
    std::string out = csv::join(header) + "\n";
    for (Eigen::Index r = 0; r < matrix.values.rows(); ++r) {
        std::vector<std::string> cells;
        if (labelled) {
            cells.push_back(matrix.rows[static_cast<std::size_t>(r)]);
        }
        for (Eigen::Index c = 0; c < matrix.values.cols(); ++c) {
            cells.push_back(csv::format_number(matrix.values(r, c), 17));
        }
        out += csv::join(cells) + "\n";
    }
    return out;
}

std::string format_trajectory_csv(const env::EnvSpec& spec, const std::vector<env::StateEmbed>& trajectory) {
    std::vector<std::string> header{"step"};
    for (const auto& name : spec.joint_names) {
        for (const char* axis : {".x", ".y", ".z"}) {
            header.push_back(name + axis);
        }
    }
    std::string out = csv::join(header) + "\n";
    for (std::size_t t = 0; t < trajectory.size(); ++t) {
        if (trajectory[t].joints.size() != spec.joint_names.size()) {
            throw env::DimensionError("format_trajectory_csv: frame " + std::to_string(t) +
                                      " has the wrong joint count");
        }
        std::vector<std::string> cells{std::to_string(t)};
        for (const auto& j : trajectory[t].joints) {
            for (int i = 0; i < 3; ++i) {
                cells.push_back(csv::format_number(j.pos[i], 17));
            }
        }
        out += csv::join(cells) + "\n";
    }
    return out;
}

PositionTrack parse_trajectory_csv(const std::string& text) {
    const auto lines = lines_of(text);
    if (lines.empty()) {
        throw std::invalid_argument("trajectory csv: missing header row");
    }
    const auto header = csv::split_line(lines.front().second);
    if (header.empty() || header.front() != "step" || (header.size() - 1) % 3 != 0 || header.size() < 4) {
        throw std::invalid_argument("trajectory csv: header must be 'step' followed by x,y,z per joint");
    }
    const std::size_t joints = (header.size() - 1) / 3;
    PositionTrack track;
    for (std::size_t k = 1; k < lines.size(); ++k) {
        const auto& [line_no, line] = lines[k];
        const auto cells = csv::split_line(line);
        if (cells.size() != header.size()) {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": expected " +
                                        std::to_string(header.size()) + " cells, found " +
                                        std::to_string(cells.size()));
        }
        std::vector<Eigen::Vector3d> frame(joints);
        for (std::size_t j = 0; j < joints; ++j) {
            for (int i = 0; i < 3; ++i) {
                const std::size_t col = 1 + 3 * j + static_cast<std::size_t>(i);
                frame[j][i] = number_at(cells[col], line_no, header[col]);
            }
        }
        track.push_back(std::move(frame));
    }
    return track;
}

PositionTrack read_trajectory_csv(const std::filesystem::path& path) { return parse_trajectory_csv(slurp(path)); }

ExpertCurve read_expert_curve(const std::filesystem::path& metrics_csv, double cap) {
    const auto lines = lines_of(slurp(metrics_csv));
    if (lines.empty()) {
        throw std::invalid_argument("metrics csv: missing header row");
    }
    const auto header = csv::split_line(lines.front().second);
    std::size_t it_col = header.size();
    std::size_t ex_col = header.size();
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == "update_index") it_col = i;
        if (header[i] == "expert_reward_mean") ex_col = i;
    }
    if (it_col == header.size() || ex_col == header.size()) {
        throw std::invalid_argument("metrics csv: needs update_index and expert_reward_mean columns");
    }
    ExpertCurve curve;
    curve.cap = cap;
    for (std::size_t k = 1; k < lines.size(); ++k) {
        const auto& [line_no, line] = lines[k];
        const auto cells = csv::split_line(line);
        if (cells.size() != header.size()) {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": wrong cell count");
        }
        const auto ex = csv::parse_number(cells[ex_col]);
        if (!ex || std::isnan(*ex)) {
            continue;
        }
        curve.iterations.push_back(static_cast<int>(number_at(cells[it_col], line_no, "update_index")));
        curve.values.push_back(*ex);
    }
    return curve;
}

}  // namespace grove::eval
