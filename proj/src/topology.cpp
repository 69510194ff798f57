#include "platoon/topology.hpp"

#include <sstream>
#include <stdexcept>

namespace platoon {

std::string to_string(TopologyKind kind) {
    switch (kind) {
        case TopologyKind::PF: return "PF";
        case TopologyKind::PLF: return "PLF";
        case TopologyKind::TPF: return "TPF";
        case TopologyKind::TPLF: return "TPLF";
        case TopologyKind::Custom: return "Custom";
    }
    throw std::invalid_argument("unknown topology kind");
}

TopologyKind topology_kind_from_string(const std::string& name) {
    if (name == "PF") return TopologyKind::PF;
    if (name == "PLF") return TopologyKind::PLF;
    if (name == "TPF") return TopologyKind::TPF;
    if (name == "TPLF") return TopologyKind::TPLF;
    if (name == "Custom") return TopologyKind::Custom;
    throw std::invalid_argument("unknown topology kind: '" + name + "'");
}

namespace {

void validate_matrix(const std::vector<std::uint8_t>& m, int n) {
    const int size = n + 1;
    for (int i = 0; i < size; ++i) {
        if (m[static_cast<std::size_t>(i) * size + i]) {
            throw std::invalid_argument("topology: self edge at vehicle " + std::to_string(i) +
                                        " (M[i][i] must be 0)");
        }
    }
    for (int j = 0; j < size; ++j) {
        if (m[static_cast<std::size_t>(j)]) {
            throw std::invalid_argument("topology: leader row must be all 0 (leader receives from no one)");
        }
    }
    for (int i = 1; i < size; ++i) {
        if (!m[static_cast<std::size_t>(i) * size + (i - 1)]) {
            throw std::invalid_argument("topology: follower " + std::to_string(i) +
                                        " must receive from its predecessor (M[i][i-1] must be 1)");
        }
    }
}

}  // namespace

PlatoonTopology PlatoonTopology::build(TopologyKind kind, int follower_count) {
    if (kind == TopologyKind::Custom) {
        throw std::invalid_argument("topology: Custom requires an explicit adjacency matrix");
    }
    if (follower_count < 1) {
        throw std::invalid_argument("topology: follower count must be >= 1");
    }
    const int n = follower_count;
    const int size = n + 1;
    std::vector<std::uint8_t> m(static_cast<std::size_t>(size) * size, 0);
    auto set = [&](int i, int j) { m[static_cast<std::size_t>(i) * size + j] = 1; };

    for (int i = 1; i <= n; ++i) {
        set(i, i - 1);  // predecessor edge, common to all named kinds
        const bool leader = kind == TopologyKind::PLF || kind == TopologyKind::TPLF;
        const bool second = kind == TopologyKind::TPF || kind == TopologyKind::TPLF;
        if (second && i >= 2) set(i, i - 2);
        if (leader) set(i, 0);  // boolean matrix: no duplicate when the predecessor is the leader
    }
    validate_matrix(m, n);
    return PlatoonTopology(kind, n, std::move(m));
}

PlatoonTopology PlatoonTopology::custom(const std::vector<std::vector<int>>& matrix) {
    const std::size_t size = matrix.size();
    if (size < 2) {
        throw std::invalid_argument("topology: custom matrix needs at least 2 rows (leader + one follower)");
    }
    std::vector<std::uint8_t> m(size * size, 0);
    for (std::size_t i = 0; i < size; ++i) {
        if (matrix[i].size() != size) {
            throw std::invalid_argument("topology: custom matrix must be square, row " + std::to_string(i) +
                                        " has " + std::to_string(matrix[i].size()) + " entries, expected " +
                                        std::to_string(size));
        }
        for (std::size_t j = 0; j < size; ++j) {
            if (matrix[i][j] != 0 && matrix[i][j] != 1) {
                throw std::invalid_argument("topology: custom matrix entries must be 0 or 1");
            }
            m[i * size + j] = static_cast<std::uint8_t>(matrix[i][j]);
        }
    }
    const int n = static_cast<int>(size) - 1;
    validate_matrix(m, n);
    return PlatoonTopology(TopologyKind::Custom, n, std::move(m));
}

PlatoonTopology PlatoonTopology::from_matrix_string(const std::string& text) {
    std::vector<std::vector<int>> rows;
    std::stringstream row_stream(text);
    std::string row;
    while (std::getline(row_stream, row, ';')) {
        std::vector<int> entries;
        std::stringstream cell_stream(row);
        std::string cell;
        while (std::getline(cell_stream, cell, ',')) {
            // trim spaces
            const auto begin = cell.find_first_not_of(" \t");
            const auto end = cell.find_last_not_of(" \t");
            if (begin == std::string::npos) {
                throw std::invalid_argument("topology: empty entry in matrix string");
            }
            const std::string token = cell.substr(begin, end - begin + 1);
            if (token == "0") {
                entries.push_back(0);
            } else if (token == "1") {
                entries.push_back(1);
            } else {
                throw std::invalid_argument("topology: matrix entries must be 0 or 1, got '" + token + "'");
            }
        }
        rows.push_back(std::move(entries));
    }
    return custom(rows);
}

void PlatoonTopology::check_index(int i) const {
    if (i < 0 || i > followers_) {
        throw std::invalid_argument("topology: vehicle index " + std::to_string(i) + " out of range [0, " +
                                    std::to_string(followers_) + "]");
    }
}

bool PlatoonTopology::receives_from(int i, int j) const {
    check_index(i);
    check_index(j);
    return m_[static_cast<std::size_t>(i) * vehicle_count() + j] != 0;
}

std::vector<int> PlatoonTopology::neighbors(int i) const {
    check_index(i);
    std::vector<int> result;
    const int size = vehicle_count();
    for (int j = 0; j < size; ++j) {
        if (m_[static_cast<std::size_t>(i) * size + j]) result.push_back(j);
    }
    return result;
}

std::string PlatoonTopology::matrix_string() const {
    std::string out;
    const int size = vehicle_count();
    for (int i = 0; i < size; ++i) {
        if (i > 0) out += ';';
        for (int j = 0; j < size; ++j) {
            if (j > 0) out += ',';
            out += m_[static_cast<std::size_t>(i) * size + j] ? '1' : '0';
        }
    }
    return out;
}

}  // namespace platoon
