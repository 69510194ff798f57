#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace platoon {

enum class TopologyKind { PF, PLF, TPF, TPLF, Custom };

std::string to_string(TopologyKind kind);
TopologyKind topology_kind_from_string(const std::string& name);

/// Directed information-flow graph over n+1 vehicles, leader at index 0.
/// M[i][j] == true iff vehicle i receives vehicle j's broadcast state.
///
/// Invariants (enforced on construction):
///  - no self edges,
///  - the leader receives from no one,
///  - every follower receives from its predecessor,
///  - named kinds only carry front-to-back edges.
///
/// Immutable after construction; safe to share across threads.
class PlatoonTopology {
public:
    /// Minimal valid platoon: PF with a single follower.
    PlatoonTopology() : PlatoonTopology(TopologyKind::PF, 1, {0, 0, 1, 0}) {}

    /// Generate one of the named topologies for `follower_count` followers.
    static PlatoonTopology build(TopologyKind kind, int follower_count);

    /// Validate and adopt a user-supplied adjacency matrix (row-major, one
    /// inner vector per vehicle starting with the leader).
    static PlatoonTopology custom(const std::vector<std::vector<int>>& matrix);

    /// Parse "0,0;1,0"-style row-major matrix text (rows split on ';').
    static PlatoonTopology from_matrix_string(const std::string& text);

    TopologyKind kind() const { return kind_; }
    int follower_count() const { return followers_; }
    int vehicle_count() const { return followers_ + 1; }

    /// M[i][j]; throws std::invalid_argument when an index is out of range.
    bool receives_from(int i, int j) const;

    /// Neighbour set of vehicle i in ascending index order.
    std::vector<int> neighbors(int i) const;

    /// Row-major serialization matching the scenario-config matrix format.
    std::string matrix_string() const;

    bool operator==(const PlatoonTopology& other) const = default;

private:
    PlatoonTopology(TopologyKind kind, int followers, std::vector<std::uint8_t> m)
        : kind_(kind), followers_(followers), m_(std::move(m)) {}

    void check_index(int i) const;

    TopologyKind kind_ = TopologyKind::PF;
    int followers_ = 0;
    std::vector<std::uint8_t> m_;  // (n+1) x (n+1), row-major
};

}  // namespace platoon
