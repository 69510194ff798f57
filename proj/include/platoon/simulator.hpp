#pragma once

#include <optional>
#include <string>
#include <vector>

#include "platoon/dynamics.hpp"
#include "platoon/topology.hpp"

namespace platoon {

/// Leader velocity samples indexed by step k. A profile shorter than the
/// simulation horizon is extended by holding its last sample.
struct LeaderProfile {
    std::vector<double> velocities;

    static LeaderProfile constant(double v) { return LeaderProfile{{v}}; }
    double at(int k) const;
    void validate() const;
};

/// Complete closed-loop system definition.
struct ScenarioSpec {
    PlatoonTopology topology;
    VehicleDynamicsSpec dynamics;
    LeaderProfile leader;
};

enum class AttackGoal { Safety, Performance };

std::string to_string(AttackGoal goal);
AttackGoal attack_goal_from_string(const std::string& name);

struct AttackSpec {
    AttackSurface gamma;
    int rogue = 1;      // index p of the falsifying platoon member
    int onset = 0;      // step s at which injection starts
    int duration = 1;   // number of injected samples T
    double theta = 0.0; // false-data bound: each sample lies in [-theta, theta]
    AttackGoal goal = AttackGoal::Safety;
    double d_min = 0.0;          // safety gap threshold [m]
    double d_max = 0.0;          // performance gap threshold [m]
    double eps_violation = 1e-6; // strictness margin closing the violation inequalities [m]

    /// Last step of the assertion window [onset, onset + duration].
    int window_end() const { return onset + duration; }

    void validate(int follower_count) const;
};

struct AttackVector {
    std::vector<double> deltas;

    bool operator==(const AttackVector&) const = default;
};

enum class ViolationKind { Safety, Performance, Collision };

std::string to_string(ViolationKind kind);

struct ViolationEvent {
    ViolationKind kind;
    int k;
    int vehicle;
    double gap;

    bool operator==(const ViolationEvent&) const = default;
};

struct StepRecord {
    VehicleState state;
    double u = 0.0;
    double gap = 0.0;  // e_i = s_{i-1} - s_i; NaN for the leader (no predecessor)
};

struct SimulationTrace {
    int follower_count = 0;
    int horizon = 0;
    std::vector<std::vector<StepRecord>> records;  // [k][vehicle], k in [0, horizon]
    std::vector<ViolationEvent> events;

    double min_gap() const;
    double max_gap() const;
};

/// Initial platoon configuration: vehicle i at position (n-i+1)*spacing,
/// common velocity v_init, zero acceleration.
std::vector<VehicleState> initial_states(int follower_count, const VehicleDynamicsSpec& spec);

/// Leader kinematics between consecutive profile samples.
VehicleState leader_step(double s0, double v_prev, double v_next, double ts);

struct AttackRun {
    AttackSpec spec;
    AttackVector vector;
};

/// Execute the closed loop for `horizon` steps. When an attack is present,
/// every follower that receives the rogue's broadcast uses the falsified
/// state x_p + Gamma * delta[k - onset] while onset <= k < onset + duration.
/// Gaps below d_min / above d_max / at or below zero are recorded as events;
/// collisions do not halt the run.
SimulationTrace simulate(const ScenarioSpec& scenario, int horizon, double d_min, double d_max,
                         const std::optional<AttackRun>& attack = std::nullopt);

/// Scan a trace for threshold crossings; events sorted by (k, vehicle).
std::vector<ViolationEvent> monitor(const SimulationTrace& trace, double d_min, double d_max);

}  // namespace platoon
