#include "platoon/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "platoon/errors.hpp"

namespace platoon {

double LeaderProfile::at(int k) const {
    if (velocities.empty()) throw std::invalid_argument("leader profile is empty");
    const auto idx = std::min<std::size_t>(static_cast<std::size_t>(std::max(k, 0)), velocities.size() - 1);
    return velocities[idx];
}

void LeaderProfile::validate() const {
    if (velocities.empty()) throw std::invalid_argument("leader profile is empty");
    for (double v : velocities) {
        if (!std::isfinite(v)) throw std::invalid_argument("leader profile contains a non-finite value");
    }
}

std::string to_string(AttackGoal goal) {
    return goal == AttackGoal::Safety ? "safety" : "perf";
}

AttackGoal attack_goal_from_string(const std::string& name) {
    if (name == "safety") return AttackGoal::Safety;
    if (name == "perf") return AttackGoal::Performance;
    throw std::invalid_argument("unknown attack type: '" + name + "' (expected safety or perf)");
}

std::string to_string(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::Safety: return "safety";
        case ViolationKind::Performance: return "performance";
        case ViolationKind::Collision: return "collision";
    }
    throw std::invalid_argument("unknown violation kind");
}

void AttackSpec::validate(int follower_count) const {
    if (!gamma.any()) throw std::invalid_argument("attack: empty attack surface (gamma all zero)");
    if (rogue < 1 || rogue > follower_count) {
        throw std::invalid_argument("attack: rogue index " + std::to_string(rogue) +
                                    " out of range [1, " + std::to_string(follower_count) + "]");
    }
    if (onset < 0) throw std::invalid_argument("attack: onset must be >= 0");
    if (duration < 1) throw std::invalid_argument("attack: duration must be >= 1");
    if (!(theta >= 0.0)) throw std::invalid_argument("attack: theta must be >= 0");
    if (!(d_min < d_max)) throw std::invalid_argument("attack: d_min must be < d_max");
    if (!(eps_violation > 0.0)) throw std::invalid_argument("attack: eps_violation must be > 0");
}

double SimulationTrace::min_gap() const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& row : records) {
        for (std::size_t i = 1; i < row.size(); ++i) best = std::min(best, row[i].gap);
    }
    return best;
}

double SimulationTrace::max_gap() const {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& row : records) {
        for (std::size_t i = 1; i < row.size(); ++i) best = std::max(best, row[i].gap);
    }
    return best;
}

std::vector<VehicleState> initial_states(int follower_count, const VehicleDynamicsSpec& spec) {
    if (follower_count < 1) throw std::invalid_argument("initial_states: follower count must be >= 1");
    std::vector<VehicleState> states;
    states.reserve(static_cast<std::size_t>(follower_count) + 1);
    for (int i = 0; i <= follower_count; ++i) {
        states.push_back(VehicleState{static_cast<double>(follower_count - i + 1) * spec.spacing,
                                      spec.v_init, 0.0});
    }
    return states;
}

VehicleState leader_step(double s0, double v_prev, double v_next, double ts) {
    if (!(ts > 0.0)) throw std::invalid_argument("leader_step: ts must be > 0");
    const double a0 = (v_next - v_prev) / ts;
    const double s = s0 + v_prev * ts + 0.5 * a0 * ts * ts;
    return VehicleState{s, v_next, a0};
}

namespace {

std::vector<double> gaps_of(const std::vector<VehicleState>& states) {
    std::vector<double> gaps(states.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 1; i < states.size(); ++i) gaps[i] = states[i - 1].s - states[i].s;
    return gaps;
}

}  // namespace

SimulationTrace simulate(const ScenarioSpec& scenario, int horizon, double d_min, double d_max,
                         const std::optional<AttackRun>& attack) {
    const int n = scenario.topology.follower_count();
    scenario.leader.validate();
    if (horizon < 1) throw std::invalid_argument("simulate: horizon must be >= 1");
    if (attack) {
        attack->spec.validate(n);
        if (attack->spec.onset + attack->spec.duration > horizon) {
            throw std::invalid_argument("simulate: attack window exceeds horizon");
        }
        if (static_cast<int>(attack->vector.deltas.size()) != attack->spec.duration) {
            throw std::invalid_argument("simulate: attack vector length " +
                                        std::to_string(attack->vector.deltas.size()) +
                                        " does not match duration " + std::to_string(attack->spec.duration));
        }
        const double slack = 1e-7 * std::max(1.0, attack->spec.theta);
        for (double delta : attack->vector.deltas) {
            if (!std::isfinite(delta) || std::abs(delta) > attack->spec.theta + slack) {
                throw std::invalid_argument("simulate: attack vector entry exceeds bound theta");
            }
        }
    }

    SimulationTrace trace;
    trace.follower_count = n;
    trace.horizon = horizon;
    trace.records.resize(static_cast<std::size_t>(horizon) + 1);

    std::vector<VehicleState> states = initial_states(n, scenario.dynamics);
    std::vector<double> controls(states.size(), 0.0);

    for (int k = 0; k <= horizon; ++k) {
        // Controls at step k; injection replaces the rogue's broadcast for its
        // receivers while the window [onset, onset + duration) is active.
        std::map<int, VehicleState> falsified;
        if (attack && k >= attack->spec.onset && k < attack->spec.onset + attack->spec.duration) {
            const double delta = attack->vector.deltas[static_cast<std::size_t>(k - attack->spec.onset)];
            falsified.emplace(attack->spec.rogue,
                              apply_attack(states[static_cast<std::size_t>(attack->spec.rogue)],
                                           attack->spec.gamma, delta));
        }
        controls[0] = 0.0;
        for (int i = 1; i <= n; ++i) {
            const bool sees_rogue = !falsified.empty() && i != attack->spec.rogue &&
                                    scenario.topology.receives_from(i, attack->spec.rogue);
            static const std::map<int, VehicleState> kNoFalsified;
            controls[static_cast<std::size_t>(i)] = control_input(
                i, states, scenario.topology, scenario.dynamics, sees_rogue ? falsified : kNoFalsified);
        }

        auto& row = trace.records[static_cast<std::size_t>(k)];
        row.resize(states.size());
        const std::vector<double> gaps = gaps_of(states);
        for (std::size_t i = 0; i < states.size(); ++i) {
            row[i] = StepRecord{states[i], controls[i], gaps[i]};
        }

        if (k == horizon) break;

        std::vector<VehicleState> next(states.size());
        next[0] = leader_step(states[0].s, states[0].v, scenario.leader.at(k + 1), scenario.dynamics.ts);
        if (!next[0].finite()) {
            throw NumericError("simulate: non-finite leader state at step " + std::to_string(k + 1));
        }
        for (int i = 1; i <= n; ++i) {
            try {
                next[static_cast<std::size_t>(i)] =
                    step(states[static_cast<std::size_t>(i)], controls[static_cast<std::size_t>(i)],
                         scenario.dynamics);
            } catch (const NumericError&) {
                throw NumericError("simulate: non-finite state for vehicle " + std::to_string(i) +
                                   " at step " + std::to_string(k + 1));
            }
        }
        states = std::move(next);
    }

    trace.events = monitor(trace, d_min, d_max);
    return trace;
}

std::vector<ViolationEvent> monitor(const SimulationTrace& trace, double d_min, double d_max) {
    std::vector<ViolationEvent> events;
    for (int k = 0; k < static_cast<int>(trace.records.size()); ++k) {
        const auto& row = trace.records[static_cast<std::size_t>(k)];
        for (int i = 1; i < static_cast<int>(row.size()); ++i) {
            const double gap = row[static_cast<std::size_t>(i)].gap;
            if (gap < d_min) events.push_back(ViolationEvent{ViolationKind::Safety, k, i, gap});
            if (gap > d_max) events.push_back(ViolationEvent{ViolationKind::Performance, k, i, gap});
            if (gap <= 0.0) events.push_back(ViolationEvent{ViolationKind::Collision, k, i, gap});
        }
    }
    return events;
}

}  // namespace platoon
