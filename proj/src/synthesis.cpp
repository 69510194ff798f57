#include "platoon/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace platoon {

const AffineExpr& GapExprs::at(int k, int vehicle) const {
    if (k < 0 || k > window_end) throw std::invalid_argument("gap expression step out of range");
    if (vehicle < 1 || vehicle > follower_count) {
        throw std::invalid_argument("gap expression vehicle out of range");
    }
    return gap[static_cast<std::size_t>(k)][static_cast<std::size_t>(vehicle - 1)];
}

namespace {

struct AffineState {
    AffineExpr s, v, a;
};

AffineState constant_state(std::size_t num_vars, const VehicleState& x) {
    return AffineState{AffineExpr(num_vars, x.s), AffineExpr(num_vars, x.v), AffineExpr(num_vars, x.a)};
}

}  // namespace

GapExprs unroll_symbolic(const ScenarioSpec& scenario, const AttackSpec& attack) {
    const int n = scenario.topology.follower_count();
    attack.validate(n);
    scenario.leader.validate();

    const std::size_t num_vars = static_cast<std::size_t>(attack.duration);
    const int horizon = attack.window_end();
    const VehicleDynamicsSpec& dyn = scenario.dynamics;

    std::vector<AffineState> states;
    for (const VehicleState& x : initial_states(n, dyn)) states.push_back(constant_state(num_vars, x));

    GapExprs out;
    out.follower_count = n;
    out.onset = attack.onset;
    out.window_end = horizon;
    out.gap.resize(static_cast<std::size_t>(horizon) + 1);

    auto record_gaps = [&](int k) {
        auto& row = out.gap[static_cast<std::size_t>(k)];
        row.reserve(static_cast<std::size_t>(n));
        for (int i = 1; i <= n; ++i) {
            row.push_back(states[static_cast<std::size_t>(i - 1)].s - states[static_cast<std::size_t>(i)].s);
        }
    };

    for (int k = 0; k <= horizon; ++k) {
        record_gaps(k);
        if (k == horizon) break;

        // Falsified rogue broadcast while the injection window is active.
        bool window_active = k >= attack.onset && k < attack.onset + attack.duration;
        AffineState rogue_broadcast{};
        if (window_active) {
            const auto t = static_cast<std::size_t>(k - attack.onset);
            const AffineState& rogue = states[static_cast<std::size_t>(attack.rogue)];
            rogue_broadcast = rogue;
            if (attack.gamma.gamma[0]) rogue_broadcast.s += AffineExpr::variable(num_vars, t);
            if (attack.gamma.gamma[1]) rogue_broadcast.v += AffineExpr::variable(num_vars, t);
            if (attack.gamma.gamma[2]) rogue_broadcast.a += AffineExpr::variable(num_vars, t);
        }

        std::vector<AffineExpr> controls(static_cast<std::size_t>(n) + 1, AffineExpr(num_vars));
        for (int i = 1; i <= n; ++i) {
            const AffineState& self = states[static_cast<std::size_t>(i)];
            AffineExpr u(num_vars);
            for (int j : scenario.topology.neighbors(i)) {
                const bool falsified =
                    window_active && j == attack.rogue && i != attack.rogue;
                const AffineState& other =
                    falsified ? rogue_broadcast : states[static_cast<std::size_t>(j)];
                const AffineExpr ds = self.s - other.s - desired_offset(i, j, dyn.spacing);
                const AffineExpr dv = self.v - other.v;
                const AffineExpr da = self.a - other.a;
                u -= dyn.gain[0] * ds + dyn.gain[1] * dv + dyn.gain[2] * da;
            }
            controls[static_cast<std::size_t>(i)] = std::move(u);
        }

        std::vector<AffineState> next(states.size());
        next[0] = constant_state(
            num_vars, leader_step(states[0].s.constant(), states[0].v.constant(),
                                  scenario.leader.at(k + 1), dyn.ts));
        for (int i = 1; i <= n; ++i) {
            const AffineState& x = states[static_cast<std::size_t>(i)];
            const AffineExpr& u = controls[static_cast<std::size_t>(i)];
            next[static_cast<std::size_t>(i)] = AffineState{
                dyn.A[0][0] * x.s + dyn.A[0][1] * x.v + dyn.A[0][2] * x.a + dyn.B[0] * u,
                dyn.A[1][0] * x.s + dyn.A[1][1] * x.v + dyn.A[1][2] * x.a + dyn.B[1] * u,
                dyn.A[2][0] * x.s + dyn.A[2][1] * x.v + dyn.A[2][2] * x.a + dyn.B[2] * u,
            };
        }
        states = std::move(next);
    }
    return out;
}

std::vector<int> safety_disjunct_vehicles(int follower_count, int rogue) {
    std::vector<int> vehicles;
    for (int i = 1; i <= rogue && i <= follower_count; ++i) vehicles.push_back(i);
    for (int i = rogue + 2; i <= follower_count; ++i) vehicles.push_back(i);
    return vehicles;
}

std::vector<int> perf_disjunct_vehicles(int follower_count, int rogue) {
    std::vector<int> vehicles;
    for (int i = rogue; i <= follower_count; ++i) vehicles.push_back(i);
    return vehicles;
}

std::vector<Disjunct> disjunct_order(const AttackSpec& attack, int follower_count) {
    const std::vector<int> vehicles = attack.goal == AttackGoal::Safety
                                          ? safety_disjunct_vehicles(follower_count, attack.rogue)
                                          : perf_disjunct_vehicles(follower_count, attack.rogue);
    std::vector<Disjunct> order;
    for (int k = attack.onset; k <= attack.window_end(); ++k) {
        for (int i : vehicles) order.push_back(Disjunct{i, k});
    }
    return order;
}

namespace {

void check_disjunct(const GapExprs& exprs, const AttackSpec& attack, const Disjunct& disjunct,
                    const std::vector<int>& allowed) {
    if (disjunct.k < attack.onset || disjunct.k > attack.window_end()) {
        throw std::invalid_argument("disjunct step " + std::to_string(disjunct.k) +
                                    " outside assertion window");
    }
    if (std::find(allowed.begin(), allowed.end(), disjunct.vehicle) == allowed.end()) {
        throw std::invalid_argument("disjunct vehicle " + std::to_string(disjunct.vehicle) +
                                    " not allowed for this goal");
    }
    if (exprs.window_end != attack.window_end() || exprs.onset != attack.onset) {
        throw std::invalid_argument("gap expressions do not match the attack window");
    }
}

FeasibilityProblem bounded_problem(const AttackSpec& attack) {
    FeasibilityProblem problem;
    problem.num_vars = static_cast<std::size_t>(attack.duration);
    problem.lower.assign(problem.num_vars, -attack.theta);
    problem.upper.assign(problem.num_vars, attack.theta);
    return problem;
}

LinearConstraint expr_constraint(const AffineExpr& expr, Relation rel, double bound) {
    LinearConstraint c;
    c.coeffs.assign(expr.coeffs().begin(), expr.coeffs().end());
    c.rel = rel;
    c.rhs = bound - expr.constant();
    return c;
}

}  // namespace

FeasibilityProblem build_safety_problem(const GapExprs& exprs, const AttackSpec& attack,
                                        const Disjunct& disjunct) {
    check_disjunct(exprs, attack, disjunct, safety_disjunct_vehicles(exprs.follower_count, attack.rogue));
    FeasibilityProblem problem = bounded_problem(attack);
    problem.constraints.push_back(expr_constraint(exprs.at(disjunct.k, disjunct.vehicle), Relation::LessEq,
                                                  attack.d_min - attack.eps_violation));
    if (attack.rogue + 1 <= exprs.follower_count) {
        for (int k = attack.onset; k <= attack.window_end(); ++k) {
            const AffineExpr& rogue_gap = exprs.at(k, attack.rogue + 1);
            problem.constraints.push_back(expr_constraint(rogue_gap, Relation::GreaterEq, attack.d_min));
            problem.constraints.push_back(expr_constraint(rogue_gap, Relation::LessEq, attack.d_max));
        }
    }
    return problem;
}

FeasibilityProblem build_perf_problem(const GapExprs& exprs, const AttackSpec& attack,
                                      const Disjunct& disjunct) {
    check_disjunct(exprs, attack, disjunct, perf_disjunct_vehicles(exprs.follower_count, attack.rogue));
    FeasibilityProblem problem = bounded_problem(attack);
    problem.constraints.push_back(expr_constraint(exprs.at(disjunct.k, disjunct.vehicle),
                                                  Relation::GreaterEq,
                                                  attack.d_max + attack.eps_violation));
    return problem;
}

AttackSynthesizer::AttackSynthesizer(ScenarioSpec scenario, AttackSpec attack)
    : scenario_(std::move(scenario)), attack_(std::move(attack)),
      gaps_(unroll_symbolic(scenario_, attack_)) {}

SynthesisOutcome AttackSynthesizer::synthesize() const { return synthesize_at(attack_.theta); }

SynthesisOutcome AttackSynthesizer::synthesize_at(double theta) const {
    if (!(theta >= 0.0)) throw std::invalid_argument("synthesize: theta must be >= 0");
    AttackSpec attack = attack_;
    attack.theta = theta;

    std::vector<std::string> unknown_reasons;
    for (const Disjunct& disjunct : disjunct_order(attack, gaps_.follower_count)) {
        const FeasibilityProblem problem = attack.goal == AttackGoal::Safety
                                               ? build_safety_problem(gaps_, attack, disjunct)
                                               : build_perf_problem(gaps_, attack, disjunct);
        const SolverOutcome outcome = solve_feasibility(problem);
        switch (outcome.kind) {
            case SolverOutcome::Kind::Witness: {
                SynthesisOutcome result;
                result.status = SynthesisOutcome::Status::Found;
                result.vector = AttackVector{outcome.values};
                result.disjunct = disjunct;
                return result;
            }
            case SolverOutcome::Kind::Infeasible:
                break;
            case SolverOutcome::Kind::Unknown:
                unknown_reasons.push_back("disjunct (vehicle " + std::to_string(disjunct.vehicle) +
                                          ", k " + std::to_string(disjunct.k) + "): " + outcome.reason);
                break;
        }
    }

    SynthesisOutcome result;
    if (!unknown_reasons.empty()) {
        result.status = SynthesisOutcome::Status::Inconclusive;
        std::ostringstream reason;
        reason << unknown_reasons.size() << " disjunct(s) undecided; first: " << unknown_reasons.front();
        result.reason = reason.str();
    } else {
        result.status = SynthesisOutcome::Status::NotFound;
    }
    return result;
}

SynthesisOutcome synthesize(const ScenarioSpec& scenario, const AttackSpec& attack) {
    return AttackSynthesizer(scenario, attack).synthesize();
}

VerificationReport verify_attack(const ScenarioSpec& scenario, const AttackSpec& attack,
                                 const AttackVector& vector) {
    const int n = scenario.topology.follower_count();
    attack.validate(n);
    if (static_cast<int>(vector.deltas.size()) != attack.duration) {
        throw std::invalid_argument("verify_attack: vector length does not match attack duration");
    }

    const int horizon = attack.window_end();
    const SimulationTrace trace =
        simulate(scenario, horizon, attack.d_min, attack.d_max, AttackRun{attack, vector});

    VerificationReport report;
    report.events = trace.events;

    const double threshold_tol = 1e-6;
    const std::vector<int> allowed = attack.goal == AttackGoal::Safety
                                         ? safety_disjunct_vehicles(n, attack.rogue)
                                         : perf_disjunct_vehicles(n, attack.rogue);

    bool violated = false;
    for (int k = attack.onset; k <= attack.window_end() && !violated; ++k) {
        for (int i : allowed) {
            const double gap = trace.records[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)].gap;
            const bool hit = attack.goal == AttackGoal::Safety ? gap < attack.d_min : gap > attack.d_max;
            if (hit) {
                violated = true;
                break;
            }
        }
    }
    if (!violated) {
        report.failures.push_back(attack.goal == AttackGoal::Safety
                                      ? "no allowed gap fell below d_min inside the assertion window"
                                      : "no allowed gap exceeded d_max inside the assertion window");
    }

    bool side_ok = true;
    if (attack.goal == AttackGoal::Safety && attack.rogue + 1 <= n) {
        for (int k = attack.onset; k <= attack.window_end(); ++k) {
            const double gap = trace.records[static_cast<std::size_t>(k)]
                                            [static_cast<std::size_t>(attack.rogue + 1)].gap;
            if (gap < attack.d_min - threshold_tol || gap > attack.d_max + threshold_tol) {
                side_ok = false;
                std::ostringstream msg;
                msg << "rogue gap e_" << attack.rogue + 1 << "[" << k << "] = " << gap
                    << " outside [d_min, d_max]";
                report.failures.push_back(msg.str());
            }
        }
    }

    report.holds = violated && side_ok;
    return report;
}

}  // namespace platoon
