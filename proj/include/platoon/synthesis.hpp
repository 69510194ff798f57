#pragma once

#include <string>
#include <vector>

#include "platoon/affine.hpp"
#include "platoon/lp.hpp"
#include "platoon/simulator.hpp"

namespace platoon {

/// Inter-vehicle gaps e_i[k] as affine functions of the injected false data
/// delta[0..T-1], for k in [0, onset + duration].
struct GapExprs {
    int follower_count = 0;
    int onset = 0;
    int window_end = 0;
    std::vector<std::vector<AffineExpr>> gap;  // gap[k][i-1], i in [1, follower_count]

    const AffineExpr& at(int k, int vehicle) const;
};

/// Unroll the attacked closed loop symbolically. The constant term of every
/// expression is the clean-trace gap; the coefficients are the exact
/// sensitivities to each injected sample.
GapExprs unroll_symbolic(const ScenarioSpec& scenario, const AttackSpec& attack);

/// One violation candidate: gap e_vehicle at step k.
struct Disjunct {
    int vehicle = 0;
    int k = 0;

    bool operator==(const Disjunct&) const = default;
};

/// Vehicles whose gap may carry the safety violation: [1, p] and [p+2, n]
/// (the gap directly behind the rogue is protected, not targeted).
std::vector<int> safety_disjunct_vehicles(int follower_count, int rogue);

/// Vehicles whose gap may carry the performance violation: [p, n].
std::vector<int> perf_disjunct_vehicles(int follower_count, int rogue);

/// Full enumeration order: assertion-window step ascending, vehicle ascending.
std::vector<Disjunct> disjunct_order(const AttackSpec& attack, int follower_count);

/// Per-disjunct encodings. Safety conjoins the violation with the rogue-gap
/// side condition d_min <= e_{p+1} <= d_max over the whole window.
FeasibilityProblem build_safety_problem(const GapExprs& exprs, const AttackSpec& attack,
                                        const Disjunct& disjunct);
FeasibilityProblem build_perf_problem(const GapExprs& exprs, const AttackSpec& attack,
                                      const Disjunct& disjunct);

struct SynthesisOutcome {
    enum class Status { Found, NotFound, Inconclusive };

    Status status = Status::NotFound;
    AttackVector vector;  // valid iff Found
    Disjunct disjunct;    // the feasible disjunct, iff Found
    std::string reason;   // iff Inconclusive
};

/// Unrolls once and answers feasibility queries; reusable across bounds, so a
/// bound sweep does not pay the unrolling cost repeatedly.
class AttackSynthesizer {
public:
    AttackSynthesizer(ScenarioSpec scenario, AttackSpec attack);

    SynthesisOutcome synthesize() const;
    SynthesisOutcome synthesize_at(double theta) const;

    const GapExprs& gaps() const { return gaps_; }
    const ScenarioSpec& scenario() const { return scenario_; }
    const AttackSpec& attack() const { return attack_; }

private:
    ScenarioSpec scenario_;
    AttackSpec attack_;
    GapExprs gaps_;
};

/// Enumerate disjuncts in order and return the first feasible one as an
/// attack vector; NotFound iff every disjunct is infeasible.
SynthesisOutcome synthesize(const ScenarioSpec& scenario, const AttackSpec& attack);

struct VerificationReport {
    bool holds = false;
    std::vector<ViolationEvent> events;
    std::vector<std::string> failures;  // window constraints the trace missed
};

/// Re-simulate the vector concretely and check the goal predicate over the
/// assertion window (threshold tolerance 1e-6 on the side condition).
VerificationReport verify_attack(const ScenarioSpec& scenario, const AttackSpec& attack,
                                 const AttackVector& vector);

}  // namespace platoon
