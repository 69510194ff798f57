#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <random>

#include "platoon/synthesis.hpp"

using namespace platoon;

namespace {

constexpr double kVInit = 20.0;

ScenarioSpec paper_scenario(TopologyKind kind, int n) {
    ScenarioSpec scenario;
    scenario.topology = PlatoonTopology::build(kind, n);
    scenario.dynamics = VehicleDynamicsSpec::make(0.5, 0.1, {1.0, 2.0, 1.0}, 20.0, kVInit);
    scenario.leader = LeaderProfile::constant(kVInit);
    return scenario;
}

AttackSpec make_attack(int rogue, int onset, int duration, double theta, AttackGoal goal,
                       double d_min, double d_max, AttackSurface gamma = {{false, false, true}}) {
    AttackSpec attack;
    attack.gamma = gamma;
    attack.rogue = rogue;
    attack.onset = onset;
    attack.duration = duration;
    attack.theta = theta;
    attack.goal = goal;
    attack.d_min = d_min;
    attack.d_max = d_max;
    return attack;
}

std::vector<double> window_gaps(const ScenarioSpec& scenario, const AttackSpec& attack,
                                const std::vector<double>& deltas, int vehicle) {
    const auto trace = simulate(scenario, attack.window_end(), attack.d_min, attack.d_max,
                                AttackRun{attack, AttackVector{deltas}});
    std::vector<double> gaps;
    for (int k = attack.onset; k <= attack.window_end(); ++k) {
        gaps.push_back(trace.records[static_cast<std::size_t>(k)][static_cast<std::size_t>(vehicle)].gap);
    }
    return gaps;
}

// Exhaustive {-theta, 0, +theta}^T search using the concrete simulator and
// the same (margin-guarded) predicate the encodings pose. Used as the
// one-sided completeness oracle: grid hit => synthesis must find a witness.
bool grid_finds_attack(const ScenarioSpec& scenario, const AttackSpec& attack) {
    const double guard = 1e-9;
    const int n = scenario.topology.follower_count();
    const std::vector<int> allowed = attack.goal == AttackGoal::Safety
                                         ? safety_disjunct_vehicles(n, attack.rogue)
                                         : perf_disjunct_vehicles(n, attack.rogue);
    std::vector<double> deltas(static_cast<std::size_t>(attack.duration), 0.0);
    const double levels[] = {-attack.theta, 0.0, attack.theta};
    const auto total = static_cast<std::size_t>(std::pow(3.0, attack.duration));
    for (std::size_t code = 0; code < total; ++code) {
        std::size_t rest = code;
        for (auto& d : deltas) {
            d = levels[rest % 3];
            rest /= 3;
        }
        const auto trace = simulate(scenario, attack.window_end(), attack.d_min, attack.d_max,
                                    AttackRun{attack, AttackVector{deltas}});
        bool violated = false;
        for (int k = attack.onset; k <= attack.window_end() && !violated; ++k) {
            for (int i : allowed) {
                const double gap =
                    trace.records[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)].gap;
                if (attack.goal == AttackGoal::Safety
                        ? gap <= attack.d_min - attack.eps_violation - guard
                        : gap >= attack.d_max + attack.eps_violation + guard) {
                    violated = true;
                    break;
                }
            }
        }
        if (!violated) continue;
        bool side_ok = true;
        if (attack.goal == AttackGoal::Safety && attack.rogue + 1 <= n) {
            for (int k = attack.onset; k <= attack.window_end(); ++k) {
                const double gap = trace.records[static_cast<std::size_t>(k)]
                                                [static_cast<std::size_t>(attack.rogue + 1)].gap;
                if (gap < attack.d_min + guard || gap > attack.d_max - guard) {
                    side_ok = false;
                    break;
                }
            }
        }
        if (side_ok) return true;
    }
    return false;
}

}  // namespace

TEST_CASE("gap expressions respect causality") {
    const auto scenario = paper_scenario(TopologyKind::TPLF, 4);
    const auto attack = make_attack(2, 6, 12, 40.0, AttackGoal::Safety, 5.0, 60.0);
    const auto exprs = unroll_symbolic(scenario, attack);
    REQUIRE(exprs.window_end == 18);
    for (int k = 0; k <= exprs.window_end; ++k) {
        for (int i = 1; i <= 4; ++i) {
            const auto coeffs = exprs.at(k, i).coeffs();
            for (int t = 0; t < attack.duration; ++t) {
                if (k <= attack.onset + t) {
                    REQUIRE(coeffs[static_cast<std::size_t>(t)] == 0.0);
                }
            }
        }
    }
}

TEST_CASE("gap expressions reproduce the clean trace at delta = 0") {
    const auto scenario = paper_scenario(TopologyKind::PLF, 3);
    const auto attack = make_attack(1, 4, 10, 25.0, AttackGoal::Safety, 5.0, 60.0);
    const auto exprs = unroll_symbolic(scenario, attack);
    const auto clean = simulate(scenario, exprs.window_end, attack.d_min, attack.d_max);
    for (int k = 0; k <= exprs.window_end; ++k) {
        for (int i = 1; i <= 3; ++i) {
            const double expected =
                clean.records[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)].gap;
            REQUIRE(std::abs(exprs.at(k, i).constant() - expected) < 1e-9);
        }
    }
}

TEST_CASE("gap expressions evaluate to the concrete gaps at random delta") {
    std::mt19937 rng(5150);
    for (auto kind : {TopologyKind::PF, TopologyKind::TPF}) {
        const auto scenario = paper_scenario(kind, 4);
        const auto attack = make_attack(2, 3, 15, 35.0, AttackGoal::Safety, 5.0, 60.0);
        const auto exprs = unroll_symbolic(scenario, attack);
        std::uniform_real_distribution<double> dist(-attack.theta, attack.theta);
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<double> deltas(15);
            for (auto& d : deltas) d = dist(rng);
            const auto trace = simulate(scenario, exprs.window_end, attack.d_min, attack.d_max,
                                        AttackRun{attack, AttackVector{deltas}});
            for (int k = 0; k <= exprs.window_end; ++k) {
                for (int i = 1; i <= 4; ++i) {
                    const double concrete =
                        trace.records[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)].gap;
                    REQUIRE(std::abs(exprs.at(k, i).evaluate(deltas) - concrete) < 1e-8);
                }
            }
        }
    }
}

TEST_CASE("disjunct vehicle ranges follow the assertion semantics") {
    CHECK(safety_disjunct_vehicles(4, 2) == std::vector<int>{1, 2, 4});
    CHECK(safety_disjunct_vehicles(4, 4) == std::vector<int>{1, 2, 3, 4});
    CHECK(safety_disjunct_vehicles(2, 1) == std::vector<int>{1});
    CHECK(perf_disjunct_vehicles(4, 2) == std::vector<int>{2, 3, 4});
    CHECK(perf_disjunct_vehicles(3, 3) == std::vector<int>{3});
}

TEST_CASE("disjunct enumeration covers window x vehicles in deterministic order") {
    const auto attack = make_attack(2, 10, 50, 50.0, AttackGoal::Safety, 5.0, 60.0);
    const auto order = disjunct_order(attack, 4);
    CHECK(order.size() == 3 * 51);  // {1,2,4} x [10, 60]
    CHECK(order.front() == Disjunct{1, 10});
    CHECK(order.back() == Disjunct{4, 60});
    for (std::size_t t = 1; t < order.size(); ++t) {
        const bool k_ascending = order[t - 1].k < order[t].k;
        const bool same_k_vehicle_ascending =
            order[t - 1].k == order[t].k && order[t - 1].vehicle < order[t].vehicle;
        CHECK((k_ascending || same_k_vehicle_ascending));
    }
}

TEST_CASE("problem builders validate the disjunct and encode the window") {
    const auto scenario = paper_scenario(TopologyKind::PF, 4);
    const auto attack = make_attack(2, 5, 8, 30.0, AttackGoal::Safety, 5.0, 60.0);
    const auto exprs = unroll_symbolic(scenario, attack);

    SUBCASE("safety problem carries the violation plus both side bounds per window step") {
        const auto p = build_safety_problem(exprs, attack, Disjunct{4, 9});
        CHECK(p.num_vars == 8);
        CHECK(p.constraints.size() == 1 + 2 * 9);  // window [5, 13]
        for (double lo : p.lower) CHECK(lo == -30.0);
        for (double hi : p.upper) CHECK(hi == 30.0);
    }
    SUBCASE("perf problem is a single violation constraint") {
        const auto perf = make_attack(2, 5, 8, 30.0, AttackGoal::Performance, 5.0, 60.0);
        const auto p = build_perf_problem(exprs, perf, Disjunct{3, 13});
        CHECK(p.constraints.size() == 1);
    }
    SUBCASE("rogue-adjacent vehicle and out-of-window steps are rejected") {
        CHECK_THROWS_AS(build_safety_problem(exprs, attack, Disjunct{3, 9}), std::invalid_argument);
        CHECK_THROWS_AS(build_safety_problem(exprs, attack, Disjunct{4, 4}), std::invalid_argument);
        CHECK_THROWS_AS(build_safety_problem(exprs, attack, Disjunct{4, 14}), std::invalid_argument);
        CHECK_THROWS_AS(build_perf_problem(exprs, make_attack(2, 5, 8, 30.0, AttackGoal::Performance,
                                                              5.0, 60.0),
                                           Disjunct{1, 9}),
                        std::invalid_argument);
    }
}

TEST_CASE("zero-bound synthesis from equilibrium finds nothing") {
    for (auto goal : {AttackGoal::Safety, AttackGoal::Performance}) {
        const auto scenario = paper_scenario(TopologyKind::PF, 4);
        const auto attack = make_attack(2, 10, 20, 0.0, goal, 5.0, 60.0);
        const auto outcome = synthesize(scenario, attack);
        CHECK(outcome.status == SynthesisOutcome::Status::NotFound);
    }
}

TEST_CASE("an already-violated threshold is feasible with zero injection") {
    const auto scenario = paper_scenario(TopologyKind::PF, 4);
    // equilibrium gap is 20, so d_max = 19 is already exceeded
    const auto attack = make_attack(2, 2, 5, 0.0, AttackGoal::Performance, 1.0, 19.0);
    const auto outcome = synthesize(scenario, attack);
    REQUIRE(outcome.status == SynthesisOutcome::Status::Found);
    for (double d : outcome.vector.deltas) CHECK(std::abs(d) < 1e-9);
    CHECK(verify_attack(scenario, attack, outcome.vector).holds);
}

TEST_CASE("synthesized attacks replay successfully on the concrete simulator") {
    int found = 0;
    for (auto kind : {TopologyKind::PF, TopologyKind::PLF, TopologyKind::TPF, TopologyKind::TPLF}) {
        for (int n : {2, 3, 4}) {
            for (auto goal : {AttackGoal::Safety, AttackGoal::Performance}) {
                const auto scenario = paper_scenario(kind, n);
                const int rogue = n >= 2 ? 2 : 1;
                const auto attack = make_attack(rogue, 5, 25, 80.0, goal, 5.0, 40.0);
                const auto outcome = synthesize(scenario, attack);
                if (outcome.status != SynthesisOutcome::Status::Found) continue;
                ++found;
                REQUIRE(outcome.vector.deltas.size() == 25);
                for (double d : outcome.vector.deltas) REQUIRE(std::abs(d) <= 80.0 + 1e-7);
                const auto report = verify_attack(scenario, attack, outcome.vector);
                INFO(to_string(kind), " n=", n, " goal=", to_string(goal));
                REQUIRE(report.holds);
            }
        }
    }
    CHECK(found > 0);  // the sweep must actually exercise the replay path
}

TEST_CASE("synthesis is deterministic") {
    const auto scenario = paper_scenario(TopologyKind::PF, 3);
    const auto attack = make_attack(1, 5, 15, 60.0, AttackGoal::Performance, 5.0, 25.0);
    const auto first = synthesize(scenario, attack);
    const auto second = synthesize(scenario, attack);
    REQUIRE(first.status == second.status);
    if (first.status == SynthesisOutcome::Status::Found) {
        CHECK(first.vector == second.vector);
        CHECK(first.disjunct == second.disjunct);
    }
}

TEST_CASE("grid oracle hits imply synthesis hits") {
    const auto scenario = paper_scenario(TopologyKind::PF, 2);
    int grid_hits = 0;
    for (double offset : {0.001, 0.01, 0.05, 0.5, 5.0}) {
        const auto attack = make_attack(1, 2, 3, 10.0, AttackGoal::Performance, 1.0, 20.0 + offset,
                                        AttackSurface{{false, true, false}});
        const bool grid = grid_finds_attack(scenario, attack);
        const auto outcome = AttackSynthesizer(scenario, attack).synthesize();
        if (grid) {
            ++grid_hits;
            REQUIRE(outcome.status == SynthesisOutcome::Status::Found);
            CHECK(verify_attack(scenario, attack, outcome.vector).holds);
        }
    }
    CHECK(grid_hits > 0);  // at least the smallest offsets must be reachable
}

TEST_CASE("theta monotonicity on a small configuration") {
    const auto scenario = paper_scenario(TopologyKind::PF, 3);
    const auto attack = make_attack(1, 4, 12, 1.0, AttackGoal::Performance, 5.0, 21.0);
    const AttackSynthesizer synthesizer(scenario, attack);

    // scan upward until the first success, then check both directions
    double feasible_theta = -1.0;
    for (double theta : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0}) {
        if (synthesizer.synthesize_at(theta).status == SynthesisOutcome::Status::Found) {
            feasible_theta = theta;
            break;
        }
    }
    REQUIRE(feasible_theta > 0.0);
    CHECK(synthesizer.synthesize_at(2.0 * feasible_theta).status == SynthesisOutcome::Status::Found);
    if (feasible_theta > 0.5) {
        CHECK(synthesizer.synthesize_at(feasible_theta / 4.0).status !=
              SynthesisOutcome::Status::Found);
    }
}

TEST_CASE("unknown backend outcomes propagate as inconclusive") {
    struct UndecidedBackend final : FeasibilityBackend {
        std::string name() const override { return "undecided"; }
        SolverOutcome solve(const FeasibilityProblem&) override {
            return SolverOutcome::unknown("resource limit");
        }
    };
    register_backend("undecided", [] { return std::make_unique<UndecidedBackend>(); });
    setenv("PLATOON_SOLVER", "undecided", 1);
    const auto scenario = paper_scenario(TopologyKind::PF, 2);
    const auto attack = make_attack(1, 2, 5, 10.0, AttackGoal::Performance, 5.0, 60.0);
    const auto outcome = synthesize(scenario, attack);
    unsetenv("PLATOON_SOLVER");
    CHECK(outcome.status == SynthesisOutcome::Status::Inconclusive);
    CHECK(outcome.reason.find("resource limit") != std::string::npos);
}

TEST_CASE("verify_attack accepts real violations and reports missing ones") {
    const auto scenario = paper_scenario(TopologyKind::PF, 3);
    const auto attack = make_attack(1, 3, 18, 70.0, AttackGoal::Performance, 5.0, 24.0);
    const auto outcome = synthesize(scenario, attack);
    REQUIRE(outcome.status == SynthesisOutcome::Status::Found);

    SUBCASE("the synthesized vector holds") {
        const auto report = verify_attack(scenario, attack, outcome.vector);
        CHECK(report.holds);
        CHECK(report.failures.empty());
    }
    SUBCASE("an all-zero vector does not hold and says why") {
        const AttackVector zeros{std::vector<double>(18, 0.0)};
        const auto report = verify_attack(scenario, attack, zeros);
        CHECK_FALSE(report.holds);
        REQUIRE_FALSE(report.failures.empty());
        CHECK(report.failures.front().find("d_max") != std::string::npos);
    }
    SUBCASE("length mismatches are rejected") {
        CHECK_THROWS_AS(verify_attack(scenario, attack, AttackVector{{1.0}}), std::invalid_argument);
    }
}

TEST_CASE("window gap probe helper sees the violation the report claims") {
    // cross-check between verify_attack and raw trace reading
    const auto scenario = paper_scenario(TopologyKind::PF, 2);
    const auto attack = make_attack(1, 2, 10, 50.0, AttackGoal::Performance, 5.0, 22.0);
    const auto outcome = synthesize(scenario, attack);
    if (outcome.status == SynthesisOutcome::Status::Found) {
        const auto gaps = window_gaps(scenario, attack, outcome.vector.deltas, outcome.disjunct.vehicle);
        double best = -1e300;
        for (double g : gaps) best = std::max(best, g);
        CHECK(best > attack.d_max);
    }
}
