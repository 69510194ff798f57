#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace platoon {

enum class Relation { LessEq, GreaterEq };

struct LinearConstraint {
    std::vector<double> coeffs;
    Relation rel = Relation::LessEq;
    double rhs = 0.0;
};

/// Linear feasibility query: find x with lower <= x <= upper satisfying all
/// constraints, or decide that no such x exists.
struct FeasibilityProblem {
    std::size_t num_vars = 0;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<LinearConstraint> constraints;

    void validate() const;
};

struct SolverOutcome {
    enum class Kind { Witness, Infeasible, Unknown };

    Kind kind = Kind::Unknown;
    std::vector<double> values;  // populated iff Witness
    std::string reason;          // populated iff Unknown

    static SolverOutcome witness(std::vector<double> v);
    static SolverOutcome infeasible();
    static SolverOutcome unknown(std::string why);
};

/// Decision backend contract: for linear constraints over finite interval
/// bounds the answer must be Witness iff the polytope is non-empty; Unknown
/// is reserved for backends with resource limits.
class FeasibilityBackend {
public:
    virtual ~FeasibilityBackend() = default;
    virtual std::string name() const = 0;
    virtual SolverOutcome solve(const FeasibilityProblem& problem) = 0;
};

using BackendFactory = std::function<std::unique_ptr<FeasibilityBackend>()>;

/// Register a backend under `name`; re-registering a name replaces it.
void register_backend(const std::string& name, BackendFactory factory);
std::vector<std::string> registered_backends();

/// Backend selected by the PLATOON_SOLVER environment variable ("simplex"
/// when unset). Throws std::invalid_argument for an unregistered name.
std::string selected_backend_name();

/// Solve with the selected backend. Any witness is re-checked against every
/// constraint (tolerance 1e-7) before being returned.
SolverOutcome solve_feasibility(const FeasibilityProblem& problem);

/// Largest violation of bounds or constraints at x (0 when feasible).
double max_constraint_violation(const FeasibilityProblem& problem, std::span<const double> x);

}  // namespace platoon
