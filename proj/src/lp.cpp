#include "platoon/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <stdexcept>

namespace platoon {

void FeasibilityProblem::validate() const {
    if (num_vars == 0) throw std::invalid_argument("feasibility problem: num_vars must be >= 1");
    if (lower.size() != num_vars || upper.size() != num_vars) {
        throw std::invalid_argument("feasibility problem: bound vectors must have num_vars entries");
    }
    for (std::size_t t = 0; t < num_vars; ++t) {
        if (!std::isfinite(lower[t]) || !std::isfinite(upper[t])) {
            throw std::invalid_argument("feasibility problem: bounds must be finite");
        }
        if (lower[t] > upper[t]) {
            throw std::invalid_argument("feasibility problem: bounds not well-ordered at variable " +
                                        std::to_string(t));
        }
    }
    for (const auto& c : constraints) {
        if (c.coeffs.size() != num_vars) {
            throw std::invalid_argument("feasibility problem: constraint coefficient length mismatch");
        }
        if (!std::isfinite(c.rhs)) throw std::invalid_argument("feasibility problem: rhs must be finite");
        for (double a : c.coeffs) {
            if (!std::isfinite(a)) {
                throw std::invalid_argument("feasibility problem: coefficients must be finite");
            }
        }
    }
}

SolverOutcome SolverOutcome::witness(std::vector<double> v) {
    return SolverOutcome{Kind::Witness, std::move(v), {}};
}

SolverOutcome SolverOutcome::infeasible() { return SolverOutcome{Kind::Infeasible, {}, {}}; }

SolverOutcome SolverOutcome::unknown(std::string why) {
    return SolverOutcome{Kind::Unknown, {}, std::move(why)};
}

double max_constraint_violation(const FeasibilityProblem& problem, std::span<const double> x) {
    if (x.size() != problem.num_vars) {
        throw std::invalid_argument("max_constraint_violation: point has wrong dimension");
    }
    double worst = 0.0;
    for (std::size_t t = 0; t < problem.num_vars; ++t) {
        worst = std::max(worst, problem.lower[t] - x[t]);
        worst = std::max(worst, x[t] - problem.upper[t]);
    }
    for (const auto& c : problem.constraints) {
        double lhs = 0.0;
        for (std::size_t t = 0; t < problem.num_vars; ++t) lhs += c.coeffs[t] * x[t];
        worst = std::max(worst, c.rel == Relation::LessEq ? lhs - c.rhs : c.rhs - lhs);
    }
    return worst;
}

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kPhaseOneTol = 1e-9;

// One row of the normalized system a.y <= b over shifted variables y >= 0.
struct LeRow {
    std::vector<double> coeffs;
    double rhs;
};

/// Dense phase-one simplex deciding feasibility of {A y <= b, 0 <= y}.
/// Upper bounds are passed in as ordinary rows by the caller. Dantzig pricing
/// with a switch to Bland's rule after a stall, so termination is guaranteed.
class PhaseOneSimplex {
public:
    PhaseOneSimplex(std::vector<LeRow> rows, std::size_t num_vars)
        : n_(num_vars), m_(rows.size()) {
        std::size_t num_art = 0;
        for (const auto& row : rows) {
            if (row.rhs < 0.0) ++num_art;
        }
        cols_ = n_ + m_ + num_art;
        tab_.assign(m_, std::vector<double>(cols_ + 1, 0.0));
        basis_.resize(m_);
        cost_.assign(cols_ + 1, 0.0);

        std::size_t art = n_ + m_;
        for (std::size_t r = 0; r < m_; ++r) {
            auto& t = tab_[r];
            const bool negate = rows[r].rhs < 0.0;
            const double sign = negate ? -1.0 : 1.0;
            for (std::size_t j = 0; j < n_; ++j) t[j] = sign * rows[r].coeffs[j];
            t[n_ + r] = sign;  // slack
            t[cols_] = sign * rows[r].rhs;
            if (negate) {
                t[art] = 1.0;
                basis_[r] = art;
                ++art;
            } else {
                basis_[r] = n_ + r;
            }
        }
        // Minimize the artificial sum: price out the basic artificials.
        for (std::size_t j = n_ + m_; j < cols_; ++j) cost_[j] = 1.0;
        for (std::size_t r = 0; r < m_; ++r) {
            if (basis_[r] >= n_ + m_) {
                for (std::size_t j = 0; j <= cols_; ++j) cost_[j] -= tab_[r][j];
            }
        }
    }

    // Returns true iff the system is feasible; y() then holds a witness.
    bool run() {
        const std::size_t max_iter = 2000 + 200 * (m_ + n_);
        const std::size_t bland_after = 500 + 20 * (m_ + n_);
        for (std::size_t iter = 0; iter < max_iter; ++iter) {
            const std::size_t enter = pick_entering(iter >= bland_after);
            if (enter == cols_) break;  // optimal
            const std::size_t leave = pick_leaving(enter);
            if (leave == m_) {
                // Phase-one objective is bounded below by zero, so an
                // unbounded ray cannot occur with consistent data.
                throw std::logic_error("simplex: unbounded phase-one problem");
            }
            pivot(leave, enter);
            if (iter + 1 == max_iter) throw std::logic_error("simplex: iteration cap exceeded");
        }
        return -cost_[cols_] <= kPhaseOneTol;  // objective value = -cost rhs cell
    }

    std::vector<double> y() const {
        std::vector<double> value(n_, 0.0);
        for (std::size_t r = 0; r < m_; ++r) {
            if (basis_[r] < n_) value[basis_[r]] = tab_[r][cols_];
        }
        return value;
    }

private:
    std::size_t pick_entering(bool bland) const {
        std::size_t best = cols_;
        double most_negative = -kPivotTol;
        for (std::size_t j = 0; j < cols_; ++j) {
            if (cost_[j] < most_negative) {
                if (bland) return j;
                most_negative = cost_[j];
                best = j;
            }
        }
        return best;
    }

    std::size_t pick_leaving(std::size_t enter) const {
        std::size_t best = m_;
        double best_ratio = 0.0;
        for (std::size_t r = 0; r < m_; ++r) {
            const double a = tab_[r][enter];
            if (a <= kPivotTol) continue;
            const double ratio = tab_[r][cols_] / a;
            if (best == m_ || ratio < best_ratio - 1e-12 ||
                (std::abs(ratio - best_ratio) <= 1e-12 && basis_[r] < basis_[best])) {
                best = r;
                best_ratio = ratio;
            }
        }
        return best;
    }

    void pivot(std::size_t row, std::size_t col) {
        auto& prow = tab_[row];
        const double inv = 1.0 / prow[col];
        for (double& v : prow) v *= inv;
        prow[col] = 1.0;
        for (std::size_t r = 0; r < m_; ++r) {
            if (r == row) continue;
            const double f = tab_[r][col];
            if (f == 0.0) continue;
            auto& t = tab_[r];
            for (std::size_t j = 0; j <= cols_; ++j) t[j] -= f * prow[j];
            t[col] = 0.0;
        }
        const double f = cost_[col];
        if (f != 0.0) {
            for (std::size_t j = 0; j <= cols_; ++j) cost_[j] -= f * prow[j];
            cost_[col] = 0.0;
        }
        basis_[row] = col;
    }

    std::size_t n_, m_, cols_;
    std::vector<std::vector<double>> tab_;
    std::vector<std::size_t> basis_;
    std::vector<double> cost_;
};

class SimplexBackend final : public FeasibilityBackend {
public:
    std::string name() const override { return "simplex"; }

    SolverOutcome solve(const FeasibilityProblem& problem) override {
        problem.validate();
        const std::size_t n = problem.num_vars;

        // Normalize to a.x <= b and presolve against the box: a constraint
        // whose best case over the bounds cannot reach b is infeasible; one
        // whose worst case already satisfies b is dropped.
        std::vector<LeRow> rows;
        for (const auto& c : problem.constraints) {
            LeRow row;
            row.coeffs.resize(n);
            const double sign = c.rel == Relation::LessEq ? 1.0 : -1.0;
            for (std::size_t t = 0; t < n; ++t) row.coeffs[t] = sign * c.coeffs[t];
            row.rhs = sign * c.rhs;

            double box_min = 0.0;
            double box_max = 0.0;
            for (std::size_t t = 0; t < n; ++t) {
                const double a = row.coeffs[t];
                box_min += a * (a > 0.0 ? problem.lower[t] : problem.upper[t]);
                box_max += a * (a > 0.0 ? problem.upper[t] : problem.lower[t]);
            }
            const double slack = kPhaseOneTol * (1.0 + std::abs(row.rhs));
            if (box_min > row.rhs + slack) return SolverOutcome::infeasible();
            if (box_max <= row.rhs) continue;  // satisfied everywhere in the box
            rows.push_back(std::move(row));
        }

        if (rows.empty()) {
            std::vector<double> mid(n);
            for (std::size_t t = 0; t < n; ++t) mid[t] = 0.5 * (problem.lower[t] + problem.upper[t]);
            return SolverOutcome::witness(std::move(mid));
        }

        // Shift x = y + lower so y >= 0, and fold the upper bounds in as rows.
        for (auto& row : rows) {
            double shift = 0.0;
            for (std::size_t t = 0; t < n; ++t) shift += row.coeffs[t] * problem.lower[t];
            row.rhs -= shift;
        }
        for (std::size_t t = 0; t < n; ++t) {
            LeRow ub;
            ub.coeffs.assign(n, 0.0);
            ub.coeffs[t] = 1.0;
            ub.rhs = problem.upper[t] - problem.lower[t];
            rows.push_back(std::move(ub));
        }

        PhaseOneSimplex simplex(std::move(rows), n);
        if (!simplex.run()) return SolverOutcome::infeasible();

        std::vector<double> x = simplex.y();
        for (std::size_t t = 0; t < n; ++t) x[t] += problem.lower[t];
        return SolverOutcome::witness(std::move(x));
    }
};

struct Registry {
    std::mutex mutex;
    std::map<std::string, BackendFactory> factories;
};

Registry& registry() {
    static Registry instance;
    static std::once_flag init;
    std::call_once(init, [] {
        instance.factories["simplex"] = [] { return std::make_unique<SimplexBackend>(); };
    });
    return instance;
}

}  // namespace

void register_backend(const std::string& name, BackendFactory factory) {
    auto& reg = registry();
    std::lock_guard lock(reg.mutex);
    reg.factories[name] = std::move(factory);
}

std::vector<std::string> registered_backends() {
    auto& reg = registry();
    std::lock_guard lock(reg.mutex);
    std::vector<std::string> names;
    names.reserve(reg.factories.size());
    for (const auto& [name, unused] : reg.factories) names.push_back(name);
    return names;
}

std::string selected_backend_name() {
    const char* env = std::getenv("PLATOON_SOLVER");
    std::string name = env != nullptr && *env != '\0' ? env : "simplex";
    auto& reg = registry();
    std::lock_guard lock(reg.mutex);
    if (reg.factories.find(name) == reg.factories.end()) {
        throw std::invalid_argument("unknown feasibility backend: '" + name + "'");
    }
    return name;
}

SolverOutcome solve_feasibility(const FeasibilityProblem& problem) {
    problem.validate();
    std::unique_ptr<FeasibilityBackend> backend;
    {
        const std::string name = selected_backend_name();
        auto& reg = registry();
        std::lock_guard lock(reg.mutex);
        backend = reg.factories.at(name)();
    }
    SolverOutcome outcome = backend->solve(problem);
    if (outcome.kind == SolverOutcome::Kind::Witness) {
        if (outcome.values.size() != problem.num_vars) {
            throw std::logic_error("backend '" + backend->name() + "' returned a malformed witness");
        }
        const double violation = max_constraint_violation(problem, outcome.values);
        if (violation > 1e-7) {
            throw std::logic_error("backend '" + backend->name() + "' returned an invalid witness (violation " +
                                   std::to_string(violation) + ")");
        }
    }
    return outcome;
}

}  // namespace platoon
