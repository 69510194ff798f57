#include "platoon/dynamics.hpp"

#include <cmath>
#include <stdexcept>

#include "platoon/errors.hpp"

namespace platoon {

std::string to_string(Discretization method) {
    return method == Discretization::Zoh ? "zoh" : "euler";
}

Discretization discretization_from_string(const std::string& name) {
    if (name == "zoh") return Discretization::Zoh;
    if (name == "euler") return Discretization::Euler;
    throw std::invalid_argument("unknown discretization: '" + name + "' (expected zoh or euler)");
}

bool VehicleState::finite() const {
    return std::isfinite(s) && std::isfinite(v) && std::isfinite(a);
}

std::pair<Mat3, Vec3> discretize(double tau, double ts, Discretization method) {
    if (!(tau > 0.0)) throw std::invalid_argument("discretize: tau must be > 0");
    if (!(ts > 0.0)) throw std::invalid_argument("discretize: ts must be > 0");

    Mat3 a{};
    Vec3 b{};
    if (method == Discretization::Euler) {
        a = {{{1.0, ts, 0.0}, {0.0, 1.0, ts}, {0.0, 0.0, 1.0 - ts / tau}}};
        b = {0.0, 0.0, ts / tau};
    } else {
        // Exact zero-order hold of  Ac = [[0,1,0],[0,0,1],[0,0,-1/tau]],
        // Bc = [0,0,1/tau]: the acceleration channel decays with e^{-ts/tau}
        // and the upper entries are its first and second integrals.
        const double decay = std::exp(-ts / tau);
        a = {{{1.0, ts, tau * ts + tau * tau * (decay - 1.0)},
              {0.0, 1.0, tau * (1.0 - decay)},
              {0.0, 0.0, decay}}};
        b = {ts * ts / 2.0 - tau * ts + tau * tau * (1.0 - decay),
             ts - tau * (1.0 - decay),
             1.0 - decay};
    }
    return {a, b};
}

VehicleDynamicsSpec VehicleDynamicsSpec::make(double tau, double ts, const Vec3& gain, double spacing,
                                              double v_init, Discretization method) {
    if (!(spacing > 0.0)) throw std::invalid_argument("dynamics: spacing must be > 0");
    auto [a, b] = discretize(tau, ts, method);
    VehicleDynamicsSpec spec;
    spec.tau = tau;
    spec.ts = ts;
    spec.A = a;
    spec.B = b;
    spec.gain = gain;
    spec.spacing = spacing;
    spec.v_init = v_init;
    return spec;
}

VehicleDynamicsSpec VehicleDynamicsSpec::with_matrices(double tau, double ts, const Mat3& A, const Vec3& B,
                                                       const Vec3& gain, double spacing, double v_init) {
    if (!(tau > 0.0)) throw std::invalid_argument("dynamics: tau must be > 0");
    if (!(ts > 0.0)) throw std::invalid_argument("dynamics: ts must be > 0");
    if (!(spacing > 0.0)) throw std::invalid_argument("dynamics: spacing must be > 0");
    VehicleDynamicsSpec spec;
    spec.tau = tau;
    spec.ts = ts;
    spec.A = A;
    spec.B = B;
    spec.gain = gain;
    spec.spacing = spacing;
    spec.v_init = v_init;
    return spec;
}

double desired_offset(int i, int j, double spacing) {
    return -static_cast<double>(i - j) * spacing;
}

double control_input(int i, std::span<const VehicleState> states, const PlatoonTopology& topology,
                     const VehicleDynamicsSpec& spec, const std::map<int, VehicleState>& falsified) {
    if (i < 1 || i > topology.follower_count()) {
        throw std::invalid_argument("control_input: vehicle index " + std::to_string(i) +
                                    " is not a follower");
    }
    for (const auto& [j, unused] : falsified) {
        if (!topology.receives_from(i, j)) {
            throw std::invalid_argument("control_input: falsified state for vehicle " + std::to_string(j) +
                                        " which is not a neighbour of " + std::to_string(i));
        }
    }
    if (static_cast<std::size_t>(i) >= states.size()) {
        throw std::logic_error("control_input: missing state for vehicle " + std::to_string(i));
    }
    const VehicleState& self = states[static_cast<std::size_t>(i)];

    double u = 0.0;
    for (int j : topology.neighbors(i)) {
        if (static_cast<std::size_t>(j) >= states.size()) {
            throw std::logic_error("control_input: missing state for neighbour " + std::to_string(j));
        }
        const auto it = falsified.find(j);
        const VehicleState& other = it != falsified.end() ? it->second : states[static_cast<std::size_t>(j)];
        const double ds = self.s - other.s - desired_offset(i, j, spec.spacing);
        const double dv = self.v - other.v;
        const double da = self.a - other.a;
        u -= spec.gain[0] * ds + spec.gain[1] * dv + spec.gain[2] * da;
    }
    return u;
}

VehicleState apply_attack(const VehicleState& x, const AttackSurface& gamma, double delta) {
    VehicleState out = x;
    if (gamma.gamma[0]) out.s += delta;
    if (gamma.gamma[1]) out.v += delta;
    if (gamma.gamma[2]) out.a += delta;
    return out;
}

VehicleState step(const VehicleState& x, double u, const VehicleDynamicsSpec& spec) {
    const Mat3& a = spec.A;
    const Vec3& b = spec.B;
    VehicleState next{
        a[0][0] * x.s + a[0][1] * x.v + a[0][2] * x.a + b[0] * u,
        a[1][0] * x.s + a[1][1] * x.v + a[1][2] * x.a + b[1] * u,
        a[2][0] * x.s + a[2][1] * x.v + a[2][2] * x.a + b[2] * u,
    };
    if (!next.finite()) {
        throw NumericError("step: non-finite state (divergent closed loop)");
    }
    return next;
}

}  // namespace platoon
