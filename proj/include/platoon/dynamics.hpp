#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <utility>

#include "platoon/topology.hpp"

namespace platoon {

using Mat3 = std::array<std::array<double, 3>, 3>;
using Vec3 = std::array<double, 3>;

enum class Discretization { Zoh, Euler };

std::string to_string(Discretization method);
Discretization discretization_from_string(const std::string& name);

/// Longitudinal state [position (m), velocity (m/s), acceleration (m/s^2)].
struct VehicleState {
    double s = 0.0;
    double v = 0.0;
    double a = 0.0;

    bool finite() const;
    bool operator==(const VehicleState&) const = default;
};

/// Binary selector of which broadcast channels carry false data.
struct AttackSurface {
    std::array<bool, 3> gamma{false, false, false};

    bool any() const { return gamma[0] || gamma[1] || gamma[2]; }
};

/// Homogeneous vehicle model: discrete transition matrices, gain, spacing.
struct VehicleDynamicsSpec {
    double tau = 0.5;     // inertial delay of the longitudinal dynamics [s]
    double ts = 0.1;      // sampling period [s]
    Mat3 A{};             // discrete state matrix
    Vec3 B{};             // discrete input matrix
    Vec3 gain{};          // controller gain [k1, k2, k3]
    double spacing = 0.0; // desired inter-vehicle spacing incl. vehicle length [m]
    double v_init = 0.0;  // initial common velocity [m/s]

    /// Generate A, B from tau/ts with the selected discretization.
    static VehicleDynamicsSpec make(double tau, double ts, const Vec3& gain, double spacing,
                                    double v_init, Discretization method = Discretization::Zoh);

    /// Adopt user-supplied discrete matrices as-is.
    static VehicleDynamicsSpec with_matrices(double tau, double ts, const Mat3& A, const Vec3& B,
                                             const Vec3& gain, double spacing, double v_init);
};

/// Discrete-time (A, B) for the third-order longitudinal model.
/// Euler: A = I + Ac*ts, B = Bc*ts. Zoh: exact zero-order hold in closed form.
std::pair<Mat3, Vec3> discretize(double tau, double ts, Discretization method);

/// Signed desired offset between vehicles i and j: -(i-j)*spacing, so that the
/// distributed control law is exactly zero at the equilibrium configuration.
double desired_offset(int i, int j, double spacing);

/// Distributed control input of follower i from neighbour broadcast states.
/// Entries of `falsified` override the corresponding neighbour's true state.
double control_input(int i, std::span<const VehicleState> states, const PlatoonTopology& topology,
                     const VehicleDynamicsSpec& spec,
                     const std::map<int, VehicleState>& falsified = {});

/// Additive falsification of the flagged channels; the input is not mutated.
VehicleState apply_attack(const VehicleState& x, const AttackSurface& gamma, double delta);

/// One discrete step x' = A x + B u. Throws NumericError on non-finite result.
VehicleState step(const VehicleState& x, double u, const VehicleDynamicsSpec& spec);

}  // namespace platoon
