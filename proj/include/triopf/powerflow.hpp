#pragma once

#include <vector>

#include <Eigen/Core>

#include "triopf/network.hpp"

namespace triopf {

struct PfOptions {
    double tolerance = 1e-8;  // infinity norm of the power mismatch, per-unit
    int max_iterations = 50;  // Newton steps per period
    bool flat_start = true;   // start from balanced slack voltages everywhere
};

/// Complex power injections (generation minus load), per-unit, one 3 x N
/// matrix per period; column = bus index, row = phase.
using InjectionSet = std::vector<Eigen::Matrix3Xcd>;

/// Injections with every load negated and nothing else, i.e. the unmodified
/// operating point of the feeder.
InjectionSet injections_from_loads(const Grid& g);

struct PfSolution {
    std::vector<std::vector<PhaseVoltage>> voltages; // [period][bus]
    std::vector<int> iterations;                     // mismatch evaluations per period
    std::vector<double> mismatch_norm;               // final residual per period
    std::vector<std::vector<double>> residual_history; // residual after each evaluation
    bool converged = false;
};

/// Newton-Raphson on rectangular voltage coordinates, power mismatch form.
/// Slack phase voltages stay fixed. Returns best iterate with converged=false
/// rather than throwing when the iteration limit is hit or values blow up.
/// Throws SingularJacobian when the Newton system loses rank,
/// DimensionMismatch when inj does not match the grid.
PfSolution solve_pf(const Grid& g, const InjectionSet& inj, const PfOptions& opts = {});

/// Residual (calculated minus specified injection) at every non-slack
/// bus-phase of one period: active-power block first, then reactive.
/// v holds all 3N complex bus voltages in bus-major order.
Eigen::VectorXd power_mismatch(const Grid& g, const Eigen::VectorXcd& v, const Eigen::Matrix3Xcd& inj_t);

/// Jacobian of power_mismatch w.r.t. the non-slack rectangular voltages,
/// column order: all real parts, then all imaginary parts.
Eigen::MatrixXd pf_jacobian(const Grid& g, const Eigen::VectorXcd& v);

struct BranchFlow {
    std::array<Complex, 3> from; // per-phase complex power entering at from-bus, per-unit
    std::array<Complex, 3> to;   // same at to-bus
};

BranchFlow branch_flow(const BranchData& branch, const Eigen::VectorXcd& v);

/// Stacks a per-bus voltage list into the 3N complex vector used above.
Eigen::VectorXcd stack_voltages(const std::vector<PhaseVoltage>& per_bus);

} // namespace triopf
