#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "triopf/opf.hpp"

namespace triopf {

enum class ConnectionMode { single_phase_random, three_phase };

std::string to_string(ConnectionMode m);

/// One hosting-capacity study configuration. The seed is echoed into the
/// result so any run can be reproduced bit for bit.
struct HostingStudy {
    ConnectionMode mode = ConnectionMode::three_phase;
    std::uint64_t seed = 0;
    std::optional<double> export_cap_kw; // per-phase feed-in limit
    Coupling coupling = Coupling::capacity;
};

/// Re-pins every PV unit to one uniformly random phase. Deterministic under
/// a fixed seed; assignments are independent across units.
NetworkModel assign_phases(NetworkModel net, std::uint64_t seed);

/// Checks that every unit is declared three-phase (throws ValidationError
/// otherwise) and returns the number of per-phase balance equalities a
/// dispatch-coupled study imposes: two per unit and period. Capacity
/// coupling shares one installed-capacity variable across the phases
/// instead, which balances them by construction.
int three_phase_constraints(const NetworkModel& net);

struct HostingResult {
    ConnectionMode mode = ConnectionMode::three_phase;
    Formulation formulation = Formulation::power_voltage;
    Coupling coupling = Coupling::capacity;
    std::uint64_t seed = 0;
    std::optional<double> export_cap_kw;
    SolveStatus status = SolveStatus::numerical_failure;
    double objective_kw = 0.0;                        // total dispatched power over the horizon
    std::vector<double> capacity_kw;                  // installed (or implied) capacity per unit
    std::vector<Eigen::Matrix3Xd> node_production_kw; // [unit](phase, period)
    Eigen::Matrix3Xd aggregate_kw;                    // (phase, period), sum over units
    std::vector<std::pair<std::string, int>> binding_summary; // constraint family -> active rows
    std::vector<IterationRecord> iteration_log;
    OpfSolution opf; // full solution detail (voltages, raw vector, labels)
};

SolverOptions hosting_solver_defaults();

HostingResult run_hosting(const NetworkModel& net, const HostingStudy& study,
                          Formulation formulation,
                          const SolverOptions& solver = hosting_solver_defaults());

/// Runs the single-phase and three-phase studies on the same network and
/// seed. Returns {single, three}.
std::pair<HostingResult, HostingResult> compare_modes(
    const NetworkModel& net, std::uint64_t seed, Formulation formulation,
    const HostingStudy& base = {}, const SolverOptions& solver = hosting_solver_defaults());

} // namespace triopf
