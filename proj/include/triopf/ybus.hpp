#pragma once

#include <cmath>

#include "triopf/network.hpp"

namespace triopf {

/// Voltage and power bases for one branch conversion.
struct PerUnitBase {
    double base_mva = 1.0;
    double base_kv = 0.0; // line-to-line, at the branch's voltage level
    double z_base_ohm() const { return base_kv * base_kv / base_mva; }
    /// Current base, kA: per-phase power base over phase voltage base.
    double i_base_ka() const { return base_mva / (std::sqrt(3.0) * base_kv); }
};

/// 3x3 per-unit admittance blocks of one branch.
struct PhaseAdmittance {
    Matrix3c y_series;
    Matrix3c y_shunt_half;
    double rating_pu = 0.0; // per-phase limit; 0 = unrated
};

/// Line or transformer to a per-unit admittance block.
/// Throws SingularImpedance when the phase impedance matrix has condition number > 1e12.
PhaseAdmittance branch_admittance(const Line& line, const PerUnitBase& base);
PhaseAdmittance branch_admittance(const Transformer& tr, const PerUnitBase& base);

/// Transformer series impedance in per-unit from nameplate data
/// (vkr + j sqrt(vk^2 - vkr^2))/100 scaled to the system base; z0 = z1.
SequenceImpedance transformer_sequence_impedance(const Transformer& tr, double base_mva);

/// Stamps every branch block into the dense 3N x 3N matrix.
/// Throws DisconnectedNetwork when some bus is unreachable from the slack.
Eigen::MatrixXcd assemble_ybus(int bus_count, int slack_index, const std::vector<BranchData>& branches);

} // namespace triopf
