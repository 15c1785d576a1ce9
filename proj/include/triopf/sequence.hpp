#pragma once

#include <Eigen/Core>

#include "triopf/errors.hpp"
#include "triopf/types.hpp"

namespace triopf {

using Matrix3c = Eigen::Matrix3cd;

/// Rotation operator a = e^{j2pi/3}.
Complex rotation_operator();

/// Symmetrical-component transformation matrix with rows
/// [1,1,1], [1,a^2,a], [1,a,a^2].
Matrix3c fortescue_matrix();

/// Inverse transformation, (1/3) * [1,1,1; 1,a,a^2; 1,a^2,a].
Matrix3c fortescue_inverse();

/// Zero/positive/negative sequence impedances of a branch, ohm.
/// z2 defaults to z1 (nonrotating equipment).
struct SequenceImpedance {
    Complex z0;
    Complex z1;
    Complex z2;

    SequenceImpedance() = default;
    SequenceImpedance(Complex zero, Complex pos) : z0(zero), z1(pos), z2(pos) {}
    SequenceImpedance(Complex zero, Complex pos, Complex neg) : z0(zero), z1(pos), z2(neg) {}
};

/// Z_abc = A * diag(z0, z1, z2) * A^-1.
Matrix3c sequence_to_phase(const SequenceImpedance& z);

/// Inverse of sequence_to_phase: recovers the diagonal of A^-1 * Z_abc * A.
SequenceImpedance phase_to_sequence(const Matrix3c& z_abc);

/// Zero/positive/negative sequence components of a three-phase set.
std::array<Complex, 3> sequence_components(const PhaseVoltage& v);

/// Voltage unbalance factor |V2| / |V1|.
/// Throws DegenerateSequence when the positive-sequence magnitude is below 1e-9.
double vuf(const PhaseVoltage& v);

/// Balanced slack-bus voltage: magnitude at 0, -120 and +120 degrees.
PhaseVoltage slack_voltage(double magnitude);

} // namespace triopf
