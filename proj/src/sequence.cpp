#include "triopf/sequence.hpp"

#include <cmath>

namespace triopf {

Complex rotation_operator() {
    return {std::cos(2.0 * kPi / 3.0), std::sin(2.0 * kPi / 3.0)};
}

Matrix3c fortescue_matrix() {
    const Complex one{1.0, 0.0};
    const Complex a = rotation_operator();
    const Complex a2 = a * a;
    Matrix3c m;
    m << one, one, one,
         one, a2,  a,
         one, a,   a2;
    return m;
}

Matrix3c fortescue_inverse() {
    const Complex one{1.0, 0.0};
    const Complex a = rotation_operator();
    const Complex a2 = a * a;
    Matrix3c m;
    m << one, one, one,
         one, a,   a2,
         one, a2,  a;
    return m / 3.0;
}

Matrix3c sequence_to_phase(const SequenceImpedance& z) {
    Matrix3c d = Matrix3c::Zero();
    d(0, 0) = z.z0;
    d(1, 1) = z.z1;
    d(2, 2) = z.z2;
    return fortescue_matrix() * d * fortescue_inverse();
}

SequenceImpedance phase_to_sequence(const Matrix3c& z_abc) {
    const Matrix3c d = fortescue_inverse() * z_abc * fortescue_matrix();
    return {d(0, 0), d(1, 1), d(2, 2)};
}

std::array<Complex, 3> sequence_components(const PhaseVoltage& v) {
    const Complex a = rotation_operator();
    const Complex a2 = a * a;
    return {
        (v[0] + v[1] + v[2]) / 3.0,
        (v[0] + a * v[1] + a2 * v[2]) / 3.0,
        (v[0] + a2 * v[1] + a * v[2]) / 3.0,
    };
}

double vuf(const PhaseVoltage& v) {
    const auto seq = sequence_components(v);
    const double pos = std::abs(seq[1]);
    if (pos < 1e-9) {
        throw DegenerateSequence("positive-sequence magnitude below 1e-9, unbalance factor undefined");
    }
    return std::abs(seq[2]) / pos;
}

PhaseVoltage slack_voltage(double magnitude) {
    const double ang = 2.0 * kPi / 3.0;
    return {
        Complex{magnitude, 0.0},
        magnitude * Complex{std::cos(-ang), std::sin(-ang)},
        magnitude * Complex{std::cos(ang), std::sin(ang)},
    };
}

} // namespace triopf
