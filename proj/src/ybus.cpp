#include "triopf/ybus.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <fmt/format.h>

namespace triopf {

namespace {

Matrix3c invert_checked(const Matrix3c& z, const std::string& what) {
    Eigen::JacobiSVD<Matrix3c> svd(z);
    const auto& sv = svd.singularValues();
    if (sv(2) <= 0.0 || sv(0) / sv(2) > 1e12) {
        throw SingularImpedance(what + ": phase impedance matrix is numerically singular");
    }
    return z.inverse();
}

} // namespace

SequenceImpedance transformer_sequence_impedance(const Transformer& tr, double base_mva) {
    const double vk = tr.vk_percent;
    const double vkr = tr.vkr_percent;
    const double scale = base_mva / tr.s_rated_mva;
    const Complex z1{vkr / 100.0 * scale, std::sqrt(vk * vk - vkr * vkr) / 100.0 * scale};
    return {z1, z1}; // zero-sequence defaults to z1; no vector-group shift modelled
}

PhaseAdmittance branch_admittance(const Line& line, const PerUnitBase& base) {
    const double zb = base.z_base_ohm();
    const Complex z1{line.r1_ohm_per_km * line.length_km / zb, line.x1_ohm_per_km * line.length_km / zb};
    const Complex z0{line.r0_ohm_per_km * line.length_km / zb, line.x0_ohm_per_km * line.length_km / zb};
    const Matrix3c z_abc = sequence_to_phase({z0, z1});

    PhaseAdmittance out;
    out.y_series = invert_checked(z_abc, "line");
    out.y_shunt_half = Matrix3c::Zero();
    if (line.b_us_per_km != 0.0) {
        // susceptance in microsiemens/km; per-unit b = b_S * z_base; half at each end
        const double b_pu = line.b_us_per_km * 1e-6 * line.length_km * zb;
        out.y_shunt_half = Complex{0.0, b_pu / 2.0} * Matrix3c::Identity();
    }
    out.rating_pu = line.s_max_pu ? *line.s_max_pu
                                  : std::sqrt(3.0) * base.base_kv * line.max_i_ka / base.base_mva;
    return out;
}

PhaseAdmittance branch_admittance(const Transformer& tr, const PerUnitBase& base) {
    const Matrix3c z_abc = sequence_to_phase(transformer_sequence_impedance(tr, base.base_mva));
    PhaseAdmittance out;
    out.y_series = invert_checked(z_abc, "transformer");
    out.y_shunt_half = Matrix3c::Zero();
    out.rating_pu = tr.s_rated_mva / base.base_mva;
    return out;
}

Eigen::MatrixXcd assemble_ybus(int bus_count, int slack_index, const std::vector<BranchData>& branches) {
    Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(3 * bus_count, 3 * bus_count);
    for (const auto& b : branches) {
        const int i = 3 * b.from;
        const int j = 3 * b.to;
        y.block<3, 3>(i, i) += b.y_series + b.y_shunt_half;
        y.block<3, 3>(j, j) += b.y_series + b.y_shunt_half;
        y.block<3, 3>(i, j) -= b.y_series;
        y.block<3, 3>(j, i) -= b.y_series;
    }

    // connectivity from the slack
    std::vector<char> seen(bus_count, 0);
    std::vector<int> stack{slack_index};
    seen[slack_index] = 1;
    while (!stack.empty()) {
        const int n = stack.back();
        stack.pop_back();
        for (const auto& b : branches) {
            const int other = b.from == n ? b.to : (b.to == n ? b.from : -1);
            if (other >= 0 && !seen[other]) {
                seen[other] = 1;
                stack.push_back(other);
            }
        }
    }
    for (int n = 0; n < bus_count; ++n) {
        if (!seen[n]) {
            throw DisconnectedNetwork(fmt::format("bus index {} is not connected to the slack bus", n));
        }
    }
    return y;
}

} // namespace triopf
