#include "triopf/powerflow.hpp"

#include <cmath>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "triopf/errors.hpp"

namespace triopf {

namespace {

/// Indices of non-slack bus-phase entries in the 3N stacked ordering.
std::vector<int> free_entries(const Grid& g) {
    std::vector<int> idx;
    idx.reserve(3 * (g.bus_count() - 1));
    for (int n = 0; n < g.bus_count(); ++n) {
        if (n == g.slack_index()) continue;
        for (int p = 0; p < 3; ++p) idx.push_back(3 * n + p);
    }
    return idx;
}

Eigen::VectorXcd flat_voltages(const Grid& g) {
    const PhaseVoltage s = slack_voltage(1.0);
    Eigen::VectorXcd v(3 * g.bus_count());
    for (int n = 0; n < g.bus_count(); ++n) {
        for (int p = 0; p < 3; ++p) v(3 * n + p) = s[p];
    }
    const PhaseVoltage sv = g.slack_voltage_pu();
    for (int p = 0; p < 3; ++p) v(3 * g.slack_index() + p) = sv[p];
    return v;
}

} // namespace

InjectionSet injections_from_loads(const Grid& g) {
    InjectionSet inj(g.horizon(), Eigen::Matrix3Xcd::Zero(3, g.bus_count()));
    for (int t = 0; t < g.horizon(); ++t) {
        for (int n = 0; n < g.bus_count(); ++n) {
            for (int p = 0; p < 3; ++p) {
                inj[t](p, n) = -Complex{g.load_p_pu(n, p, t), g.load_q_pu(n, p, t)};
            }
        }
    }
    return inj;
}

Eigen::VectorXd power_mismatch(const Grid& g, const Eigen::VectorXcd& v, const Eigen::Matrix3Xcd& inj_t) {
    if (v.size() != 3 * g.bus_count() || inj_t.cols() != g.bus_count()) {
        throw DimensionMismatch("voltage or injection size does not match the network");
    }
    const Eigen::VectorXcd current = g.ybus() * v;
    const auto idx = free_entries(g);
    Eigen::VectorXd r(2 * idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
        const int e = idx[k];
        const Complex s_calc = v(e) * std::conj(current(e));
        const Complex s_spec = inj_t(e % 3, e / 3);
        r(k) = s_calc.real() - s_spec.real();
        r(idx.size() + k) = s_calc.imag() - s_spec.imag();
    }
    return r;
}

Eigen::MatrixXd pf_jacobian(const Grid& g, const Eigen::VectorXcd& v) {
    const Eigen::MatrixXcd& y = g.ybus();
    const Eigen::VectorXcd current = y * v;
    const auto idx = free_entries(g);
    const int m = static_cast<int>(idx.size());
    Eigen::MatrixXd jac(2 * m, 2 * m);
    for (int r = 0; r < m; ++r) {
        const int e = idx[r];
        const double vre = v(e).real(), vim = v(e).imag();
        const double ire = current(e).real(), iim = current(e).imag();
        for (int c = 0; c < m; ++c) {
            const int f = idx[c];
            const double G = y(e, f).real(), B = y(e, f).imag();
            const double d = e == f ? 1.0 : 0.0;
            jac(r, c) = d * ire + vre * G + vim * B;          // dP/dVre
            jac(r, m + c) = d * iim - vre * B + vim * G;      // dP/dVim
            jac(m + r, c) = -d * iim + vim * G - vre * B;     // dQ/dVre
            jac(m + r, m + c) = d * ire - vim * B - vre * G;  // dQ/dVim
        }
    }
    return jac;
}

PfSolution solve_pf(const Grid& g, const InjectionSet& inj, const PfOptions& opts) {
    if (static_cast<int>(inj.size()) != g.horizon()) {
        throw DimensionMismatch(fmt::format("injection set covers {} periods, network horizon is {}",
                                            inj.size(), g.horizon()));
    }
    if (!(opts.tolerance > 0.0)) throw DimensionMismatch("power flow tolerance must be positive");

    const auto idx = free_entries(g);
    const int m = static_cast<int>(idx.size());

    PfSolution sol;
    sol.converged = true;
    sol.voltages.resize(g.horizon());
    sol.iterations.resize(g.horizon(), 0);
    sol.mismatch_norm.resize(g.horizon(), 0.0);
    sol.residual_history.resize(g.horizon());

    Eigen::VectorXcd v = flat_voltages(g);
    for (int t = 0; t < g.horizon(); ++t) {
        if (opts.flat_start) v = flat_voltages(g);

        Eigen::VectorXd r = power_mismatch(g, v, inj[t]);
        int evals = 1;
        double norm = r.lpNorm<Eigen::Infinity>();
        sol.residual_history[t].push_back(norm);

        Eigen::VectorXcd best_v = v;
        double best_norm = norm;

        bool ok = norm <= opts.tolerance;
        for (int step = 0; !ok && step < opts.max_iterations; ++step) {
            const Eigen::MatrixXd jac = pf_jacobian(g, v);
            Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
            if (!lu.isInvertible()) {
                throw SingularJacobian(fmt::format("power flow Jacobian is singular at period {}", t));
            }
            const Eigen::VectorXd dx = lu.solve(-r);
            for (int k = 0; k < m; ++k) {
                v(idx[k]) += Complex{dx(k), dx(m + k)};
            }
            if (!v.allFinite()) {
                v = best_v;
                ok = false;
                break;
            }
            r = power_mismatch(g, v, inj[t]);
            ++evals;
            norm = r.lpNorm<Eigen::Infinity>();
            if (!std::isfinite(norm)) {
                v = best_v;
                norm = best_norm;
                break;
            }
            sol.residual_history[t].push_back(norm);
            if (norm < best_norm) {
                best_norm = norm;
                best_v = v;
            }
            ok = norm <= opts.tolerance;
        }

        if (!ok) {
            v = best_v;
            norm = best_norm;
            sol.converged = false;
        }
        sol.iterations[t] = evals;
        sol.mismatch_norm[t] = norm;
        sol.voltages[t].resize(g.bus_count());
        for (int n = 0; n < g.bus_count(); ++n) {
            for (int p = 0; p < 3; ++p) sol.voltages[t][n][p] = v(3 * n + p);
        }
    }
    return sol;
}

BranchFlow branch_flow(const BranchData& branch, const Eigen::VectorXcd& v) {
    Eigen::Vector3cd vi, vj;
    for (int p = 0; p < 3; ++p) {
        vi(p) = v(3 * branch.from + p);
        vj(p) = v(3 * branch.to + p);
    }
    const Eigen::Vector3cd i_from = branch.y_series * (vi - vj) + branch.y_shunt_half * vi;
    const Eigen::Vector3cd i_to = branch.y_series * (vj - vi) + branch.y_shunt_half * vj;
    BranchFlow flow;
    for (int p = 0; p < 3; ++p) {
        flow.from[p] = vi(p) * std::conj(i_from(p));
        flow.to[p] = vj(p) * std::conj(i_to(p));
    }
    return flow;
}

Eigen::VectorXcd stack_voltages(const std::vector<PhaseVoltage>& per_bus) {
    Eigen::VectorXcd v(3 * per_bus.size());
    for (std::size_t n = 0; n < per_bus.size(); ++n) {
        for (int p = 0; p < 3; ++p) v(3 * n + p) = per_bus[n][p];
    }
    return v;
}

} // namespace triopf
