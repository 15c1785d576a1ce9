#include <cmath>

#include <fmt/format.h>

#include "triopf/errors.hpp"
#include "triopf/opf.hpp"

namespace triopf {

OpfSolution extract_solution(const OpfProblem& prob, const SolveReport& report) {
    const Grid& g = prob.grid();
    const VariableLayout& lay = prob.layout();
    const Eigen::VectorXd& x = report.x;
    const int horizon = g.horizon();
    const int buses = g.bus_count();
    const int units = static_cast<int>(g.pv_units().size());

    OpfSolution sol;
    sol.status = report.status;
    sol.objective = prob.eval_f(x);
    sol.iterations = report.iterations;
    sol.kkt = kkt_residuals(prob, report.x, report.y_eq, report.z_ineq, report.z_lower,
                            report.z_upper);
    sol.raw = x;

    sol.voltages.assign(horizon, std::vector<PhaseVoltage>(buses));
    sol.vuf.assign(horizon, std::vector<double>(buses, 0.0));
    for (int t = 0; t < horizon; ++t) {
        for (int n = 0; n < buses; ++n) {
            PhaseVoltage v;
            if (n == g.slack_index()) {
                v = g.slack_voltage_pu();
            } else {
                for (int p = 0; p < kPhaseCount; ++p) {
                    v[p] = Complex{x(lay.u_re(t, n, p)), x(lay.u_im(t, n, p))};
                }
            }
            sol.voltages[t][n] = v;
            try {
                sol.vuf[t][n] = vuf(v);
            } catch (const DegenerateSequence&) {
                sol.vuf[t][n] = 0.0;
            }
        }
    }

    sol.pv_p_kw.assign(units, Eigen::Matrix3Xd::Zero(3, horizon));
    sol.pv_q_kvar.assign(units, Eigen::Matrix3Xd::Zero(3, horizon));
    sol.capacity_kw.assign(units, 0.0);
    for (int k = 0; k < units; ++k) {
        for (int t = 0; t < horizon; ++t) {
            for (int p = 0; p < kPhaseCount; ++p) {
                const int ip = lay.pv_p(t, k, p);
                if (ip >= 0) sol.pv_p_kw[k](p, t) = g.pu_to_kw(x(ip));
                const int iq = lay.pv_q(t, k, p);
                if (iq >= 0) sol.pv_q_kvar[k](p, t) = g.pu_to_kw(x(iq));
            }
        }
        const int ic = lay.capacity(k);
        if (ic >= 0) sol.capacity_kw[k] = g.pu_to_kw(x(ic));
    }

    sol.slack_p_kw = Eigen::Matrix3Xd::Zero(3, horizon);
    sol.slack_q_kvar = Eigen::Matrix3Xd::Zero(3, horizon);
    for (int t = 0; t < horizon; ++t) {
        for (int p = 0; p < kPhaseCount; ++p) {
            sol.slack_p_kw(p, t) = g.pu_to_kw(x(lay.slack_p(t, p)));
            sol.slack_q_kvar(p, t) = g.pu_to_kw(x(lay.slack_q(t, p)));
        }
    }

    const double activity_tol = 1e-5;
    const Eigen::VectorXd c_ineq = prob.eval_ineq(x);
    for (int k = 0; k < c_ineq.size(); ++k) {
        if (c_ineq(k) >= -activity_tol) sol.binding.push_back(prob.ineq_info()[k].label());
    }
    const Eigen::VectorXd lo = prob.lower_bounds();
    const Eigen::VectorXd up = prob.upper_bounds();
    for (int i = 0; i < x.size(); ++i) {
        const bool at_lower = std::isfinite(lo(i)) && x(i) - lo(i) <= activity_tol * std::max(1.0, std::abs(lo(i)));
        const bool at_upper = std::isfinite(up(i)) && up(i) - x(i) <= activity_tol * std::max(1.0, std::abs(up(i)));
        if (at_lower || at_upper) {
            sol.binding.push_back(fmt::format("bound {}", lay.describe(i)));
        }
    }
    return sol;
}

} // namespace triopf
