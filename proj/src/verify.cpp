#include "triopf/io.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "triopf/errors.hpp"

namespace triopf {

std::vector<double> replay_deviations(const Grid& grid, const OpfSolution& sol,
                                      const VerifyOptions& opts) {
    const int horizon = grid.horizon();
    const int buses = grid.bus_count();
    if (static_cast<int>(sol.voltages.size()) != horizon ||
        (horizon > 0 && static_cast<int>(sol.voltages.front().size()) != buses))
        throw DimensionMismatch("solution voltages do not match the grid");
    if (sol.pv_p_kw.size() != grid.pv_units().size())
        throw DimensionMismatch("solution dispatch does not match the grid's unit list");

    InjectionSet inj = injections_from_loads(grid);
    for (std::size_t k = 0; k < grid.pv_units().size(); ++k) {
        const int bus = grid.pv_units()[k].bus;
        const Eigen::Matrix3Xd& p = sol.pv_p_kw[k];
        const Eigen::Matrix3Xd& q = sol.pv_q_kvar[k];
        for (int t = 0; t < horizon; ++t)
            for (int ph = 0; ph < 3; ++ph)
                inj[t](ph, bus) += Complex(grid.kw_to_pu(p(ph, t)), grid.kw_to_pu(q(ph, t)));
    }

    const PfSolution pf = solve_pf(grid, inj, opts.pf);
    for (int t = 0; t < horizon; ++t)
        if (pf.mismatch_norm[t] > opts.pf.tolerance)
            throw ReplayDivergence(
                t, fmt::format("power-flow replay stalled in period {} (residual {:.3e})", t,
                               pf.mismatch_norm[t]));

    std::vector<double> samples;
    samples.reserve(static_cast<std::size_t>(horizon) * buses * 3);
    for (int t = 0; t < horizon; ++t)
        for (int n = 0; n < buses; ++n)
            for (int ph = 0; ph < 3; ++ph) {
                const Complex a = sol.voltages[t][n][ph];
                const Complex b = pf.voltages[t][n][ph];
                if (opts.quantity == VerifyQuantity::magnitude) {
                    samples.push_back(std::abs(std::abs(a) - std::abs(b)));
                } else {
                    samples.push_back(std::abs(std::remainder(std::arg(a) - std::arg(b), 2 * kPi)));
                }
            }
    return samples;
}

ErrorReport summarize_deviations(const std::vector<double>& samples, Formulation formulation) {
    ErrorReport report;
    report.formulation = formulation;
    report.count = static_cast<int>(samples.size());
    if (samples.empty()) return report;

    double sum = 0.0, sum_sq = 0.0;
    report.min = samples.front();
    report.max = samples.front();
    for (double d : samples) {
        sum += d;
        sum_sq += d * d;
        report.min = std::min(report.min, d);
        report.max = std::max(report.max, d);
    }
    report.average = sum / report.count;
    report.rmse = std::sqrt(sum_sq / report.count);

    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t half = sorted.size() / 2;
    report.median = sorted.size() % 2 == 1 ? sorted[half] : 0.5 * (sorted[half - 1] + sorted[half]);
    return report;
}

ErrorReport verify_against_pf(const Grid& grid, const OpfSolution& sol, Formulation formulation,
                              const VerifyOptions& opts) {
    return summarize_deviations(replay_deviations(grid, sol, opts), formulation);
}

} // namespace triopf
