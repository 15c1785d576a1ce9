#include "triopf/hosting.hpp"

#include <algorithm>
#include <map>
#include <random>

#include <fmt/format.h>

#include "triopf/errors.hpp"

namespace triopf {

std::string to_string(ConnectionMode m) {
    return m == ConnectionMode::single_phase_random ? "single-phase-random" : "three-phase";
}

NetworkModel assign_phases(NetworkModel net, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    for (auto& unit : net.pv_units)
        unit.connection = static_cast<PvConnection>(gen() % 3);
    return net;
}

int three_phase_constraints(const NetworkModel& net) {
    std::vector<std::string> issues;
    for (std::size_t k = 0; k < net.pv_units.size(); ++k) {
        if (is_single_phase(net.pv_units[k].connection))
            issues.push_back(fmt::format(
                "pv unit {} at bus {} is declared single-phase; the balanced study requires "
                "three-phase units",
                k, net.pv_units[k].bus));
    }
    if (!issues.empty()) throw ValidationError(std::move(issues));
    return 2 * static_cast<int>(net.pv_units.size()) * net.horizon;
}

SolverOptions hosting_solver_defaults() {
    SolverOptions opts;
    opts.tolerance = 1e-8;
    opts.max_iterations = 500;
    return opts;
}

namespace {

std::vector<std::pair<std::string, int>> summarize_binding(const std::vector<std::string>& labels) {
    std::map<std::string, int> counts;
    for (const auto& label : labels)
        ++counts[label.substr(0, label.find(' '))];
    return {counts.begin(), counts.end()};
}

// Installed capacity consistent with a dispatch series: the tightest
// period-wise ratio of unit output to its availability profile.
double implied_capacity_kw(const Eigen::Matrix3Xd& production, const std::vector<double>& profile) {
    double cap = 0.0;
    for (int t = 0; t < production.cols(); ++t) {
        const double avail = t < static_cast<int>(profile.size()) ? profile[t] : 0.0;
        if (avail > 0.0) cap = std::max(cap, production.col(t).sum() / avail);
    }
    return cap;
}

} // namespace

HostingResult run_hosting(const NetworkModel& net, const HostingStudy& study,
                          Formulation formulation, const SolverOptions& solver) {
    NetworkModel model = net;
    if (study.mode == ConnectionMode::single_phase_random)
        model = assign_phases(std::move(model), study.seed);
    else
        three_phase_constraints(model);

    const Grid grid = Grid::prepare(model);
    OpfOptions options;
    options.objective = Objective::hosting;
    options.coupling = study.coupling;
    options.export_cap_kw = study.export_cap_kw;
    options.tie_three_phase = true;
    const OpfProblem prob = build_opf(grid, formulation, options);
    const SolveReport report = solve(prob, solver, prob.initial_point());

    HostingResult res;
    res.mode = study.mode;
    res.formulation = formulation;
    res.coupling = study.coupling;
    res.seed = study.seed;
    res.export_cap_kw = study.export_cap_kw;
    res.status = report.status;
    res.iteration_log = report.log;
    res.opf = extract_solution(prob, report);
    res.objective_kw = grid.pu_to_kw(-res.opf.objective);
    res.node_production_kw = res.opf.pv_p_kw;
    res.aggregate_kw = Eigen::Matrix3Xd::Zero(3, grid.horizon());
    for (const auto& production : res.node_production_kw)
        res.aggregate_kw += production;
    if (study.coupling == Coupling::capacity) {
        res.capacity_kw = res.opf.capacity_kw;
    } else {
        res.capacity_kw.reserve(res.node_production_kw.size());
        for (std::size_t k = 0; k < res.node_production_kw.size(); ++k)
            res.capacity_kw.push_back(
                implied_capacity_kw(res.node_production_kw[k], grid.pv_units()[k].profile));
    }
    res.binding_summary = summarize_binding(res.opf.binding);
    return res;
}

std::pair<HostingResult, HostingResult> compare_modes(const NetworkModel& net, std::uint64_t seed,
                                                      Formulation formulation,
                                                      const HostingStudy& base,
                                                      const SolverOptions& solver) {
    HostingStudy single = base;
    single.mode = ConnectionMode::single_phase_random;
    single.seed = seed;
    HostingStudy three = base;
    three.mode = ConnectionMode::three_phase;
    three.seed = seed;
    return {run_hosting(net, single, formulation, solver),
            run_hosting(net, three, formulation, solver)};
}

} // namespace triopf
