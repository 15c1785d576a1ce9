#include "triopf/io.hpp"

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "triopf/errors.hpp"

namespace triopf {
namespace {

using ordered_json = nlohmann::ordered_json;

void emit(const ordered_json& doc, const RunConfig& cfg) {
    const std::string text = doc.dump(2) + "\n";
    if (cfg.output_path.empty())
        std::cout << text;
    else
        write_text_file(cfg.output_path, text);
}

/// Replaces every unit's availability profile with one CSV column
/// ("value" when present, the first otherwise).
void apply_series_override(NetworkModel& net, const std::string& path) {
    if (path.empty()) return;
    const CsvSeries series = load_series_csv(path);
    std::size_t col = 0;
    for (std::size_t i = 0; i < series.columns.size(); ++i)
        if (series.columns[i] == "value") col = i;
    const std::vector<double>& values = series.values[col];
    if (static_cast<int>(values.size()) != net.horizon)
        throw SchemaError(path, fmt::format("expected {} rows to cover the horizon, got {}",
                                            net.horizon, values.size()));
    for (PvUnit& pv : net.pv_units) pv.profile = values;
}

Eigen::Matrix3Xd aggregate_production(const OpfSolution& sol, int horizon) {
    Eigen::Matrix3Xd total = Eigen::Matrix3Xd::Zero(3, horizon);
    for (const Eigen::Matrix3Xd& unit : sol.pv_p_kw) total += unit;
    return total;
}

int status_exit(SolveStatus status) {
    std::cerr << fmt::format("status: {}\n", to_string(status));
    return status == SolveStatus::optimal ? 0 : 1;
}

int run_validate(const RunConfig& cfg) {
    ordered_json doc = result_shell(cfg);
    std::vector<std::string> issues;
    try {
        issues = validate(load_network(cfg.network_path));
    } catch (const SchemaError& e) {
        doc["status"] = "schema-error";
        doc["issues"] = std::vector<std::string>{e.what()};
        emit(doc, cfg);
        throw;
    }
    doc["status"] = issues.empty() ? "valid" : "invalid";
    doc["issues"] = issues;
    emit(doc, cfg);
    for (const std::string& issue : issues) std::cerr << fmt::format("invalid: {}\n", issue);
    std::cerr << fmt::format("status: {}\n", issues.empty() ? "valid" : "invalid");
    return issues.empty() ? 0 : 2;
}

int run_pf(const RunConfig& cfg) {
    const NetworkModel net = load_network(cfg.network_path);
    const Grid grid = Grid::prepare(net);
    PfOptions opts;
    opts.tolerance = cfg.solver.tolerance;
    opts.max_iterations = cfg.solver.max_iterations;
    const PfSolution sol = solve_pf(grid, injections_from_loads(grid), opts);
    emit(pf_result_json(sol, cfg), cfg);
    std::cerr << fmt::format("status: {}\n", sol.converged ? "converged" : "diverged");
    return sol.converged ? 0 : 1;
}

int run_opf(const RunConfig& cfg) {
    NetworkModel net = load_network(cfg.network_path);
    apply_series_override(net, cfg.series_path);
    const Grid grid = Grid::prepare(net);
    OpfOptions opts;
    opts.objective = cfg.objective;
    opts.coupling = cfg.study.coupling;
    opts.export_cap_kw = cfg.study.export_cap_kw;
    const OpfProblem prob = build_opf(grid, cfg.formulation, opts);
    const SolveReport report = solve(prob, cfg.solver, prob.initial_point());
    const OpfSolution sol = extract_solution(prob, report);
    if (!cfg.iteration_log_path.empty()) write_iteration_log_csv(report.log, cfg.iteration_log_path);
    emit(opf_result_json(sol, cfg.formulation, cfg), cfg);
    if (!cfg.production_path.empty())
        write_production_csv(aggregate_production(sol, grid.horizon()), cfg.production_path);
    return status_exit(sol.status);
}

int run_hosting(const RunConfig& cfg) {
    NetworkModel net = load_network(cfg.network_path);
    apply_series_override(net, cfg.series_path);
    const HostingResult result = run_hosting(net, cfg.study, cfg.formulation, cfg.solver);
    if (!cfg.iteration_log_path.empty())
        write_iteration_log_csv(result.iteration_log, cfg.iteration_log_path);
    emit(hosting_result_json(result, cfg), cfg);
    if (!cfg.production_path.empty()) write_production_csv(result.aggregate_kw, cfg.production_path);
    return status_exit(result.status);
}

int run_verify(const RunConfig& cfg) {
    NetworkModel net = load_network(cfg.network_path);
    apply_series_override(net, cfg.series_path);
    const HostingResult result = run_hosting(net, cfg.study, cfg.formulation, cfg.solver);
    // The replay needs the exact network the study solved, including the
    // seeded phase assignment.
    const NetworkModel solved = cfg.study.mode == ConnectionMode::single_phase_random
                                    ? assign_phases(net, cfg.study.seed)
                                    : net;
    const Grid grid = Grid::prepare(solved);
    ordered_json doc = hosting_result_json(result, cfg);
    const ErrorReport report = verify_against_pf(grid, result.opf, cfg.formulation);
    doc["error_report"] = error_report_json(report);
    if (cfg.compare_angles) {
        VerifyOptions opts;
        opts.quantity = VerifyQuantity::angle;
        doc["angle_report"] = error_report_json(verify_against_pf(grid, result.opf, cfg.formulation, opts));
    }
    emit(doc, cfg);
    std::cerr << fmt::format("replay rmse: {}\n", report.rmse);
    return status_exit(result.status);
}

int dispatch(const RunConfig& cfg) {
    const std::vector<std::string> missing = missing_inputs(cfg);
    if (!missing.empty()) {
        for (const std::string& line : missing) std::cerr << fmt::format("input error: {}\n", line);
        return 2;
    }
    try {
        if (cfg.command == "validate") return run_validate(cfg);
        if (cfg.command == "pf") return run_pf(cfg);
        if (cfg.command == "opf") return run_opf(cfg);
        if (cfg.command == "hosting") return run_hosting(cfg);
        if (cfg.command == "verify") return run_verify(cfg);
        std::cerr << fmt::format("unknown command: {}\n", cfg.command);
        return 2;
    } catch (const SingularJacobian& e) {
        std::cerr << fmt::format("solver error: {}\n", e.what());
        return 1;
    } catch (const ReplayDivergence& e) {
        std::cerr << fmt::format("verification error: {}\n", e.what());
        return 1;
    } catch (const ValidationError& e) {
        for (const std::string& issue : e.issues) std::cerr << fmt::format("invalid: {}\n", issue);
        return 2;
    } catch (const Error& e) {
        std::cerr << fmt::format("input error: {}\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::cerr << fmt::format("error: {}\n", e.what());
        return 2;
    }
}

} // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"Three-phase distribution feeder studies: power flow, optimal dispatch, "
                 "hosting capacity, and solution verification."};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);
    app.set_version_flag("--version", kToolVersion);

    const std::map<std::string, Formulation> formulations{
        {"power-voltage", Formulation::power_voltage},
        {"current-voltage", Formulation::current_voltage}};
    const std::map<std::string, Objective> objectives{{"hosting", Objective::hosting},
                                                      {"losses", Objective::losses},
                                                      {"feasibility", Objective::feasibility}};
    const std::map<std::string, Coupling> couplings{{"dispatch", Coupling::dispatch},
                                                    {"capacity", Coupling::capacity}};
    const std::map<std::string, ConnectionMode> modes{
        {"single", ConnectionMode::single_phase_random}, {"three", ConnectionMode::three_phase}};

    RunConfig cfg;
    double export_cap = 0.0;
    CLI::Option* export_cap_opt = nullptr;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("network", cfg.network_path, "Network description (JSON)")->required();
        cmd->add_option("--out", cfg.output_path, "Result document path (default: stdout)");
        cmd->add_option("--tol", cfg.solver.tolerance, "Convergence tolerance");
        cmd->add_option("--max-iter", cfg.solver.max_iterations, "Iteration limit");
    };
    const auto add_solver = [&](CLI::App* cmd) {
        cmd->add_option("--mu0", cfg.solver.mu0, "Initial barrier parameter");
        cmd->add_option("--log-iterations", cfg.iteration_log_path, "Write per-iteration CSV here");
        cmd->add_option("--formulation", cfg.formulation, "Optimization formulation")
            ->transform(CLI::CheckedTransformer(formulations));
        cmd->add_option("--coupling", cfg.study.coupling, "Dispatch coupling across periods")
            ->transform(CLI::CheckedTransformer(couplings));
        export_cap_opt = cmd->add_option("--export-cap-kw", export_cap,
                                         "Per-phase feed-in limit for every unit (kW)");
        cmd->add_option("--series", cfg.series_path,
                        "CSV overriding every unit's availability profile");
        cmd->add_option("--production", cfg.production_path,
                        "Write aggregate per-phase production CSV here");
    };
    const auto add_scenario = [&](CLI::App* cmd) {
        cmd->add_option("--mode", cfg.study.mode, "Unit connection scheme")
            ->transform(CLI::CheckedTransformer(modes));
        cmd->add_option("--seed", cfg.study.seed, "Phase-assignment seed");
    };

    CLI::App* validate_cmd = app.add_subcommand("validate", "Check a network file");
    validate_cmd->add_option("network", cfg.network_path, "Network description (JSON)")->required();
    validate_cmd->add_option("--out", cfg.output_path, "Result document path (default: stdout)");

    CLI::App* pf_cmd = app.add_subcommand("pf", "Solve the power flow at the declared loads");
    add_common(pf_cmd);

    CLI::App* opf_cmd = app.add_subcommand("opf", "Solve one optimal dispatch problem");
    add_common(opf_cmd);
    add_solver(opf_cmd);
    opf_cmd->add_option("--objective", cfg.objective, "Optimization objective")
        ->transform(CLI::CheckedTransformer(objectives));

    CLI::App* hosting_cmd = app.add_subcommand("hosting", "Maximize feeder hosting capacity");
    add_common(hosting_cmd);
    add_solver(hosting_cmd);
    add_scenario(hosting_cmd);

    CLI::App* verify_cmd =
        app.add_subcommand("verify", "Run a hosting study and replay it through the power flow");
    add_common(verify_cmd);
    add_solver(verify_cmd);
    add_scenario(verify_cmd);
    verify_cmd->add_flag("--angles", cfg.compare_angles, "Also report angle deviations");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    for (CLI::App* cmd : {validate_cmd, pf_cmd, opf_cmd, hosting_cmd, verify_cmd})
        if (cmd->parsed()) cfg.command = cmd->get_name();
    if (export_cap_opt != nullptr && export_cap_opt->count() > 0)
        cfg.study.export_cap_kw = export_cap;
    return dispatch(cfg);
}

int cli_main(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("triopf");
    for (const std::string& arg : args) argv.push_back(arg.c_str());
    return cli_main(static_cast<int>(argv.size()), argv.data());
}

} // namespace triopf
