#include "triopf/io.hpp"

#include <filesystem>

#include <fmt/format.h>

namespace triopf {
namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json optional_json(const std::optional<double>& v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json kkt_json(const KktResiduals& kkt) {
    return {{"stationarity", kkt.stationarity},
            {"feasibility", kkt.feasibility},
            {"complementarity", kkt.complementarity}};
}

ordered_json phase_major_json(const Eigen::Matrix3Xd& m) {
    ordered_json rows = ordered_json::array();
    for (int p = 0; p < 3; ++p) {
        ordered_json row = ordered_json::array();
        for (int t = 0; t < m.cols(); ++t) row.push_back(m(p, t));
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

nlohmann::ordered_json result_shell(const RunConfig& cfg) {
    ordered_json doc;
    doc["versions"] = {{"triopf", kToolVersion}, {"network_format", kNetworkFormatVersion}};
    doc["command"] = cfg.command;
    doc["config"] = config_json(cfg);
    doc["config_hash"] = config_hash(cfg);
    doc["seed"] = cfg.study.seed;
    return doc;
}

std::vector<std::string> missing_inputs(const RunConfig& cfg) {
    std::vector<std::string> missing;
    const auto check = [&missing](const std::string& path, const char* what) {
        if (!path.empty() && !std::filesystem::exists(path))
            missing.push_back(fmt::format("{} file not found: {}", what, path));
    };
    check(cfg.network_path, "network");
    check(cfg.series_path, "series");
    return missing;
}

nlohmann::ordered_json config_json(const RunConfig& cfg) {
    ordered_json j;
    j["command"] = cfg.command;
    j["network"] = cfg.network_path;
    j["series"] = cfg.series_path.empty() ? ordered_json(nullptr) : ordered_json(cfg.series_path);
    j["formulation"] = to_string(cfg.formulation);
    j["objective"] = to_string(cfg.objective);
    j["scenario"] = {{"mode", to_string(cfg.study.mode)},
                     {"seed", cfg.study.seed},
                     {"coupling", to_string(cfg.study.coupling)},
                     {"export_cap_kw", optional_json(cfg.study.export_cap_kw)}};
    j["solver"] = {{"tolerance", cfg.solver.tolerance},
                   {"max_iterations", cfg.solver.max_iterations},
                   {"mu0", cfg.solver.mu0},
                   {"mu_reduction", cfg.solver.mu_reduction},
                   {"tau", cfg.solver.tau},
                   {"reg_floor", cfg.solver.reg_floor}};
    j["compare_angles"] = cfg.compare_angles;
    return j;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    return hash;
}

std::string config_hash(const RunConfig& cfg) {
    return fmt::format("{:016x}", fnv1a64(config_json(cfg).dump()));
}

nlohmann::ordered_json error_report_json(const ErrorReport& report) {
    return {{"max", report.max},         {"min", report.min},   {"average", report.average},
            {"median", report.median},   {"rmse", report.rmse}, {"count", report.count},
            {"formulation", to_string(report.formulation)}};
}

nlohmann::ordered_json opf_result_json(const OpfSolution& sol, Formulation formulation,
                                       const RunConfig& cfg) {
    ordered_json doc = result_shell(cfg);
    doc["status"] = to_string(sol.status);
    doc["formulation"] = to_string(formulation);
    doc["objective"] = sol.objective;
    doc["iterations"] = sol.iterations;
    doc["kkt"] = kkt_json(sol.kkt);
    doc["capacity_kw"] = sol.capacity_kw;
    doc["binding"] = sol.binding;
    return doc;
}

nlohmann::ordered_json hosting_result_json(const HostingResult& result, const RunConfig& cfg) {
    ordered_json doc = result_shell(cfg);
    doc["status"] = to_string(result.status);
    doc["mode"] = to_string(result.mode);
    doc["formulation"] = to_string(result.formulation);
    doc["coupling"] = to_string(result.coupling);
    doc["export_cap_kw"] = optional_json(result.export_cap_kw);
    doc["objective_kw"] = result.objective_kw;
    doc["iterations"] = static_cast<int>(result.iteration_log.size());
    doc["kkt"] = kkt_json(result.opf.kkt);
    doc["capacity_kw"] = result.capacity_kw;
    doc["aggregate_kw"] = phase_major_json(result.aggregate_kw);
    ordered_json families = ordered_json::object();
    for (const auto& [family, active] : result.binding_summary) families[family] = active;
    doc["binding_summary"] = std::move(families);
    return doc;
}

nlohmann::ordered_json pf_result_json(const PfSolution& sol, const RunConfig& cfg) {
    ordered_json doc = result_shell(cfg);
    doc["status"] = sol.converged ? "converged" : "diverged";
    doc["iterations"] = sol.iterations;
    doc["mismatch_norm"] = sol.mismatch_norm;
    return doc;
}

void write_iteration_log_csv(const std::vector<IterationRecord>& log, const std::string& path) {
    std::string out = "iter,mu,f,stationarity,feasibility,complementarity,step_primal,step_dual,"
                      "min_slack,min_bound_gap,regularization\n";
    for (const IterationRecord& rec : log)
        out += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", rec.iter, rec.mu, rec.f,
                           rec.stationarity, rec.feasibility, rec.complementarity, rec.step_primal,
                           rec.step_dual, rec.min_slack, rec.min_bound_gap, rec.regularization);
    write_text_file(path, out);
}

void write_production_csv(const Eigen::Matrix3Xd& aggregate_kw, const std::string& path) {
    std::string out = "period,phase,kw\n";
    for (int t = 0; t < aggregate_kw.cols(); ++t)
        for (int p = 0; p < 3; ++p)
            out += fmt::format("{},{},{}\n", t, phase_name(p), aggregate_kw(p, t));
    write_text_file(path, out);
}

} // namespace triopf
