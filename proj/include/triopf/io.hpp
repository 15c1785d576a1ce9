#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "triopf/hosting.hpp"
#include "triopf/network.hpp"
#include "triopf/opf.hpp"
#include "triopf/powerflow.hpp"

namespace triopf {

inline constexpr int kNetworkFormatVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Network files.
//
// JSON schema (format_version 1): keys mirror the NetworkModel member names.
// Demand series accept a scalar (all phases and periods), a [3] array
// (per phase, constant over time), or a [3][T] array. PV availability
// profiles accept an inline [T] array or {"csv": relative-path, "column":
// name}; CSV paths resolve relative to the network file. See data/FORMAT.md.
// ---------------------------------------------------------------------------

/// Parses and shape-checks a network file. Throws SchemaError with a JSON
/// pointer to the offending element; semantic validation beyond the schema
/// is validate() / Grid::prepare territory.
NetworkModel load_network(const std::string& path);

/// Writes the canonical form: every series inlined, optional fields present
/// as null. load_network(save_network(net)) reproduces net exactly.
void save_network(const NetworkModel& net, const std::string& path);

// ---------------------------------------------------------------------------
// Time-series CSV: one header row, first column the period index 0..T-1,
// remaining columns named series. Numbers are written in shortest
// round-trip form, so a save/load cycle is exact.
// ---------------------------------------------------------------------------

struct CsvSeries {
    std::vector<std::string> columns;        // names after the period column
    std::vector<std::vector<double>> values; // [column][t]
};

CsvSeries load_series_csv(const std::string& path);
void save_series_csv(const CsvSeries& series, const std::string& path);

// ---------------------------------------------------------------------------
// Dispatch verification: replay an OPF dispatch through the power-flow
// solver and summarize the per-(bus,phase,period) deviations. Every sample
// enters the statistics; no bus or period is excluded.
// ---------------------------------------------------------------------------

/// Five-number summary of absolute deviations, per-unit.
struct ErrorReport {
    double max = 0.0;
    double min = 0.0;
    double average = 0.0;
    double median = 0.0; // midpoint average for even counts
    double rmse = 0.0;
    int count = 0; // samples aggregated: buses x phases x periods
    Formulation formulation = Formulation::power_voltage;
};

enum class VerifyQuantity { magnitude, angle };

struct VerifyOptions {
    PfOptions pf{1e-10, 60, true};
    /// Magnitude deviations by default; angle deviations (radians, wrapped
    /// to [-pi, pi]) behind this switch.
    VerifyQuantity quantity = VerifyQuantity::magnitude;
};

/// Absolute per-sample deviations |q(V_opf) - q(V_pf)| in period-major,
/// bus-major, phase-minor order. Fixes the solution's dispatch as injections
/// on top of the loads and runs one power flow per period. Throws
/// ReplayDivergence naming the first period whose replay fails.
std::vector<double> replay_deviations(const Grid& grid, const OpfSolution& sol,
                                      const VerifyOptions& opts = {});

/// Reduces a sample set to the five statistics.
ErrorReport summarize_deviations(const std::vector<double>& samples, Formulation formulation);

ErrorReport verify_against_pf(const Grid& grid, const OpfSolution& sol, Formulation formulation,
                              const VerifyOptions& opts = {});

// ---------------------------------------------------------------------------
// Run configuration and result documents. Result documents carry the full
// configuration echo, its hash, the seed, and version stamps, and contain
// nothing time- or machine-dependent, so identical runs produce identical
// bytes.
// ---------------------------------------------------------------------------

struct RunConfig {
    std::string command;     // pf | opf | hosting | verify | validate
    std::string network_path;
    std::string series_path; // optional profile override CSV; empty = none
    std::string output_path; // result document destination; empty = stdout
    std::string iteration_log_path; // empty = no log
    std::string production_path;    // per-phase production CSV; empty = none
    Formulation formulation = Formulation::power_voltage;
    Objective objective = Objective::hosting;
    HostingStudy study;
    SolverOptions solver = hosting_solver_defaults();
    bool compare_angles = false;
};

/// Checks that every referenced input path exists. Returns one diagnostic
/// per missing file; empty means the configuration is runnable.
std::vector<std::string> missing_inputs(const RunConfig& cfg);

nlohmann::ordered_json config_json(const RunConfig& cfg);

std::uint64_t fnv1a64(std::string_view bytes);

/// 16-hex-digit FNV-1a hash of the canonical configuration dump.
std::string config_hash(const RunConfig& cfg);

/// Version stamps, configuration echo, hash, and seed shared by every
/// result document. Destination paths stay out of the echo, so the same
/// study written to two places produces the same bytes.
nlohmann::ordered_json result_shell(const RunConfig& cfg);

nlohmann::ordered_json error_report_json(const ErrorReport& report);
nlohmann::ordered_json hosting_result_json(const HostingResult& result, const RunConfig& cfg);
nlohmann::ordered_json opf_result_json(const OpfSolution& sol, Formulation formulation,
                                       const RunConfig& cfg);
nlohmann::ordered_json pf_result_json(const PfSolution& sol, const RunConfig& cfg);

void write_text_file(const std::string& path, const std::string& content);
void write_iteration_log_csv(const std::vector<IterationRecord>& log, const std::string& path);
/// Aggregate per-phase production as a long-format data-only CSV
/// (period, phase, kw), one row per period and phase.
void write_production_csv(const Eigen::Matrix3Xd& aggregate_kw, const std::string& path);

// ---------------------------------------------------------------------------
// Command-line entry point. Exit codes: 0 success, 1 solver did not reach
// an optimal point, 2 input or usage errors.
// ---------------------------------------------------------------------------

int cli_main(int argc, const char* const* argv);
int cli_main(const std::vector<std::string>& args); // args without the program name

} // namespace triopf
