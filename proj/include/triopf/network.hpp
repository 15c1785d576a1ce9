#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "triopf/sequence.hpp"
#include "triopf/types.hpp"

namespace triopf {

enum class BusKind { slack, pq };

struct Bus {
    int id = -1;
    BusKind kind = BusKind::pq;
    double base_kv = 0.0; // line-to-line
};

struct Line {
    int from_bus = -1;
    int to_bus = -1;
    double length_km = 0.0;
    double r1_ohm_per_km = 0.0;
    double x1_ohm_per_km = 0.0;
    double r0_ohm_per_km = 0.0;
    double x0_ohm_per_km = 0.0;
    double max_i_ka = 0.0;
    double b_us_per_km = 0.0;          // shunt susceptance, reserved; zero in shipped feeders
    std::optional<double> s_max_pu;    // per-phase apparent-power limit override
};

struct Transformer {
    int hv_bus = -1;
    int lv_bus = -1;
    double s_rated_mva = 0.0;
    double vk_percent = 0.0;  // short-circuit voltage
    double vkr_percent = 0.0; // resistive part
    double hv_kv = 0.0;
    double lv_kv = 0.0;
};

/// Per-phase, per-period demand series. p_kw[phase][t], q_kvar[phase][t].
struct Load {
    int bus = -1;
    std::array<std::vector<double>, 3> p_kw;
    std::array<std::vector<double>, 3> q_kvar;
};

enum class PvConnection { phase_a, phase_b, phase_c, three_phase };

inline bool is_single_phase(PvConnection c) { return c != PvConnection::three_phase; }
inline int connection_phase(PvConnection c) { return static_cast<int>(c); } // valid for single-phase only

struct PvUnit {
    int bus = -1;
    PvConnection connection = PvConnection::three_phase;
    double p_max_kw = 0.0;           // theoretical capacity
    std::vector<double> profile;     // per-unit series in [0,1], length T
    std::optional<double> q_min_kvar;
    std::optional<double> q_max_kvar;
};

struct OperatingLimits {
    double u_min_pu = 0.9;
    double u_max_pu = 1.1;
    double vuf_max = 0.02;
};

/// Raw feeder description in physical units, as loaded from file or built in code.
struct NetworkModel {
    std::vector<Bus> buses;
    std::vector<Line> lines;
    std::vector<Transformer> transformers;
    std::vector<Load> loads;
    std::vector<PvUnit> pv_units;
    OperatingLimits limits;
    double base_mva = 1.0;
    int horizon = 1;
    double u_slack = 1.0;
};

/// Checks every model invariant. Returns one diagnostic per violation; empty means valid.
std::vector<std::string> validate(const NetworkModel& net);

/// One branch of the prepared network, in per-unit.
struct BranchData {
    int from = -1; // bus index (not id)
    int to = -1;
    Matrix3c y_series;     // 3x3 admittance block
    Matrix3c y_shunt_half; // per end; zero unless the line carries shunt susceptance
    double rating_pu = 0.0; // per-phase apparent-power / current limit; 0 = unrated
    bool is_transformer = false;
    std::string label;
};

struct PvData {
    int bus = -1; // bus index
    PvConnection connection = PvConnection::three_phase;
    double p_max_pu = 0.0;
    std::vector<double> profile;
    std::optional<double> q_min_pu, q_max_pu;
};

/// Validated, per-unit network. Immutable after construction; safe to share
/// read-only across concurrent solver runs.
class Grid {
  public:
    /// Validates and converts. Throws ValidationError listing every violated invariant.
    static Grid prepare(const NetworkModel& net);

    int bus_count() const { return static_cast<int>(bus_ids_.size()); }
    int branch_count() const { return static_cast<int>(branches_.size()); }
    int horizon() const { return horizon_; }
    int slack_index() const { return slack_index_; }
    double base_mva() const { return base_mva_; }
    double u_slack() const { return u_slack_; }

    int bus_id(int index) const { return bus_ids_[index]; }
    int bus_index(int id) const; // -1 when unknown

    const std::vector<BranchData>& branches() const { return branches_; }
    const std::vector<PvData>& pv_units() const { return pv_; }
    const OperatingLimits& limits() const { return limits_; }

    /// Net demand, per-unit, positive = consumption.
    double load_p_pu(int bus_index, int phase, int t) const { return load_p_[key(bus_index, phase, t)]; }
    double load_q_pu(int bus_index, int phase, int t) const { return load_q_[key(bus_index, phase, t)]; }

    PhaseVoltage slack_voltage_pu() const { return slack_voltage(u_slack_); }

    /// Assembled 3N x 3N bus admittance matrix, per-unit.
    const Eigen::MatrixXcd& ybus() const { return ybus_; }

    /// kW -> per-unit per-phase power on this grid's base.
    double kw_to_pu(double kw) const { return kw * 1e-3 / (base_mva_ / 3.0); }
    double pu_to_kw(double pu) const { return pu * (base_mva_ / 3.0) * 1e3; }

  private:
    std::size_t key(int bus_index, int phase, int t) const {
        return (static_cast<std::size_t>(t) * bus_ids_.size() + bus_index) * 3 + phase;
    }

    std::vector<int> bus_ids_;
    int slack_index_ = -1;
    int horizon_ = 1;
    double base_mva_ = 1.0;
    double u_slack_ = 1.0;
    OperatingLimits limits_;
    std::vector<BranchData> branches_;
    std::vector<PvData> pv_;
    std::vector<double> load_p_; // [t][bus][phase]
    std::vector<double> load_q_;
    Eigen::MatrixXcd ybus_;
};

} // namespace triopf
