#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "triopf/network.hpp"
#include "triopf/nlp.hpp"
#include "triopf/qexpr.hpp"

namespace triopf {

enum class Formulation { power_voltage, current_voltage };
enum class Objective { hosting, losses, feasibility };
enum class Coupling { dispatch, capacity };

std::string to_string(Formulation f);
std::string to_string(Objective o);
std::string to_string(Coupling c);

struct OpfOptions {
    Objective objective = Objective::hosting;
    Coupling coupling = Coupling::capacity;
    /// Per-phase feed-in limit applied to each unit (kW). A unit's usable
    /// capacity is min(p_max, connected-phase-count * export_cap).
    std::optional<double> export_cap_kw;
    /// Force equal per-phase dispatch of three-phase units in dispatch mode.
    /// Capacity mode is balanced by construction.
    bool tie_three_phase = true;
    /// Restrict unbalance constraints to these bus ids (default: every
    /// non-slack bus).
    std::optional<std::vector<int>> vuf_bus_ids;
};

/// Usable capacity of a unit in per-unit: nameplate, clipped by the
/// per-phase export cap times the connected phase count.
double effective_capacity_pu(const Grid& grid, const PvData& pv, const OpfOptions& options);

/// Maps named quantities to flat decision-vector positions, period-major.
/// Slack-bus voltages are parameters, never variables. Dispatch variables
/// are skipped in periods with a zero production profile and for units with
/// zero usable capacity. Returns -1 for positions that do not exist.
class VariableLayout {
  public:
    VariableLayout() = default;
    VariableLayout(const Grid& grid, Formulation formulation, const OpfOptions& options);

    int size() const { return size_; }
    int horizon() const { return horizon_; }
    Formulation formulation() const { return formulation_; }
    Coupling coupling() const { return coupling_; }

    /// Rectangular voltage of non-slack bus n, phase p, period t.
    int u_re(int t, int n, int p) const;
    int u_im(int t, int n, int p) const;
    /// Power-voltage branch flow; dir 0 measures at the from side, 1 at the to side.
    int flow_p(int t, int b, int p, int dir) const;
    int flow_q(int t, int b, int p, int dir) const;
    /// Current-voltage rectangular series current of branch b.
    int cur_re(int t, int b, int p) const;
    int cur_im(int t, int b, int p) const;
    /// Active dispatch of PV unit k on phase p; -1 off the connected phases
    /// or when the period's profile is zero.
    int pv_p(int t, int k, int p) const;
    /// Reactive dispatch; exists only when the unit declares reactive limits.
    int pv_q(int t, int k, int p) const;
    /// Slack-bus generator injection.
    int slack_p(int t, int p) const;
    int slack_q(int t, int p) const;
    /// Installed-capacity variable of unit k (capacity coupling only).
    int capacity(int k) const;

    /// Human-readable name of a flat position.
    const std::string& describe(int index) const { return names_[index]; }

  private:
    int horizon_ = 0, buses_ = 0, branches_ = 0, units_ = 0, slack_ = 0;
    Formulation formulation_ = Formulation::power_voltage;
    Coupling coupling_ = Coupling::dispatch;
    int size_ = 0;
    std::vector<int> period_base_;           // [t]
    std::vector<int> branch_base_;           // [t]
    std::vector<std::vector<int>> pv_p_idx_; // [t][k*3+p]
    std::vector<std::vector<int>> pv_q_idx_; // [t][k*3+p]
    std::vector<int> slack_base_;            // [t]
    std::vector<int> capacity_idx_;          // [k]
    std::vector<std::string> names_;
};

/// Row metadata used for diagnostics and binding-constraint reports.
struct ConstraintInfo {
    enum class Kind {
        flow_def,      // branch power flow definition (power-voltage)
        current_def,   // branch series current definition (current-voltage)
        power_balance, // nodal active/reactive balance in power form
        current_balance, // nodal current balance at passive buses
        capacity_link, // dispatch tied to installed capacity and profile
        phase_tie,     // equal per-phase dispatch of a three-phase unit
        voltage_lower,
        voltage_upper,
        unbalance,
        thermal,
    };
    Kind kind;
    int period = -1;
    int bus = -1;    // bus index where applicable
    int branch = -1; // branch index where applicable
    int unit = -1;   // PV unit index where applicable
    int phase = -1;
    bool reactive = false; // Q (or imaginary-part) row of a re/im pair
    std::string label() const;
};

/// Three-phase OPF instance over a prepared network, exposed as a smooth
/// NLP. All rows are degree-two polynomials with hand-built derivatives and
/// constant Hessians.
class OpfProblem : public NlpProblem {
  public:
    OpfProblem(const Grid& grid, Formulation formulation, const OpfOptions& options);

    const Grid& grid() const { return *grid_; }
    const VariableLayout& layout() const { return layout_; }
    const OpfOptions& options() const { return options_; }
    Formulation formulation() const { return layout_.formulation(); }
    const std::vector<ConstraintInfo>& eq_info() const { return eq_info_; }
    const std::vector<ConstraintInfo>& ineq_info() const { return ineq_info_; }
    Eigen::VectorXd initial_point() const { return x0_; }

    int n() const override { return layout_.size(); }
    int num_eq() const override { return static_cast<int>(eq_rows_.size()); }
    int num_ineq() const override { return static_cast<int>(ineq_rows_.size()); }
    Eigen::VectorXd lower_bounds() const override { return lower_; }
    Eigen::VectorXd upper_bounds() const override { return upper_; }
    double eval_f(const Eigen::VectorXd& x) const override;
    Eigen::VectorXd eval_grad(const Eigen::VectorXd& x) const override;
    Eigen::VectorXd eval_eq(const Eigen::VectorXd& x) const override;
    Eigen::VectorXd eval_ineq(const Eigen::VectorXd& x) const override;
    std::vector<std::pair<int, int>> jac_eq_structure() const override;
    std::vector<std::pair<int, int>> jac_ineq_structure() const override;
    void eval_jac_eq(const Eigen::VectorXd& x, std::vector<double>& values) const override;
    void eval_jac_ineq(const Eigen::VectorXd& x, std::vector<double>& values) const override;
    bool has_hessian() const override { return true; }
    std::vector<std::pair<int, int>> hess_structure() const override;
    void eval_hess(const Eigen::VectorXd& x, double sigma, const Eigen::VectorXd& y_eq,
                   const Eigen::VectorXd& z_ineq, std::vector<double>& values) const override;

  private:
    void check_dim(const Eigen::VectorXd& x) const;

    const Grid* grid_;
    VariableLayout layout_;
    OpfOptions options_;
    QuadExpr objective_;
    std::vector<QuadExpr> eq_rows_, ineq_rows_;
    std::vector<ConstraintInfo> eq_info_, ineq_info_;
    Eigen::VectorXd lower_, upper_, x0_;
};

OpfProblem build_power_voltage(const Grid& grid, const OpfOptions& options = {});
OpfProblem build_current_voltage(const Grid& grid, const OpfOptions& options = {});
OpfProblem build_opf(const Grid& grid, Formulation formulation, const OpfOptions& options = {});

struct OpfSolution {
    SolveStatus status = SolveStatus::numerical_failure;
    double objective = 0.0; // raw NLP objective (per-unit scale)
    KktResiduals kkt;
    int iterations = 0;
    std::vector<std::vector<PhaseVoltage>> voltages; // [period][bus], slack included
    std::vector<Eigen::Matrix3Xd> pv_p_kw;           // [unit](phase, period)
    std::vector<Eigen::Matrix3Xd> pv_q_kvar;         // [unit](phase, period)
    std::vector<double> capacity_kw;                 // [unit], capacity coupling only
    Eigen::Matrix3Xd slack_p_kw;                     // (phase, period)
    Eigen::Matrix3Xd slack_q_kvar;
    std::vector<std::vector<double>> vuf;            // [period][bus], slack included
    std::vector<std::string> binding;                // active constraints at the solution
    Eigen::VectorXd raw;                             // flat decision vector
};

OpfSolution extract_solution(const OpfProblem& prob, const SolveReport& report);

} // namespace triopf
