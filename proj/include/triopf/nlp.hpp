#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace triopf {

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

/// Smooth NLP in the form
///   min f(x)  s.t.  c_E(x) = 0,  c_I(x) <= 0,  l <= x <= u.
/// Jacobians use a fixed sparsity structure; values are written in structure
/// order on every evaluation. The Lagrangian Hessian hook is optional; the
/// solver falls back to a damped BFGS approximation without it.
class NlpProblem {
  public:
    virtual ~NlpProblem() = default;

    virtual int n() const = 0;
    virtual int num_eq() const { return 0; }
    virtual int num_ineq() const { return 0; }

    virtual Eigen::VectorXd lower_bounds() const { return Eigen::VectorXd::Constant(n(), -kUnbounded); }
    virtual Eigen::VectorXd upper_bounds() const { return Eigen::VectorXd::Constant(n(), kUnbounded); }

    virtual double eval_f(const Eigen::VectorXd& x) const = 0;
    virtual Eigen::VectorXd eval_grad(const Eigen::VectorXd& x) const = 0;
    virtual Eigen::VectorXd eval_eq(const Eigen::VectorXd&) const { return Eigen::VectorXd(0); }
    virtual Eigen::VectorXd eval_ineq(const Eigen::VectorXd&) const { return Eigen::VectorXd(0); }

    /// (row, col) positions; a position may repeat (values accumulate).
    virtual std::vector<std::pair<int, int>> jac_eq_structure() const { return {}; }
    virtual std::vector<std::pair<int, int>> jac_ineq_structure() const { return {}; }
    virtual void eval_jac_eq(const Eigen::VectorXd&, std::vector<double>&) const {}
    virtual void eval_jac_ineq(const Eigen::VectorXd&, std::vector<double>&) const {}

    /// Lagrangian Hessian sigma*H_f + sum_i y_i*H_eq_i + sum_j z_j*H_ineq_j,
    /// lower triangle only (row >= col).
    virtual bool has_hessian() const { return false; }
    virtual std::vector<std::pair<int, int>> hess_structure() const { return {}; }
    virtual void eval_hess(const Eigen::VectorXd&, double, const Eigen::VectorXd&,
                           const Eigen::VectorXd&, std::vector<double>&) const {}
};

struct SolverOptions {
    double tolerance = 1e-6;     // KKT infinity-norm target
    int max_iterations = 300;
    double mu0 = 0.1;            // initial barrier parameter
    double mu_reduction = 0.2;   // Fiacco-McCormick factor
    double tau = 0.995;          // fraction-to-boundary floor
    double reg_floor = 1e-8;     // smallest Hessian regularization
};

enum class SolveStatus { optimal, max_iter, infeasible_detected, numerical_failure };

std::string to_string(SolveStatus s);

struct IterationRecord {
    int iter = 0;
    double mu = 0.0;
    double f = 0.0;
    double stationarity = 0.0;    // unscaled KKT residuals at mu = 0
    double feasibility = 0.0;
    double complementarity = 0.0;
    double step_primal = 0.0;
    double step_dual = 0.0;
    double min_slack = 0.0;       // smallest inequality slack entering the iteration
    double min_bound_gap = 0.0;   // smallest distance to a variable bound
    double regularization = 0.0;
};

struct SolveReport {
    SolveStatus status = SolveStatus::numerical_failure;
    Eigen::VectorXd x;
    Eigen::VectorXd y_eq;      // equality multipliers
    Eigen::VectorXd z_ineq;    // inequality multipliers, >= 0
    Eigen::VectorXd z_lower;   // bound multipliers, >= 0
    Eigen::VectorXd z_upper;
    double objective = 0.0;
    int iterations = 0;
    std::vector<IterationRecord> log;
};

/// Primal-dual interior-point solve; see NlpProblem for the problem form.
SolveReport solve(const NlpProblem& prob, const SolverOptions& opts, const Eigen::VectorXd& x0);

struct KktResiduals {
    double stationarity = 0.0;
    double feasibility = 0.0;
    double complementarity = 0.0;
};

KktResiduals kkt_residuals(const NlpProblem& prob, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& y_eq, const Eigen::VectorXd& z_ineq,
                           const Eigen::VectorXd& z_lower, const Eigen::VectorXd& z_upper);

struct DerivativeReport {
    double max_rel_error = 0.0;
    int worst_row = -1;   // -1 in worst_row with worst_col >= 0 marks the objective gradient
    int worst_col = -1;
    std::string worst_part; // "grad", "jac_eq", "jac_ineq"
};

/// Central-difference check of the gradient and both Jacobians at x.
DerivativeReport check_derivatives(const NlpProblem& prob, const Eigen::VectorXd& x, double step);

} // namespace triopf
