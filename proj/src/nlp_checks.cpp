#include <cmath>

#include <Eigen/Dense>

#include "triopf/nlp.hpp"

namespace triopf {

namespace {

Eigen::MatrixXd dense_jacobian(const std::vector<std::pair<int, int>>& structure,
                               const std::vector<double>& values, int rows, int cols) {
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(rows, cols);
    for (std::size_t k = 0; k < structure.size(); ++k) {
        j(structure[k].first, structure[k].second) += values[k];
    }
    return j;
}

} // namespace

KktResiduals kkt_residuals(const NlpProblem& prob, const Eigen::VectorXd& x, const Eigen::VectorXd& y_eq,
                           const Eigen::VectorXd& z_ineq, const Eigen::VectorXd& z_lower,
                           const Eigen::VectorXd& z_upper) {
    const int n = prob.n();
    const int m_eq = prob.num_eq();
    const int m_ineq = prob.num_ineq();
    const Eigen::VectorXd lo = prob.lower_bounds();
    const Eigen::VectorXd up = prob.upper_bounds();

    Eigen::VectorXd r = prob.eval_grad(x);
    if (m_eq > 0) {
        std::vector<double> vals(prob.jac_eq_structure().size());
        prob.eval_jac_eq(x, vals);
        r += dense_jacobian(prob.jac_eq_structure(), vals, m_eq, n).transpose() * y_eq;
    }
    Eigen::VectorXd c_ineq(0);
    if (m_ineq > 0) {
        c_ineq = prob.eval_ineq(x);
        std::vector<double> vals(prob.jac_ineq_structure().size());
        prob.eval_jac_ineq(x, vals);
        r += dense_jacobian(prob.jac_ineq_structure(), vals, m_ineq, n).transpose() * z_ineq;
    }
    r -= z_lower;
    r += z_upper;

    KktResiduals out;
    out.stationarity = r.size() > 0 ? r.lpNorm<Eigen::Infinity>() : 0.0;

    double feas = 0.0;
    if (m_eq > 0) feas = prob.eval_eq(x).lpNorm<Eigen::Infinity>();
    for (int i = 0; i < m_ineq; ++i) feas = std::max(feas, c_ineq(i));
    for (int i = 0; i < n; ++i) {
        if (std::isfinite(lo(i))) feas = std::max(feas, lo(i) - x(i));
        if (std::isfinite(up(i))) feas = std::max(feas, x(i) - up(i));
    }
    out.feasibility = feas;

    double comp = 0.0;
    for (int i = 0; i < m_ineq; ++i) comp = std::max(comp, std::abs(z_ineq(i) * c_ineq(i)));
    for (int i = 0; i < n; ++i) {
        if (std::isfinite(lo(i))) comp = std::max(comp, std::abs(z_lower(i) * (x(i) - lo(i))));
        if (std::isfinite(up(i))) comp = std::max(comp, std::abs(z_upper(i) * (up(i) - x(i))));
    }
    out.complementarity = comp;
    return out;
}

DerivativeReport check_derivatives(const NlpProblem& prob, const Eigen::VectorXd& x, double step) {
    const int n = prob.n();
    const int m_eq = prob.num_eq();
    const int m_ineq = prob.num_ineq();

    DerivativeReport rep;
    rep.max_rel_error = 0.0;

    auto consider = [&rep](double analytic, double numeric, int row, int col, const char* part) {
        const double err = std::abs(analytic - numeric) / std::max(1.0, std::abs(numeric));
        if (err > rep.max_rel_error) {
            rep.max_rel_error = err;
            rep.worst_row = row;
            rep.worst_col = col;
            rep.worst_part = part;
        }
    };

    const Eigen::VectorXd grad = prob.eval_grad(x);

    Eigen::MatrixXd j_eq, j_ineq;
    if (m_eq > 0) {
        std::vector<double> vals(prob.jac_eq_structure().size());
        prob.eval_jac_eq(x, vals);
        j_eq = dense_jacobian(prob.jac_eq_structure(), vals, m_eq, n);
    }
    if (m_ineq > 0) {
        std::vector<double> vals(prob.jac_ineq_structure().size());
        prob.eval_jac_ineq(x, vals);
        j_ineq = dense_jacobian(prob.jac_ineq_structure(), vals, m_ineq, n);
    }

    Eigen::VectorXd xp = x, xm = x;
    for (int i = 0; i < n; ++i) {
        xp(i) = x(i) + step;
        xm(i) = x(i) - step;

        consider(grad(i), (prob.eval_f(xp) - prob.eval_f(xm)) / (2.0 * step), -1, i, "grad");
        if (m_eq > 0) {
            const Eigen::VectorXd col = (prob.eval_eq(xp) - prob.eval_eq(xm)) / (2.0 * step);
            for (int r = 0; r < m_eq; ++r) consider(j_eq(r, i), col(r), r, i, "jac_eq");
        }
        if (m_ineq > 0) {
            const Eigen::VectorXd col = (prob.eval_ineq(xp) - prob.eval_ineq(xm)) / (2.0 * step);
            for (int r = 0; r < m_ineq; ++r) consider(j_ineq(r, i), col(r), r, i, "jac_ineq");
        }

        xp(i) = x(i);
        xm(i) = x(i);
    }
    return rep;
}

} // namespace triopf
