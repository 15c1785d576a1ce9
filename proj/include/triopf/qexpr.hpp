#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>

#include "triopf/types.hpp"

namespace triopf {

/// One first-order term c * x[i].
struct LinTerm {
    int i = 0;
    double c = 0.0;
};

/// One second-order term c * x[i] * x[j], stored with i <= j.
struct QuadTerm {
    int i = 0;
    int j = 0;
    double c = 0.0;
};

/// Polynomial of degree at most two over the flat decision vector. Constraint
/// rows and objectives are built as these, which makes first derivatives
/// affine and second derivatives constant.
struct QuadExpr {
    double constant = 0.0;
    std::vector<LinTerm> lin;
    std::vector<QuadTerm> quad;

    void add_lin(int i, double c) {
        if (c != 0.0) lin.push_back({i, c});
    }
    void add_quad(int i, int j, double c) {
        if (c == 0.0) return;
        if (i > j) std::swap(i, j);
        quad.push_back({i, j, c});
    }

    double eval(const Eigen::VectorXd& x) const {
        double v = constant;
        for (const auto& t : lin) v += t.c * x(t.i);
        for (const auto& t : quad) v += t.c * x(t.i) * x(t.j);
        return v;
    }

    /// Appends the gradient sparsity as (row, var) pairs. Positions may
    /// repeat; values accumulate. Order matches grad_values exactly.
    void grad_structure(int row, std::vector<std::pair<int, int>>& out) const {
        for (const auto& t : lin) out.emplace_back(row, t.i);
        for (const auto& t : quad) {
            out.emplace_back(row, t.i);
            if (t.i != t.j) out.emplace_back(row, t.j);
        }
    }
    void grad_values(const Eigen::VectorXd& x, std::vector<double>& out) const {
        for (const auto& t : lin) out.push_back(t.c);
        for (const auto& t : quad) {
            if (t.i == t.j) {
                out.push_back(2.0 * t.c * x(t.i));
            } else {
                out.push_back(t.c * x(t.j));
                out.push_back(t.c * x(t.i));
            }
        }
    }

    /// Dense gradient accumulation (used for the objective).
    void add_gradient(const Eigen::VectorXd& x, Eigen::VectorXd& g) const {
        for (const auto& t : lin) g(t.i) += t.c;
        for (const auto& t : quad) {
            if (t.i == t.j) {
                g(t.i) += 2.0 * t.c * x(t.i);
            } else {
                g(t.i) += t.c * x(t.j);
                g(t.j) += t.c * x(t.i);
            }
        }
    }

    /// Constant Hessian, lower triangle: entry (j, i) with j >= i per term.
    void hess_structure(std::vector<std::pair<int, int>>& out) const {
        for (const auto& t : quad) out.emplace_back(t.j, t.i);
    }
    void hess_values(double weight, std::vector<double>& out) const {
        for (const auto& t : quad) out.push_back(t.i == t.j ? 2.0 * t.c * weight : t.c * weight);
    }
};

/// Complex affine form a0 + sum_k a_k * x[k] with real-valued variables.
/// Voltages and currents enter constraint rows through these.
struct ComplexAffine {
    Complex constant{0.0, 0.0};
    std::vector<std::pair<int, Complex>> terms;

    void add(int i, Complex coeff) {
        if (coeff != Complex{0.0, 0.0}) terms.emplace_back(i, coeff);
    }
    void add(const ComplexAffine& other, Complex scale) {
        constant += other.constant * scale;
        for (const auto& [i, c] : other.terms) add(i, c * scale);
    }
};

/// Adds scale * Re(a * conj(b)) to the target expression.
void add_re_product(QuadExpr& target, const ComplexAffine& a, const ComplexAffine& b, double scale);
/// Adds scale * Im(a * conj(b)) to the target expression.
void add_im_product(QuadExpr& target, const ComplexAffine& a, const ComplexAffine& b, double scale);
/// Adds scale * |a|^2.
void add_abs2(QuadExpr& target, const ComplexAffine& a, double scale);

} // namespace triopf
