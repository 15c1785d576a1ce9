#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "triopf/errors.hpp"
#include "triopf/opf.hpp"

namespace triopf {

namespace {

constexpr Complex kJ{0.0, 1.0};

bool connects_phase(PvConnection c, int p) {
    return c == PvConnection::three_phase || connection_phase(c) == p;
}

int phase_count(PvConnection c) { return c == PvConnection::three_phase ? 3 : 1; }

void split_complex(QuadExpr& re_row, QuadExpr& im_row, const ComplexAffine& e) {
    re_row.constant += e.constant.real();
    im_row.constant += e.constant.imag();
    for (const auto& [i, c] : e.terms) {
        re_row.add_lin(i, c.real());
        im_row.add_lin(i, c.imag());
    }
}

// Assembles every constraint row of one OPF instance. Rows are emitted in a
// fixed period-major order so repeated builds are identical.
struct RowBuilder {
    const Grid& g;
    const VariableLayout& lay;
    const OpfOptions& opt;
    std::vector<QuadExpr>& eq;
    std::vector<ConstraintInfo>& eq_info;
    std::vector<QuadExpr>& ineq;
    std::vector<ConstraintInfo>& ineq_info;

    std::vector<bool> coupled_bus;   // needs power-form balance rows
    std::vector<std::vector<int>> units_at_bus;
    std::set<int> vuf_buses;

    RowBuilder(const Grid& grid, const VariableLayout& layout, const OpfOptions& options,
               std::vector<QuadExpr>& eq_rows, std::vector<ConstraintInfo>& eq_infos,
               std::vector<QuadExpr>& ineq_rows, std::vector<ConstraintInfo>& ineq_infos)
        : g(grid), lay(layout), opt(options), eq(eq_rows), eq_info(eq_infos), ineq(ineq_rows),
          ineq_info(ineq_infos) {
        const int buses = g.bus_count();
        coupled_bus.assign(buses, false);
        coupled_bus[g.slack_index()] = true;
        units_at_bus.assign(buses, {});
        for (std::size_t k = 0; k < g.pv_units().size(); ++k) {
            units_at_bus[g.pv_units()[k].bus].push_back(static_cast<int>(k));
            coupled_bus[g.pv_units()[k].bus] = true;
        }
        for (int n = 0; n < buses; ++n) {
            for (int t = 0; t < g.horizon() && !coupled_bus[n]; ++t) {
                for (int p = 0; p < kPhaseCount; ++p) {
                    if (g.load_p_pu(n, p, t) != 0.0 || g.load_q_pu(n, p, t) != 0.0) {
                        coupled_bus[n] = true;
                        break;
                    }
                }
            }
        }
        if (opt.vuf_bus_ids) {
            for (int id : *opt.vuf_bus_ids) {
                const int n = g.bus_index(id);
                if (n < 0) throw ValidationError({fmt::format("unbalance limit references nonexistent bus {}", id)});
                if (n != g.slack_index()) vuf_buses.insert(n);
            }
        } else {
            for (int n = 0; n < buses; ++n) {
                if (n != g.slack_index()) vuf_buses.insert(n);
            }
        }
    }

    ComplexAffine voltage(int t, int n, int p) const {
        ComplexAffine v;
        if (n == g.slack_index()) {
            v.constant = g.slack_voltage_pu()[p];
        } else {
            v.add(lay.u_re(t, n, p), Complex{1.0, 0.0});
            v.add(lay.u_im(t, n, p), kJ);
        }
        return v;
    }

    // Current entering branch b at the given end (series plus half shunt).
    ComplexAffine end_current(int t, int b, int p, bool at_from) const {
        const BranchData& bd = g.branches()[b];
        const int e = at_from ? bd.from : bd.to;
        const int o = at_from ? bd.to : bd.from;
        ComplexAffine i;
        for (int q = 0; q < kPhaseCount; ++q) {
            i.add(voltage(t, e, q), bd.y_series(p, q) + bd.y_shunt_half(p, q));
            i.add(voltage(t, o, q), -bd.y_series(p, q));
        }
        return i;
    }

    void power_voltage_equalities(int t) {
        // branch power flow definitions, both measuring ends
        for (int b = 0; b < g.branch_count(); ++b) {
            const BranchData& bd = g.branches()[b];
            for (int p = 0; p < kPhaseCount; ++p) {
                for (int dir = 0; dir < 2; ++dir) {
                    const int e = dir == 0 ? bd.from : bd.to;
                    const ComplexAffine v = voltage(t, e, p);
                    const ComplexAffine i = end_current(t, b, p, dir == 0);
                    QuadExpr prow, qrow;
                    prow.add_lin(lay.flow_p(t, b, p, dir), 1.0);
                    add_re_product(prow, v, i, -1.0);
                    qrow.add_lin(lay.flow_q(t, b, p, dir), 1.0);
                    add_im_product(qrow, v, i, -1.0);
                    eq.push_back(std::move(prow));
                    eq_info.push_back({ConstraintInfo::Kind::flow_def, t, e, b, -1, p, false});
                    eq.push_back(std::move(qrow));
                    eq_info.push_back({ConstraintInfo::Kind::flow_def, t, e, b, -1, p, true});
                }
            }
        }
        // nodal balance in power form at every bus
        for (int n = 0; n < g.bus_count(); ++n) {
            for (int p = 0; p < kPhaseCount; ++p) {
                QuadExpr prow, qrow;
                for (int b = 0; b < g.branch_count(); ++b) {
                    const BranchData& bd = g.branches()[b];
                    if (bd.from == n) {
                        prow.add_lin(lay.flow_p(t, b, p, 0), 1.0);
                        qrow.add_lin(lay.flow_q(t, b, p, 0), 1.0);
                    }
                    if (bd.to == n) {
                        prow.add_lin(lay.flow_p(t, b, p, 1), 1.0);
                        qrow.add_lin(lay.flow_q(t, b, p, 1), 1.0);
                    }
                }
                prow.constant += g.load_p_pu(n, p, t);
                qrow.constant += g.load_q_pu(n, p, t);
                add_generation(prow, qrow, t, n, p);
                eq.push_back(std::move(prow));
                eq_info.push_back({ConstraintInfo::Kind::power_balance, t, n, -1, -1, p, false});
                eq.push_back(std::move(qrow));
                eq_info.push_back({ConstraintInfo::Kind::power_balance, t, n, -1, -1, p, true});
            }
        }
    }

    void current_voltage_equalities(int t) {
        // series current definitions, linear in voltages
        for (int b = 0; b < g.branch_count(); ++b) {
            const BranchData& bd = g.branches()[b];
            for (int p = 0; p < kPhaseCount; ++p) {
                ComplexAffine e;
                e.add(lay.cur_re(t, b, p), Complex{1.0, 0.0});
                e.add(lay.cur_im(t, b, p), kJ);
                for (int q = 0; q < kPhaseCount; ++q) {
                    e.add(voltage(t, bd.from, q), -bd.y_series(p, q));
                    e.add(voltage(t, bd.to, q), bd.y_series(p, q));
                }
                QuadExpr re_row, im_row;
                split_complex(re_row, im_row, e);
                eq.push_back(std::move(re_row));
                eq_info.push_back({ConstraintInfo::Kind::current_def, t, -1, b, -1, p, false});
                eq.push_back(std::move(im_row));
                eq_info.push_back({ConstraintInfo::Kind::current_def, t, -1, b, -1, p, true});
            }
        }
        // bus rows: power coupling where injections live, else current balance
        for (int n = 0; n < g.bus_count(); ++n) {
            for (int p = 0; p < kPhaseCount; ++p) {
                ComplexAffine j = leaving_current(t, n, p);
                if (coupled_bus[n]) {
                    QuadExpr prow, qrow;
                    const ComplexAffine v = voltage(t, n, p);
                    add_re_product(prow, v, j, 1.0);
                    add_im_product(qrow, v, j, 1.0);
                    prow.constant += g.load_p_pu(n, p, t);
                    qrow.constant += g.load_q_pu(n, p, t);
                    add_generation(prow, qrow, t, n, p);
                    eq.push_back(std::move(prow));
                    eq_info.push_back({ConstraintInfo::Kind::power_balance, t, n, -1, -1, p, false});
                    eq.push_back(std::move(qrow));
                    eq_info.push_back({ConstraintInfo::Kind::power_balance, t, n, -1, -1, p, true});
                } else {
                    QuadExpr re_row, im_row;
                    split_complex(re_row, im_row, j);
                    eq.push_back(std::move(re_row));
                    eq_info.push_back({ConstraintInfo::Kind::current_balance, t, n, -1, -1, p, false});
                    eq.push_back(std::move(im_row));
                    eq_info.push_back({ConstraintInfo::Kind::current_balance, t, n, -1, -1, p, true});
                }
            }
        }
    }

    // Net current leaving bus n on phase p through all incident branches.
    ComplexAffine leaving_current(int t, int n, int p) const {
        ComplexAffine j;
        for (int b = 0; b < g.branch_count(); ++b) {
            const BranchData& bd = g.branches()[b];
            if (bd.from != n && bd.to != n) continue;
            const double sign = bd.from == n ? 1.0 : -1.0;
            j.add(lay.cur_re(t, b, p), Complex{sign, 0.0});
            j.add(lay.cur_im(t, b, p), sign * kJ);
            for (int q = 0; q < kPhaseCount; ++q) {
                j.add(voltage(t, n, q), bd.y_shunt_half(p, q));
            }
        }
        return j;
    }

    // Subtracts PV and slack generation from a P/Q balance row pair.
    void add_generation(QuadExpr& prow, QuadExpr& qrow, int t, int n, int p) {
        for (int k : units_at_bus[n]) {
            const int ip = lay.pv_p(t, k, p);
            if (ip >= 0) prow.add_lin(ip, -1.0);
            const int iq = lay.pv_q(t, k, p);
            if (iq >= 0) qrow.add_lin(iq, -1.0);
        }
        if (n == g.slack_index()) {
            prow.add_lin(lay.slack_p(t, p), -1.0);
            qrow.add_lin(lay.slack_q(t, p), -1.0);
        }
    }

    void dispatch_coupling(int t) {
        for (std::size_t k = 0; k < g.pv_units().size(); ++k) {
            const PvData& pv = g.pv_units()[k];
            if (lay.coupling() == Coupling::capacity) {
                const int ic = lay.capacity(static_cast<int>(k));
                if (ic < 0) continue;
                const double share = pv.profile[t] / phase_count(pv.connection);
                for (int p = 0; p < kPhaseCount; ++p) {
                    const int ip = lay.pv_p(t, static_cast<int>(k), p);
                    if (ip < 0) continue;
                    QuadExpr row;
                    row.add_lin(ip, 1.0);
                    row.add_lin(ic, -share);
                    eq.push_back(std::move(row));
                    eq_info.push_back({ConstraintInfo::Kind::capacity_link, t, -1, -1,
                                       static_cast<int>(k), p, false});
                }
            } else if (opt.tie_three_phase && pv.connection == PvConnection::three_phase) {
                const int ia = lay.pv_p(t, static_cast<int>(k), 0);
                const int ib = lay.pv_p(t, static_cast<int>(k), 1);
                const int ic = lay.pv_p(t, static_cast<int>(k), 2);
                if (ia < 0) continue;
                for (const auto& [lhs, rhs, ph] : {std::tuple{ia, ib, 0}, std::tuple{ib, ic, 1}}) {
                    QuadExpr row;
                    row.add_lin(lhs, 1.0);
                    row.add_lin(rhs, -1.0);
                    eq.push_back(std::move(row));
                    eq_info.push_back({ConstraintInfo::Kind::phase_tie, t, -1, -1,
                                       static_cast<int>(k), ph, false});
                }
            }
        }
    }

    void voltage_and_unbalance(int t) {
        const OperatingLimits& lim = g.limits();
        for (int n = 0; n < g.bus_count(); ++n) {
            if (n == g.slack_index()) continue;
            for (int p = 0; p < kPhaseCount; ++p) {
                const ComplexAffine v = voltage(t, n, p);
                QuadExpr low, high;
                low.constant = lim.u_min_pu * lim.u_min_pu;
                add_abs2(low, v, -1.0);
                high.constant = -lim.u_max_pu * lim.u_max_pu;
                add_abs2(high, v, 1.0);
                ineq.push_back(std::move(low));
                ineq_info.push_back({ConstraintInfo::Kind::voltage_lower, t, n, -1, -1, p, false});
                ineq.push_back(std::move(high));
                ineq_info.push_back({ConstraintInfo::Kind::voltage_upper, t, n, -1, -1, p, false});
            }
        }
        const Complex a = rotation_operator();
        const Complex a2 = a * a;
        for (int n : vuf_buses) {
            ComplexAffine num, den;
            num.add(voltage(t, n, 0), Complex{1.0, 0.0});
            num.add(voltage(t, n, 1), a2);
            num.add(voltage(t, n, 2), a);
            den.add(voltage(t, n, 0), Complex{1.0, 0.0});
            den.add(voltage(t, n, 1), a);
            den.add(voltage(t, n, 2), a2);
            QuadExpr row;
            add_abs2(row, num, 1.0);
            add_abs2(row, den, -lim.vuf_max * lim.vuf_max);
            ineq.push_back(std::move(row));
            ineq_info.push_back({ConstraintInfo::Kind::unbalance, t, n, -1, -1, -1, false});
        }
    }

    void thermal(int t) {
        for (int b = 0; b < g.branch_count(); ++b) {
            const BranchData& bd = g.branches()[b];
            if (bd.rating_pu <= 0.0) {
                throw MissingLimit(fmt::format("branch {} has no thermal rating", bd.label));
            }
            const double r2 = bd.rating_pu * bd.rating_pu;
            for (int p = 0; p < kPhaseCount; ++p) {
                if (lay.formulation() == Formulation::power_voltage) {
                    for (int dir = 0; dir < 2; ++dir) {
                        QuadExpr row;
                        row.constant = -r2;
                        row.add_quad(lay.flow_p(t, b, p, dir), lay.flow_p(t, b, p, dir), 1.0);
                        row.add_quad(lay.flow_q(t, b, p, dir), lay.flow_q(t, b, p, dir), 1.0);
                        ineq.push_back(std::move(row));
                        ineq_info.push_back({ConstraintInfo::Kind::thermal, t,
                                             dir == 0 ? bd.from : bd.to, b, -1, p, false});
                    }
                } else {
                    QuadExpr row;
                    row.constant = -r2;
                    row.add_quad(lay.cur_re(t, b, p), lay.cur_re(t, b, p), 1.0);
                    row.add_quad(lay.cur_im(t, b, p), lay.cur_im(t, b, p), 1.0);
                    ineq.push_back(std::move(row));
                    ineq_info.push_back({ConstraintInfo::Kind::thermal, t, -1, b, -1, p, false});
                }
            }
        }
    }
};

} // namespace

OpfProblem::OpfProblem(const Grid& grid, Formulation formulation, const OpfOptions& options)
    : grid_(&grid), layout_(grid, formulation, options), options_(options) {
    RowBuilder rb(grid, layout_, options_, eq_rows_, eq_info_, ineq_rows_, ineq_info_);
    for (int t = 0; t < grid.horizon(); ++t) {
        if (formulation == Formulation::power_voltage) {
            rb.power_voltage_equalities(t);
        } else {
            rb.current_voltage_equalities(t);
        }
        rb.dispatch_coupling(t);
        rb.voltage_and_unbalance(t);
        rb.thermal(t);
    }

    // objective
    if (options_.objective == Objective::hosting || options_.objective == Objective::losses) {
        const double pv_weight = options_.objective == Objective::hosting ? -1.0 : 1.0;
        for (int t = 0; t < grid.horizon(); ++t) {
            for (std::size_t k = 0; k < grid.pv_units().size(); ++k) {
                for (int p = 0; p < kPhaseCount; ++p) {
                    const int ip = layout_.pv_p(t, static_cast<int>(k), p);
                    if (ip >= 0) objective_.add_lin(ip, pv_weight);
                }
            }
            if (options_.objective == Objective::losses) {
                for (int p = 0; p < kPhaseCount; ++p) objective_.add_lin(layout_.slack_p(t, p), 1.0);
            }
        }
    }

    // bounds
    lower_ = Eigen::VectorXd::Constant(layout_.size(), -kUnbounded);
    upper_ = Eigen::VectorXd::Constant(layout_.size(), kUnbounded);
    for (std::size_t k = 0; k < grid.pv_units().size(); ++k) {
        const PvData& pv = grid.pv_units()[k];
        const double cap = effective_capacity_pu(grid, pv, options_);
        const int phases = phase_count(pv.connection);
        const int ic = layout_.capacity(static_cast<int>(k));
        if (ic >= 0) {
            lower_(ic) = 0.0;
            upper_(ic) = cap;
        }
        for (int t = 0; t < grid.horizon(); ++t) {
            for (int p = 0; p < kPhaseCount; ++p) {
                const int ip = layout_.pv_p(t, static_cast<int>(k), p);
                if (ip >= 0 && options_.coupling == Coupling::dispatch) {
                    lower_(ip) = 0.0;
                    upper_(ip) = cap * pv.profile[t] / phases;
                }
                const int iq = layout_.pv_q(t, static_cast<int>(k), p);
                if (iq >= 0) {
                    if (pv.q_min_pu) lower_(iq) = *pv.q_min_pu / phases;
                    if (pv.q_max_pu) upper_(iq) = *pv.q_max_pu / phases;
                }
            }
        }
    }

    // initial point: flat balanced voltages, everything else at zero
    x0_ = Eigen::VectorXd::Zero(layout_.size());
    const PhaseVoltage flat = grid.slack_voltage_pu();
    for (int t = 0; t < grid.horizon(); ++t) {
        for (int n = 0; n < grid.bus_count(); ++n) {
            if (n == grid.slack_index()) continue;
            for (int p = 0; p < kPhaseCount; ++p) {
                x0_(layout_.u_re(t, n, p)) = flat[p].real();
                x0_(layout_.u_im(t, n, p)) = flat[p].imag();
            }
        }
    }
}

void OpfProblem::check_dim(const Eigen::VectorXd& x) const {
    if (x.size() != layout_.size()) {
        throw DimensionMismatch(fmt::format("expected {} decision variables, got {}",
                                            layout_.size(), x.size()));
    }
}

double OpfProblem::eval_f(const Eigen::VectorXd& x) const {
    check_dim(x);
    return objective_.eval(x);
}

Eigen::VectorXd OpfProblem::eval_grad(const Eigen::VectorXd& x) const {
    check_dim(x);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(layout_.size());
    objective_.add_gradient(x, g);
    return g;
}

Eigen::VectorXd OpfProblem::eval_eq(const Eigen::VectorXd& x) const {
    check_dim(x);
    Eigen::VectorXd r(num_eq());
    for (std::size_t k = 0; k < eq_rows_.size(); ++k) r(static_cast<int>(k)) = eq_rows_[k].eval(x);
    return r;
}

Eigen::VectorXd OpfProblem::eval_ineq(const Eigen::VectorXd& x) const {
    check_dim(x);
    Eigen::VectorXd r(num_ineq());
    for (std::size_t k = 0; k < ineq_rows_.size(); ++k) r(static_cast<int>(k)) = ineq_rows_[k].eval(x);
    return r;
}

std::vector<std::pair<int, int>> OpfProblem::jac_eq_structure() const {
    std::vector<std::pair<int, int>> s;
    for (std::size_t k = 0; k < eq_rows_.size(); ++k) {
        eq_rows_[k].grad_structure(static_cast<int>(k), s);
    }
    return s;
}

std::vector<std::pair<int, int>> OpfProblem::jac_ineq_structure() const {
    std::vector<std::pair<int, int>> s;
    for (std::size_t k = 0; k < ineq_rows_.size(); ++k) {
        ineq_rows_[k].grad_structure(static_cast<int>(k), s);
    }
    return s;
}

void OpfProblem::eval_jac_eq(const Eigen::VectorXd& x, std::vector<double>& values) const {
    check_dim(x);
    values.clear();
    for (const auto& row : eq_rows_) row.grad_values(x, values);
}

void OpfProblem::eval_jac_ineq(const Eigen::VectorXd& x, std::vector<double>& values) const {
    check_dim(x);
    values.clear();
    for (const auto& row : ineq_rows_) row.grad_values(x, values);
}

std::vector<std::pair<int, int>> OpfProblem::hess_structure() const {
    std::vector<std::pair<int, int>> s;
    objective_.hess_structure(s);
    for (const auto& row : eq_rows_) row.hess_structure(s);
    for (const auto& row : ineq_rows_) row.hess_structure(s);
    return s;
}

void OpfProblem::eval_hess(const Eigen::VectorXd& x, double sigma, const Eigen::VectorXd& y_eq,
                           const Eigen::VectorXd& z_ineq, std::vector<double>& values) const {
    check_dim(x);
    values.clear();
    objective_.hess_values(sigma, values);
    for (std::size_t k = 0; k < eq_rows_.size(); ++k) {
        eq_rows_[k].hess_values(y_eq(static_cast<int>(k)), values);
    }
    for (std::size_t k = 0; k < ineq_rows_.size(); ++k) {
        ineq_rows_[k].hess_values(z_ineq(static_cast<int>(k)), values);
    }
}

OpfProblem build_power_voltage(const Grid& grid, const OpfOptions& options) {
    return OpfProblem(grid, Formulation::power_voltage, options);
}

OpfProblem build_current_voltage(const Grid& grid, const OpfOptions& options) {
    return OpfProblem(grid, Formulation::current_voltage, options);
}

OpfProblem build_opf(const Grid& grid, Formulation formulation, const OpfOptions& options) {
    return OpfProblem(grid, formulation, options);
}

} // namespace triopf
