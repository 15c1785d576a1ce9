#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "triopf/errors.hpp"
#include "triopf/opf.hpp"
#include "triopf/powerflow.hpp"

using namespace triopf;
using namespace fixtures;
using Eigen::VectorXd;

namespace {

SolverOptions tight_opts() {
    SolverOptions o;
    o.tolerance = 1e-8;
    o.max_iterations = 400;
    return o;
}

int count_kind(const std::vector<ConstraintInfo>& infos, ConstraintInfo::Kind kind) {
    int c = 0;
    for (const auto& i : infos) c += i.kind == kind ? 1 : 0;
    return c;
}

// Random point near the flat start, kept strictly inside variable bounds.
VectorXd random_interior(const OpfProblem& prob, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-0.05, 0.05);
    VectorXd x = prob.initial_point();
    const VectorXd lo = prob.lower_bounds();
    const VectorXd up = prob.upper_bounds();
    for (int i = 0; i < x.size(); ++i) {
        x(i) += u(rng);
        if (std::isfinite(lo(i)) && std::isfinite(up(i))) {
            const double pad = 0.05 * (up(i) - lo(i));
            x(i) = std::clamp(x(i), lo(i) + pad, up(i) - pad);
        } else if (std::isfinite(lo(i))) {
            x(i) = std::max(x(i), lo(i) + 0.01);
        } else if (std::isfinite(up(i))) {
            x(i) = std::min(x(i), up(i) - 0.01);
        }
    }
    return x;
}

// Total PV dispatch of a solution in kW, all units, phases, and periods.
double total_dispatch_kw(const OpfSolution& sol) {
    double total = 0.0;
    for (const auto& m : sol.pv_p_kw) total += m.sum();
    return total;
}

} // namespace

TEST_CASE("two-bus feeder emits the documented equality-row census") {
    NetworkModel net = feeder2();
    net.pv_units.clear(); // bare network: branch definitions and nodal balance only
    const Grid g = Grid::prepare(net);

    const OpfProblem plain = build_power_voltage(g);
    // 1 branch * 3 phases * 2 directions * 2 rows + 2 buses * 3 phases * 2 rows
    CHECK(plain.num_eq() == 24);

    const Grid g2 = Grid::prepare(feeder2());
    OpfOptions capacity;
    capacity.coupling = Coupling::capacity;
    CHECK(build_power_voltage(g2, capacity).num_eq() == 27); // + 3 capacity links

    OpfOptions dispatch;
    dispatch.coupling = Coupling::dispatch;
    CHECK(build_power_voltage(g2, dispatch).num_eq() == 26); // + 2 phase ties

    dispatch.tie_three_phase = false;
    CHECK(build_power_voltage(g2, dispatch).num_eq() == 24);
}

TEST_CASE("current formulation keeps passive buses linear and counts rows accordingly") {
    const Grid g = Grid::prepare(feeder2());
    OpfOptions opt;
    opt.coupling = Coupling::capacity;
    const OpfProblem prob = build_current_voltage(g, opt);
    // 6 current definitions + 6 slack coupling + 6 load-bus coupling + 3 links
    CHECK(prob.num_eq() == 21);
    CHECK(count_kind(prob.eq_info(), ConstraintInfo::Kind::current_def) == 6);
    CHECK(count_kind(prob.eq_info(), ConstraintInfo::Kind::power_balance) == 12);
    CHECK(count_kind(prob.eq_info(), ConstraintInfo::Kind::current_balance) == 0);

    // the 4-bus feeder has pass-through buses without load only in modified form
    NetworkModel net = feeder4();
    net.loads.erase(net.loads.begin()); // bus 2 becomes passive
    const Grid g4 = Grid::prepare(net);
    const OpfProblem prob4 = build_current_voltage(g4, opt);
    CHECK(count_kind(prob4.eq_info(), ConstraintInfo::Kind::current_balance) == 6);
}

TEST_CASE("zero-load network is feasible at the flat start with zero residual") {
    NetworkModel net = feeder2();
    net.loads.clear();
    net.pv_units.clear();
    const Grid g = Grid::prepare(net);
    for (const Formulation f : {Formulation::power_voltage, Formulation::current_voltage}) {
        const OpfProblem prob = build_opf(g, f);
        const VectorXd x0 = prob.initial_point();
        const VectorXd ce = prob.eval_eq(x0);
        CHECK(ce.lpNorm<Eigen::Infinity>() <= 1e-12);
        const VectorXd ci = prob.eval_ineq(x0);
        for (int k = 0; k < ci.size(); ++k) CHECK(ci(k) <= 0.0);
    }
}

TEST_CASE("branch-flow definitions agree with the power-flow module formula") {
    const Grid g = Grid::prepare(feeder4());
    const auto pf = solve_pf(g, injections_from_loads(g));
    REQUIRE(pf.converged);

    OpfOptions opt;
    opt.coupling = Coupling::dispatch; // keep dispatch variables bounded, not linked
    const OpfProblem prob = build_power_voltage(g, opt);
    const VariableLayout& lay = prob.layout();

    VectorXd x = prob.initial_point();
    for (int n = 0; n < g.bus_count(); ++n) {
        if (n == g.slack_index()) continue;
        for (int p = 0; p < kPhaseCount; ++p) {
            x(lay.u_re(0, n, p)) = pf.voltages[0][n][p].real();
            x(lay.u_im(0, n, p)) = pf.voltages[0][n][p].imag();
        }
    }
    const Eigen::VectorXcd v = stack_voltages(pf.voltages[0]);
    for (int b = 0; b < g.branch_count(); ++b) {
        const BranchFlow bf = branch_flow(g.branches()[b], v);
        for (int p = 0; p < kPhaseCount; ++p) {
            x(lay.flow_p(0, b, p, 0)) = bf.from[p].real();
            x(lay.flow_q(0, b, p, 0)) = bf.from[p].imag();
            x(lay.flow_p(0, b, p, 1)) = bf.to[p].real();
            x(lay.flow_q(0, b, p, 1)) = bf.to[p].imag();
        }
    }
    const VectorXd residual = prob.eval_eq(x);
    for (std::size_t k = 0; k < prob.eq_info().size(); ++k) {
        if (prob.eq_info()[k].kind == ConstraintInfo::Kind::flow_def) {
            CHECK(std::abs(residual(static_cast<int>(k))) <= 1e-12);
        }
    }
}

TEST_CASE("series-current definitions vanish at currents computed from voltages") {
    const Grid g = Grid::prepare(feeder4());
    const auto pf = solve_pf(g, injections_from_loads(g));
    REQUIRE(pf.converged);

    const OpfProblem prob = build_current_voltage(g);
    const VariableLayout& lay = prob.layout();
    VectorXd x = prob.initial_point();
    for (int n = 0; n < g.bus_count(); ++n) {
        if (n == g.slack_index()) continue;
        for (int p = 0; p < kPhaseCount; ++p) {
            x(lay.u_re(0, n, p)) = pf.voltages[0][n][p].real();
            x(lay.u_im(0, n, p)) = pf.voltages[0][n][p].imag();
        }
    }
    for (int b = 0; b < g.branch_count(); ++b) {
        const BranchData& bd = g.branches()[b];
        Eigen::Vector3cd vi, vj;
        for (int p = 0; p < kPhaseCount; ++p) {
            vi(p) = pf.voltages[0][bd.from][p];
            vj(p) = pf.voltages[0][bd.to][p];
        }
        const Eigen::Vector3cd current = bd.y_series * (vi - vj);
        for (int p = 0; p < kPhaseCount; ++p) {
            x(lay.cur_re(0, b, p)) = current(p).real();
            x(lay.cur_im(0, b, p)) = current(p).imag();
        }
    }
    const VectorXd residual = prob.eval_eq(x);
    for (std::size_t k = 0; k < prob.eq_info().size(); ++k) {
        if (prob.eq_info()[k].kind == ConstraintInfo::Kind::current_def) {
            CHECK(std::abs(residual(static_cast<int>(k))) <= 1e-12);
        }
    }
}

TEST_CASE("hand-built Jacobians match central differences at random interior points") {
    for (NetworkModel (*make)() : {&feeder2, &feeder4}) {
        const Grid g = Grid::prepare(make());
        for (const Formulation f : {Formulation::power_voltage, Formulation::current_voltage}) {
            const OpfProblem prob = build_opf(g, f);
            for (unsigned seed = 1; seed <= 5; ++seed) {
                const VectorXd x = random_interior(prob, seed);
                const auto rep = check_derivatives(prob, x, 1e-6);
                INFO(to_string(f), " seed ", seed, " worst ", rep.worst_part, " (",
                     rep.worst_row, ",", rep.worst_col, ")");
                CHECK(rep.max_rel_error <= 1e-5);
            }
        }
    }
}

TEST_CASE("evaluations are pure: duplicate calls are bit-identical") {
    const Grid g = Grid::prepare(feeder4());
    const OpfProblem prob = build_power_voltage(g);
    const VectorXd x = random_interior(prob, 7);
    CHECK(prob.eval_f(x) == prob.eval_f(x));
    CHECK(prob.eval_eq(x) == prob.eval_eq(x));
    CHECK(prob.eval_ineq(x) == prob.eval_ineq(x));
    std::vector<double> a, b;
    prob.eval_jac_eq(x, a);
    prob.eval_jac_eq(x, b);
    CHECK(a == b);
}

TEST_CASE("hosting objective is zero when nothing is dispatched") {
    const Grid g = Grid::prepare(feeder2());
    const OpfProblem prob = build_power_voltage(g);
    CHECK(prob.eval_f(prob.initial_point()) == 0.0);
}

TEST_CASE("wrong decision-vector length is rejected") {
    const Grid g = Grid::prepare(feeder2());
    const OpfProblem prob = build_power_voltage(g);
    CHECK_THROWS_AS(prob.eval_f(VectorXd::Zero(prob.n() + 1)), DimensionMismatch);
    CHECK_THROWS_AS(prob.eval_eq(VectorXd::Zero(prob.n() - 1)), DimensionMismatch);
}

TEST_CASE("an unrated branch stops problem construction") {
    NetworkModel net = feeder2();
    net.lines[0].s_max_pu = 0.0;
    const Grid g = Grid::prepare(net);
    CHECK_THROWS_AS(build_power_voltage(g), MissingLimit);
    CHECK_THROWS_AS(build_current_voltage(g), MissingLimit);
}

TEST_CASE("layout names every position exactly once") {
    const Grid g = Grid::prepare(feeder4());
    OpfOptions opt;
    opt.coupling = Coupling::capacity;
    for (const Formulation f : {Formulation::power_voltage, Formulation::current_voltage}) {
        const VariableLayout lay(g, f, opt);
        std::set<std::string> names;
        for (int i = 0; i < lay.size(); ++i) {
            CHECK(!lay.describe(i).empty());
            names.insert(lay.describe(i));
        }
        CHECK(static_cast<int>(names.size()) == lay.size());
    }
}

TEST_CASE("unbalance rows reproduce the sequence-component identity") {
    const Grid g = Grid::prepare(feeder2());
    const OpfProblem prob = build_power_voltage(g);
    const VariableLayout& lay = prob.layout();

    const PhaseVoltage v = {Complex{1.02 * std::cos(0.017), 1.02 * std::sin(0.017)},
                            Complex{0.97 * std::cos(-2.11), 0.97 * std::sin(-2.11)},
                            Complex{1.01 * std::cos(2.13), 1.01 * std::sin(2.13)}};
    VectorXd x = prob.initial_point();
    const int n = g.bus_index(2);
    for (int p = 0; p < kPhaseCount; ++p) {
        x(lay.u_re(0, n, p)) = v[p].real();
        x(lay.u_im(0, n, p)) = v[p].imag();
    }
    const VectorXd ci = prob.eval_ineq(x);
    int row = -1;
    for (std::size_t k = 0; k < prob.ineq_info().size(); ++k) {
        const auto& info = prob.ineq_info()[k];
        if (info.kind == ConstraintInfo::Kind::unbalance && info.bus == n) row = static_cast<int>(k);
    }
    REQUIRE(row >= 0);

    // the row is |3 V2|^2 - VUF_max^2 |3 V1|^2, so 9 (|V2|^2 - VUF_max^2 |V1|^2)
    const auto seq = sequence_components(v);
    const double vmax = g.limits().vuf_max;
    const double expected =
        9.0 * (std::norm(seq[2]) - vmax * vmax * std::norm(seq[1]));
    CHECK(ci(row) == doctest::Approx(expected).epsilon(1e-12));

    // sign flips exactly at the unbalance limit
    CHECK((ci(row) <= 0.0) == (vuf(v) <= vmax));
}

TEST_CASE("both formulations solve the nameplate-limited feeder to the same answer") {
    const Grid g = Grid::prepare(feeder2());
    OpfOptions opt;
    opt.coupling = Coupling::capacity;
    const OpfProblem pv = build_power_voltage(g, opt);
    const OpfProblem cv = build_current_voltage(g, opt);
    const auto rep_pv = solve(pv, tight_opts(), pv.initial_point());
    const auto rep_cv = solve(cv, tight_opts(), cv.initial_point());
    REQUIRE(rep_pv.status == SolveStatus::optimal);
    REQUIRE(rep_cv.status == SolveStatus::optimal);

    const auto sol_pv = extract_solution(pv, rep_pv);
    const auto sol_cv = extract_solution(cv, rep_cv);

    // total load is 30 kW and the line is strong, so the 30 kW nameplate binds
    CHECK(sol_pv.capacity_kw[0] == doctest::Approx(30.0).epsilon(1e-4));
    CHECK(sol_cv.capacity_kw[0] == doctest::Approx(30.0).epsilon(1e-4));
    CHECK(std::abs(sol_pv.objective - sol_cv.objective) <=
          1e-4 * std::max(1.0, std::abs(sol_pv.objective)));
    for (int n = 0; n < g.bus_count(); ++n) {
        for (int p = 0; p < kPhaseCount; ++p) {
            CHECK(std::abs(sol_pv.voltages[0][n][p] - sol_cv.voltages[0][n][p]) <= 1e-4);
        }
    }
}

TEST_CASE("formulations agree on the voltage-limited feeder and report the binding rows") {
    const Grid g = Grid::prepare(feeder4());
    OpfOptions opt;
    opt.coupling = Coupling::capacity;
    const OpfProblem pv = build_power_voltage(g, opt);
    const OpfProblem cv = build_current_voltage(g, opt);
    const auto rep_pv = solve(pv, tight_opts(), pv.initial_point());
    const auto rep_cv = solve(cv, tight_opts(), cv.initial_point());
    REQUIRE(rep_pv.status == SolveStatus::optimal);
    REQUIRE(rep_cv.status == SolveStatus::optimal);

    const auto sol_pv = extract_solution(pv, rep_pv);
    const auto sol_cv = extract_solution(cv, rep_cv);

    const double rel = std::abs(sol_pv.objective - sol_cv.objective) /
                       std::max(1.0, std::abs(sol_pv.objective));
    CHECK(rel <= 1e-4);
    for (int n = 0; n < g.bus_count(); ++n) {
        for (int p = 0; p < kPhaseCount; ++p) {
            CHECK(std::abs(sol_pv.voltages[0][n][p] - sol_cv.voltages[0][n][p]) <= 1e-4);
        }
    }

    // far below nameplate, the network must be what limits the dispatch
    CHECK(sol_pv.capacity_kw[0] < 190.0);
    bool network_limit_active = false;
    for (const auto& label : sol_pv.binding) {
        network_limit_active |= label.find("voltage-upper") != std::string::npos ||
                                label.find("unbalance") != std::string::npos ||
                                label.find("thermal") != std::string::npos;
    }
    CHECK(network_limit_active);

    // KKT residuals of the reported solution stay within the solve tolerance
    CHECK(sol_pv.kkt.stationarity <= 1e-6);
    CHECK(sol_pv.kkt.feasibility <= 1e-6);
    CHECK(sol_pv.kkt.complementarity <= 1e-6);
}

TEST_CASE("replaying OPF dispatch through the power-flow solver reproduces its voltages") {
    const Grid g = Grid::prepare(feeder4());
    OpfOptions opt;
    opt.coupling = Coupling::capacity;
    const OpfProblem prob = build_power_voltage(g, opt);
    const auto rep = solve(prob, tight_opts(), prob.initial_point());
    REQUIRE(rep.status == SolveStatus::optimal);
    const auto sol = extract_solution(prob, rep);

    InjectionSet inj = injections_from_loads(g);
    for (std::size_t k = 0; k < g.pv_units().size(); ++k) {
        const int bus = g.pv_units()[k].bus;
        for (int p = 0; p < kPhaseCount; ++p) {
            for (int t = 0; t < g.horizon(); ++t) {
                inj[t](p, bus) += Complex{g.kw_to_pu(sol.pv_p_kw[k](p, t)),
                                          g.kw_to_pu(sol.pv_q_kvar[k](p, t))};
            }
        }
    }
    PfOptions pf_opts;
    pf_opts.tolerance = 1e-10;
    const auto pf = solve_pf(g, inj, pf_opts);
    REQUIRE(pf.converged);
    for (int t = 0; t < g.horizon(); ++t) {
        for (int n = 0; n < g.bus_count(); ++n) {
            for (int p = 0; p < kPhaseCount; ++p) {
                CHECK(std::abs(std::abs(sol.voltages[t][n][p]) - std::abs(pf.voltages[t][n][p])) <=
                      1e-6);
            }
        }
    }
}

TEST_CASE("solution extraction is a faithful round trip") {
    const Grid g = Grid::prepare(feeder2());
    OpfOptions opt;
    opt.coupling = Coupling::capacity;
    const OpfProblem prob = build_power_voltage(g, opt);
    const auto rep = solve(prob, tight_opts(), prob.initial_point());
    REQUIRE(rep.status == SolveStatus::optimal);
    const auto sol = extract_solution(prob, rep);

    CHECK(sol.raw == rep.x);
    CHECK(sol.objective == prob.eval_f(rep.x));
    CHECK(sol.status == SolveStatus::optimal);

    const VariableLayout& lay = prob.layout();
    const int n = g.bus_index(2);
    for (int p = 0; p < kPhaseCount; ++p) {
        CHECK(sol.voltages[0][n][p].real() == rep.x(lay.u_re(0, n, p)));
        CHECK(sol.voltages[0][n][p].imag() == rep.x(lay.u_im(0, n, p)));
        // slack voltages are the fixed reference phasors
        CHECK(sol.voltages[0][g.slack_index()][p] == g.slack_voltage_pu()[p]);
    }
    CHECK(sol.capacity_kw[0] == doctest::Approx(g.pu_to_kw(rep.x(lay.capacity(0)))));
    CHECK(total_dispatch_kw(sol) == doctest::Approx(g.pu_to_kw(-sol.objective)).epsilon(1e-9));
}

TEST_CASE("dispatch coupling honours per-period bounds instead of linking rows") {
    const Grid g = Grid::prepare(feeder2());
    OpfOptions opt;
    opt.coupling = Coupling::dispatch;
    const OpfProblem prob = build_power_voltage(g, opt);
    CHECK(count_kind(prob.eq_info(), ConstraintInfo::Kind::capacity_link) == 0);

    const auto rep = solve(prob, tight_opts(), prob.initial_point());
    REQUIRE(rep.status == SolveStatus::optimal);
    const auto sol = extract_solution(prob, rep);
    // same strong network: each phase saturates its 10 kW share of the nameplate
    for (int p = 0; p < kPhaseCount; ++p) {
        CHECK(sol.pv_p_kw[0](p, 0) == doctest::Approx(10.0).epsilon(1e-4));
    }
}
