#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "triopf/errors.hpp"
#include "triopf/powerflow.hpp"

using namespace triopf;

namespace {

/// Balanced 2-bus network with diagonal per-phase line impedance z_pu.
NetworkModel two_bus_diagonal(double r_pu, double x_pu, double p_load_pu) {
    NetworkModel net;
    net.buses = {{1, BusKind::slack, 0.4}, {2, BusKind::pq, 0.4}};
    const double z_base = 0.4 * 0.4 / 1.0;
    Line ln = fixtures::lv_cable(1, 2, 1.0, r_pu * z_base, x_pu * z_base, 1.0);
    ln.r0_ohm_per_km = ln.r1_ohm_per_km; // equal sequences: diagonal phase matrix
    ln.x0_ohm_per_km = ln.x1_ohm_per_km;
    net.lines = {ln};
    const double kw = p_load_pu * (1.0 / 3.0) * 1e3;
    net.loads = {fixtures::flat_load(2, {kw, kw, kw}, {0.0, 0.0, 0.0})};
    return net;
}

double max_voltage_gap(const std::vector<PhaseVoltage>& a, const Eigen::VectorXcd& b) {
    double worst = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) {
        for (int p = 0; p < 3; ++p) {
            worst = std::max(worst, std::abs(a[n][p] - b(3 * n + p)));
        }
    }
    return worst;
}

} // namespace

TEST_CASE("no load solves in one evaluation to slack voltages") {
    NetworkModel net = fixtures::feeder2();
    net.loads.clear();
    const Grid g = Grid::prepare(net);
    const PfSolution sol = solve_pf(g, InjectionSet{Eigen::Matrix3Xcd::Zero(3, 2)});
    REQUIRE(sol.converged);
    CHECK(sol.iterations[0] == 1);
    const PhaseVoltage want = g.slack_voltage_pu();
    for (int n = 0; n < 2; ++n) {
        for (int p = 0; p < 3; ++p) {
            CHECK(std::abs(sol.voltages[0][n][p] - want[p]) < 1e-14);
        }
    }
}

TEST_CASE("two-bus balanced case matches the scalar fixed point") {
    const Grid g = Grid::prepare(two_bus_diagonal(0.01, 0.01, 0.1));
    const PfSolution sol = solve_pf(g, injections_from_loads(g), PfOptions{1e-12, 50, true});
    REQUIRE(sol.converged);

    // scalar iteration V = U_s - Z conj(S_load / V), decoupled per phase here
    const Complex z{0.01, 0.01};
    const Complex s_load{0.1, 0.0};
    const PhaseVoltage us = g.slack_voltage_pu();
    for (int p = 0; p < 3; ++p) {
        Complex v = us[p];
        for (int k = 0; k < 300; ++k) {
            v = us[p] - z * std::conj(s_load / v);
        }
        CHECK(std::abs(sol.voltages[0][1][p] - v) < 1e-10);
    }
}

TEST_CASE("newton matches the fixed-point oracle on the suite feeders") {
    for (const auto& net : {fixtures::feeder2(), fixtures::feeder4(), fixtures::feeder15()}) {
        const Grid g = Grid::prepare(net);
        const InjectionSet inj = injections_from_loads(g);
        const PfSolution sol = solve_pf(g, inj, PfOptions{1e-10, 50, true});
        REQUIRE(sol.converged);
        for (int t = 0; t < g.horizon(); ++t) {
            const auto ref = oracle::fixed_point_pf(g, inj[t]);
            REQUIRE(ref.converged);
            CHECK(max_voltage_gap(sol.voltages[t], ref.v) < 1e-8);
        }
    }
}

TEST_CASE("hopeless loading reports non-convergence") {
    const Grid g = Grid::prepare(two_bus_diagonal(0.01, 0.01, 100.0));
    const PfSolution sol = solve_pf(g, injections_from_loads(g));
    CHECK_FALSE(sol.converged);
    CHECK(sol.iterations[0] <= 51);
}

TEST_CASE("mismatch at a converged point is tiny") {
    const Grid g = Grid::prepare(fixtures::feeder4());
    const InjectionSet inj = injections_from_loads(g);
    const PfSolution sol = solve_pf(g, inj);
    REQUIRE(sol.converged);
    const Eigen::VectorXd r = power_mismatch(g, stack_voltages(sol.voltages[0]), inj[0]);
    CHECK(r.lpNorm<Eigen::Infinity>() <= 1e-8);
}

TEST_CASE("flat-start mismatch is the negated injection") {
    const Grid g = Grid::prepare(fixtures::feeder4());
    const InjectionSet inj = injections_from_loads(g);
    std::vector<PhaseVoltage> flat(g.bus_count(), slack_voltage(1.0));
    const Eigen::VectorXd r = power_mismatch(g, stack_voltages(flat), inj[0]);
    int k = 0;
    for (int n = 0; n < g.bus_count(); ++n) {
        if (n == g.slack_index()) continue;
        for (int p = 0; p < 3; ++p, ++k) {
            CHECK(r(k) == doctest::Approx(g.load_p_pu(n, p, 0)).epsilon(1e-12));
            CHECK(r(9 + k) == doctest::Approx(g.load_q_pu(n, p, 0)).epsilon(1e-12));
        }
    }
}

TEST_CASE("jacobian matches central differences") {
    const Grid g = Grid::prepare(fixtures::feeder4());
    const InjectionSet inj = injections_from_loads(g);
    const PfSolution sol = solve_pf(g, inj);
    REQUIRE(sol.converged);

    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> dist(-0.01, 0.01);
    Eigen::VectorXcd v = stack_voltages(sol.voltages[0]);
    for (int n = 0; n < g.bus_count(); ++n) {
        if (n == g.slack_index()) continue;
        for (int p = 0; p < 3; ++p) v(3 * n + p) += Complex{dist(gen), dist(gen)};
    }

    const Eigen::MatrixXd jac = pf_jacobian(g, v);
    const int m = static_cast<int>(jac.rows()) / 2;
    const double h = 1e-6;
    int col = 0;
    for (int part = 0; part < 2; ++part) {
        int k = 0;
        for (int n = 0; n < g.bus_count(); ++n) {
            if (n == g.slack_index()) continue;
            for (int p = 0; p < 3; ++p, ++k, ++col) {
                Eigen::VectorXcd vp = v, vm = v;
                const Complex step = part == 0 ? Complex{h, 0.0} : Complex{0.0, h};
                vp(3 * n + p) += step;
                vm(3 * n + p) -= step;
                const Eigen::VectorXd fd =
                    (power_mismatch(g, vp, inj[0]) - power_mismatch(g, vm, inj[0])) / (2.0 * h);
                for (int r = 0; r < 2 * m; ++r) {
                    const double denom = std::max(1.0, std::abs(fd(r)));
                    CHECK(std::abs(jac(r, col) - fd(r)) / denom < 1e-5);
                }
            }
        }
    }
}

TEST_CASE("branch flow vanishes without voltage difference") {
    const Grid g = Grid::prepare(fixtures::feeder2());
    std::vector<PhaseVoltage> same(2, slack_voltage(1.0));
    const BranchFlow f = branch_flow(g.branches()[0], stack_voltages(same));
    for (int p = 0; p < 3; ++p) {
        CHECK(std::abs(f.from[p]) < 1e-15);
        CHECK(std::abs(f.to[p]) < 1e-15);
    }
}

TEST_CASE("branch loss agrees with the current-based oracle") {
    const Grid g = Grid::prepare(fixtures::feeder2());
    const PfSolution sol = solve_pf(g, injections_from_loads(g), PfOptions{1e-12, 50, true});
    REQUIRE(sol.converged);
    const Eigen::VectorXcd v = stack_voltages(sol.voltages[0]);

    const auto& br = g.branches()[0];
    const BranchFlow f = branch_flow(br, v);
    double loss = 0.0;
    for (int p = 0; p < 3; ++p) loss += f.from[p].real() + f.to[p].real();
    CHECK(loss >= 0.0);

    std::array<oracle::Cx, 3> vi, vj;
    oracle::Mat3 ys;
    for (int p = 0; p < 3; ++p) {
        vi[p] = v(3 * br.from + p);
        vj[p] = v(3 * br.to + p);
        for (int q = 0; q < 3; ++q) ys[p][q] = br.y_series(p, q);
    }
    CHECK(loss == doctest::Approx(oracle::branch_loss(vi, vj, ys)).epsilon(1e-10));
}

TEST_CASE("slack output covers load plus losses") {
    const Grid g = Grid::prepare(fixtures::feeder15());
    const InjectionSet inj = injections_from_loads(g);
    const PfSolution sol = solve_pf(g, inj, PfOptions{1e-10, 50, true});
    REQUIRE(sol.converged);
    for (int t : {0, 12, 19}) {
        const Eigen::VectorXcd v = stack_voltages(sol.voltages[t]);
        const Eigen::VectorXcd current = g.ybus() * v;
        double slack_p = 0.0;
        for (int p = 0; p < 3; ++p) {
            const int e = 3 * g.slack_index() + p;
            slack_p += (v(e) * std::conj(current(e))).real();
        }
        double load_p = 0.0;
        for (int n = 0; n < g.bus_count(); ++n) {
            for (int p = 0; p < 3; ++p) load_p += g.load_p_pu(n, p, t);
        }
        double losses = 0.0;
        for (const auto& br : g.branches()) {
            const BranchFlow f = branch_flow(br, v);
            for (int p = 0; p < 3; ++p) losses += f.from[p].real() + f.to[p].real();
        }
        CHECK(slack_p == doctest::Approx(load_p + losses).epsilon(1e-8));
    }
}

TEST_CASE("final newton steps contract quadratically") {
    const Grid g = Grid::prepare(fixtures::feeder15());
    const PfSolution sol = solve_pf(g, injections_from_loads(g), PfOptions{1e-12, 50, true});
    REQUIRE(sol.converged);
    const auto& hist = sol.residual_history[19]; // evening peak, heaviest loading
    REQUIRE(hist.size() >= 3);
    int checked = 0;
    for (std::size_t k = hist.size() - 3; k + 1 < hist.size(); ++k) {
        if (hist[k + 1] < 1e-14) continue; // at rounding floor
        CHECK(hist[k + 1] <= 10.0 * hist[k] * hist[k]);
        ++checked;
    }
    CHECK(checked >= 1);
}

TEST_CASE("per-unit voltages do not depend on the power base") {
    NetworkModel a = fixtures::feeder4();
    NetworkModel b = a;
    b.base_mva = 5.0;
    const Grid ga = Grid::prepare(a);
    const Grid gb = Grid::prepare(b);
    const PfSolution sa = solve_pf(ga, injections_from_loads(ga), PfOptions{1e-12, 50, true});
    const PfSolution sb = solve_pf(gb, injections_from_loads(gb), PfOptions{1e-12, 50, true});
    REQUIRE(sa.converged);
    REQUIRE(sb.converged);
    for (int n = 0; n < ga.bus_count(); ++n) {
        for (int p = 0; p < 3; ++p) {
            CHECK(std::abs(sa.voltages[0][n][p] - sb.voltages[0][n][p]) < 1e-10);
        }
    }
}

TEST_CASE("injection set must cover the horizon") {
    const Grid g = Grid::prepare(fixtures::feeder15());
    CHECK_THROWS_AS(solve_pf(g, InjectionSet{Eigen::Matrix3Xcd::Zero(3, 15)}), DimensionMismatch);
}
