// Suite feeders used across the test binaries. feeder2 is a minimal LV stub,
// feeder4 is a chain with one PV sized so the upper voltage limit binds, and
// feeder15 is an MV/LV feeder with a 24-period horizon and unbalanced loads.
#pragma once

#include <cmath>

#include "triopf/network.hpp"

namespace fixtures {

using namespace triopf;

inline Line lv_cable(int from, int to, double km, double r1, double x1, double imax) {
    Line ln;
    ln.from_bus = from;
    ln.to_bus = to;
    ln.length_km = km;
    ln.r1_ohm_per_km = r1;
    ln.x1_ohm_per_km = x1;
    ln.r0_ohm_per_km = 4.0 * r1;
    ln.x0_ohm_per_km = 4.0 * x1;
    ln.max_i_ka = imax;
    return ln;
}

inline Load flat_load(int bus, std::array<double, 3> p_kw, std::array<double, 3> q_kvar, int horizon = 1) {
    Load ld;
    ld.bus = bus;
    for (int p = 0; p < 3; ++p) {
        ld.p_kw[p].assign(horizon, p_kw[p]);
        ld.q_kvar[p].assign(horizon, q_kvar[p]);
    }
    return ld;
}

/// Two buses, one cable, one unbalanced load, one PV.
inline NetworkModel feeder2() {
    NetworkModel net;
    net.base_mva = 1.0;
    net.horizon = 1;
    net.u_slack = 1.0;
    net.buses = {{1, BusKind::slack, 0.4}, {2, BusKind::pq, 0.4}};
    net.lines = {lv_cable(1, 2, 0.5, 0.208, 0.080, 0.27)};
    net.loads = {flat_load(2, {10.0, 8.0, 12.0}, {2.0, 1.5, 3.0})};
    PvUnit pv;
    pv.bus = 2;
    pv.connection = PvConnection::three_phase;
    pv.p_max_kw = 30.0;
    pv.profile = {1.0};
    net.pv_units = {pv};
    return net;
}

/// Four-bus chain with one PV at the end sized so the 1.1 p.u. voltage cap
/// binds well below the unit's nameplate. VUF and thermal limits stay loose.
/// The voltage floor sits at 0.85 because the load-only profile dips to
/// 0.877 p.u.; a 0.9 floor would make zero-generation operation infeasible
/// and single-phase units cannot lift the phases they do not serve.
inline NetworkModel feeder4() {
    NetworkModel net;
    net.base_mva = 1.0;
    net.horizon = 1;
    net.u_slack = 1.0;
    net.buses = {{1, BusKind::slack, 0.4}, {2, BusKind::pq, 0.4}, {3, BusKind::pq, 0.4}, {4, BusKind::pq, 0.4}};
    net.lines = {
        lv_cable(1, 2, 0.4, 0.40, 0.10, 0.3),
        lv_cable(2, 3, 0.4, 0.40, 0.10, 0.3),
        lv_cable(3, 4, 0.4, 0.40, 0.10, 0.3),
    };
    net.loads = {
        flat_load(2, {6.0, 5.0, 7.0}, {1.5, 1.0, 2.0}),
        flat_load(3, {5.0, 6.0, 4.0}, {1.0, 1.5, 1.0}),
        flat_load(4, {3.0, 4.0, 5.0}, {0.5, 1.0, 1.5}),
    };
    PvUnit pv;
    pv.bus = 4;
    pv.connection = PvConnection::three_phase;
    pv.p_max_kw = 200.0;
    pv.profile = {1.0};
    net.pv_units = {pv};
    net.limits.u_min_pu = 0.85;
    net.limits.vuf_max = 0.05;
    return net;
}

/// Daily demand shape: base plus morning and evening peaks, range (0.35, 1].
inline double demand_shape(int t) {
    auto bump = [](double t_, double mu, double sigma) {
        const double u = (t_ - mu) / sigma;
        return std::exp(-u * u);
    };
    return 0.35 + 0.30 * bump(t, 8.0, 2.5) + 0.65 * bump(t, 19.5, 3.0);
}

/// Solar shape: half-sine between hours 6 and 18, zero at night.
inline double solar_shape(int t) {
    if (t <= 6 || t >= 18) return 0.0;
    return std::sin(kPi * (t - 6.0) / 12.0);
}

/// 10 kV slack behind a 0.4 MVA transformer feeding a 14-bus LV network,
/// 24-period unbalanced loads, five PV candidates at the feeder extremities.
inline NetworkModel feeder15() {
    NetworkModel net;
    net.base_mva = 1.0;
    net.horizon = 24;
    net.u_slack = 1.0;

    net.buses.push_back({1, BusKind::slack, 10.0});
    for (int id = 2; id <= 15; ++id) net.buses.push_back({id, BusKind::pq, 0.4});

    Transformer tr;
    tr.hv_bus = 1;
    tr.lv_bus = 2;
    tr.s_rated_mva = 0.4;
    tr.vk_percent = 4.0;
    tr.vkr_percent = 1.0;
    tr.hv_kv = 10.0;
    tr.lv_kv = 0.4;
    net.transformers = {tr};

    // spine, 150 mm2 cable
    const double r150 = 0.208, x150 = 0.080, i150 = 0.27;
    // laterals, 50 mm2 cable
    const double r50 = 0.642, x50 = 0.083, i50 = 0.142;
    net.lines = {
        lv_cable(2, 3, 0.08, r150, x150, i150),
        lv_cable(3, 4, 0.06, r150, x150, i150),
        lv_cable(4, 5, 0.06, r150, x150, i150),
        lv_cable(5, 6, 0.08, r150, x150, i150),
        lv_cable(6, 7, 0.06, r150, x150, i150),
        lv_cable(7, 8, 0.08, r150, x150, i150),
        lv_cable(3, 9, 0.05, r50, x50, i50),
        lv_cable(9, 10, 0.06, r50, x50, i50),
        lv_cable(4, 11, 0.04, r50, x50, i50),
        lv_cable(5, 12, 0.05, r50, x50, i50),
        lv_cable(12, 13, 0.06, r50, x50, i50),
        lv_cable(6, 14, 0.05, r50, x50, i50),
        lv_cable(8, 15, 0.04, r50, x50, i50),
    };

    for (int id = 3; id <= 15; ++id) {
        Load ld;
        ld.bus = id;
        for (int p = 0; p < 3; ++p) {
            const double peak_kw = 1.5 + 0.9 * ((id * 3 + p) % 5);
            ld.p_kw[p].resize(24);
            ld.q_kvar[p].resize(24);
            for (int t = 0; t < 24; ++t) {
                ld.p_kw[p][t] = peak_kw * demand_shape(t);
                ld.q_kvar[p][t] = 0.35 * ld.p_kw[p][t];
            }
        }
        net.loads.push_back(std::move(ld));
    }

    for (int bus : {8, 10, 13, 14, 15}) {
        PvUnit pv;
        pv.bus = bus;
        pv.connection = PvConnection::three_phase;
        pv.p_max_kw = 150.0;
        pv.profile.resize(24);
        for (int t = 0; t < 24; ++t) pv.profile[t] = solar_shape(t);
        net.pv_units.push_back(std::move(pv));
    }

    net.limits.u_min_pu = 0.9;
    net.limits.u_max_pu = 1.1;
    net.limits.vuf_max = 0.02;
    return net;
}

} // namespace fixtures
