#include "triopf/network.hpp"

#include <cmath>
#include <set>
#include <unordered_map>

#include <fmt/format.h>

#include "triopf/errors.hpp"
#include "triopf/ybus.hpp"

namespace triopf {

namespace {

bool finite(double v) { return std::isfinite(v); }

struct IdMap {
    std::unordered_map<int, int> index;
    bool has(int id) const { return index.count(id) != 0; }
    int at(int id) const { return index.at(id); }
};

IdMap build_id_map(const NetworkModel& net) {
    IdMap m;
    for (std::size_t i = 0; i < net.buses.size(); ++i) {
        m.index.emplace(net.buses[i].id, static_cast<int>(i));
    }
    return m;
}

} // namespace

std::vector<std::string> validate(const NetworkModel& net) {
    std::vector<std::string> issues;
    auto add = [&issues](std::string msg) { issues.push_back(std::move(msg)); };

    if (net.buses.empty()) add("network has no buses");
    if (!(net.base_mva > 0.0) || !finite(net.base_mva)) add("base_mva must be positive and finite");
    if (net.horizon < 1) add("horizon must be at least 1");
    if (!(net.u_slack > 0.0) || !finite(net.u_slack)) add("slack voltage magnitude must be positive");

    const auto& lim = net.limits;
    if (!(lim.u_min_pu > 0.0) || !(lim.u_min_pu < lim.u_max_pu)) {
        add(fmt::format("limits: need 0 < u_min < u_max, got [{}, {}]", lim.u_min_pu, lim.u_max_pu));
    }
    if (!(lim.vuf_max > 0.0)) add(fmt::format("limits: vuf_max must be positive, got {}", lim.vuf_max));

    int slack_count = 0;
    std::set<int> seen_ids;
    for (const auto& bus : net.buses) {
        if (!seen_ids.insert(bus.id).second) add(fmt::format("duplicate bus id {}", bus.id));
        if (bus.kind == BusKind::slack) ++slack_count;
        if (!(bus.base_kv > 0.0) || !finite(bus.base_kv)) {
            add(fmt::format("bus {}: base_kv must be positive", bus.id));
        }
    }
    if (slack_count == 0 && !net.buses.empty()) add("no slack bus");
    if (slack_count > 1) add("multiple slack buses");

    const IdMap ids = build_id_map(net);
    bool refs_ok = true;
    auto check_bus_ref = [&](int id, const std::string& what) {
        if (!ids.has(id)) {
            add(fmt::format("{} references nonexistent bus {}", what, id));
            refs_ok = false;
            return false;
        }
        return true;
    };

    for (std::size_t i = 0; i < net.lines.size(); ++i) {
        const auto& ln = net.lines[i];
        const std::string what = fmt::format("line {}-{}", ln.from_bus, ln.to_bus);
        bool from_ok = check_bus_ref(ln.from_bus, what);
        bool to_ok = check_bus_ref(ln.to_bus, what);
        if (ln.from_bus == ln.to_bus) add(fmt::format("{}: from_bus equals to_bus", what));
        if (!(ln.length_km > 0.0)) add(fmt::format("{}: length_km must be positive", what));
        if (!(ln.max_i_ka > 0.0)) add(fmt::format("{}: max_i_ka must be positive", what));
        for (double v : {ln.length_km, ln.r1_ohm_per_km, ln.x1_ohm_per_km, ln.r0_ohm_per_km,
                         ln.x0_ohm_per_km, ln.max_i_ka, ln.b_us_per_km}) {
            if (!finite(v)) {
                add(fmt::format("{}: non-finite parameter", what));
                break;
            }
        }
        if (ln.s_max_pu && !(*ln.s_max_pu >= 0.0 && finite(*ln.s_max_pu))) {
            add(fmt::format("{}: s_max override must be nonnegative", what));
        }
        if (from_ok && to_ok) {
            const double kv_f = net.buses[ids.at(ln.from_bus)].base_kv;
            const double kv_t = net.buses[ids.at(ln.to_bus)].base_kv;
            if (std::abs(kv_f - kv_t) > 1e-9 * std::max(kv_f, kv_t)) {
                add(fmt::format("{}: endpoints are at different voltage levels ({} kV vs {} kV)",
                                what, kv_f, kv_t));
            }
        }
    }

    for (const auto& tr : net.transformers) {
        const std::string what = fmt::format("transformer {}-{}", tr.hv_bus, tr.lv_bus);
        bool hv_ok = check_bus_ref(tr.hv_bus, what);
        bool lv_ok = check_bus_ref(tr.lv_bus, what);
        if (tr.hv_bus == tr.lv_bus) add(fmt::format("{}: hv_bus equals lv_bus", what));
        if (!(tr.s_rated_mva > 0.0)) add(fmt::format("{}: s_rated_mva must be positive", what));
        if (!(tr.vkr_percent > 0.0) || !(tr.vkr_percent <= tr.vk_percent)) {
            add(fmt::format("{}: need 0 < vkr_percent <= vk_percent, got vkr={} vk={}",
                            what, tr.vkr_percent, tr.vk_percent));
        }
        if (!(tr.hv_kv > 0.0) || !(tr.lv_kv > 0.0)) {
            add(fmt::format("{}: nameplate voltages must be positive", what));
        } else {
            // No off-nominal tap model: nameplate ratio must match the bus bases.
            if (hv_ok) {
                const double kv = net.buses[ids.at(tr.hv_bus)].base_kv;
                if (std::abs(tr.hv_kv - kv) > 1e-6 * kv) {
                    add(fmt::format("{}: hv_kv {} does not match hv bus base_kv {}", what, tr.hv_kv, kv));
                }
            }
            if (lv_ok) {
                const double kv = net.buses[ids.at(tr.lv_bus)].base_kv;
                if (std::abs(tr.lv_kv - kv) > 1e-6 * kv) {
                    add(fmt::format("{}: lv_kv {} does not match lv bus base_kv {}", what, tr.lv_kv, kv));
                }
            }
        }
    }

    for (const auto& load : net.loads) {
        const std::string what = fmt::format("load at bus {}", load.bus);
        check_bus_ref(load.bus, what);
        for (int p = 0; p < kPhaseCount; ++p) {
            if (static_cast<int>(load.p_kw[p].size()) != net.horizon ||
                static_cast<int>(load.q_kvar[p].size()) != net.horizon) {
                add(fmt::format("{}: phase {} series length does not match horizon {}",
                                what, phase_name(p), net.horizon));
                continue;
            }
            for (int t = 0; t < net.horizon; ++t) {
                if (!finite(load.p_kw[p][t]) || !finite(load.q_kvar[p][t])) {
                    add(fmt::format("{}: non-finite value in phase {} series", what, phase_name(p)));
                    break;
                }
            }
        }
    }

    for (std::size_t i = 0; i < net.pv_units.size(); ++i) {
        const auto& pv = net.pv_units[i];
        const std::string what = fmt::format("pv unit {} at bus {}", i, pv.bus);
        check_bus_ref(pv.bus, what);
        if (!(pv.p_max_kw >= 0.0) || !finite(pv.p_max_kw)) {
            add(fmt::format("{}: p_max_kw must be nonnegative", what));
        }
        if (static_cast<int>(pv.profile.size()) != net.horizon) {
            add(fmt::format("{}: profile length {} does not match horizon {}",
                            what, pv.profile.size(), net.horizon));
        } else {
            for (double v : pv.profile) {
                if (!(v >= 0.0 && v <= 1.0)) {
                    add(fmt::format("{}: profile value {} outside [0,1]", what, v));
                    break;
                }
            }
        }
        if (pv.q_min_kvar && pv.q_max_kvar && *pv.q_min_kvar > *pv.q_max_kvar) {
            add(fmt::format("{}: q_min_kvar exceeds q_max_kvar", what));
        }
    }

    // Connectivity is only meaningful once every endpoint resolves.
    if (refs_ok && slack_count == 1 && !net.buses.empty()) {
        std::vector<std::vector<int>> adj(net.buses.size());
        auto connect = [&](int a, int b) {
            adj[ids.at(a)].push_back(ids.at(b));
            adj[ids.at(b)].push_back(ids.at(a));
        };
        for (const auto& ln : net.lines) {
            if (ln.from_bus != ln.to_bus) connect(ln.from_bus, ln.to_bus);
        }
        for (const auto& tr : net.transformers) {
            if (tr.hv_bus != tr.lv_bus) connect(tr.hv_bus, tr.lv_bus);
        }
        int start = 0;
        for (std::size_t i = 0; i < net.buses.size(); ++i) {
            if (net.buses[i].kind == BusKind::slack) start = static_cast<int>(i);
        }
        std::vector<char> seen(net.buses.size(), 0);
        std::vector<int> stack{start};
        seen[start] = 1;
        while (!stack.empty()) {
            int n = stack.back();
            stack.pop_back();
            for (int m : adj[n]) {
                if (!seen[m]) {
                    seen[m] = 1;
                    stack.push_back(m);
                }
            }
        }
        for (std::size_t i = 0; i < net.buses.size(); ++i) {
            if (!seen[i]) add(fmt::format("bus {} is not connected to the slack bus", net.buses[i].id));
        }
    }

    return issues;
}

Grid Grid::prepare(const NetworkModel& net) {
    auto issues = validate(net);
    if (!issues.empty()) throw ValidationError(std::move(issues));

    Grid g;
    g.base_mva_ = net.base_mva;
    g.horizon_ = net.horizon;
    g.u_slack_ = net.u_slack;
    g.limits_ = net.limits;

    g.bus_ids_.reserve(net.buses.size());
    for (std::size_t i = 0; i < net.buses.size(); ++i) {
        g.bus_ids_.push_back(net.buses[i].id);
        if (net.buses[i].kind == BusKind::slack) g.slack_index_ = static_cast<int>(i);
    }
    const IdMap ids = build_id_map(net);

    for (const auto& ln : net.lines) {
        const PerUnitBase base{net.base_mva, net.buses[ids.at(ln.from_bus)].base_kv};
        const PhaseAdmittance y = branch_admittance(ln, base);
        BranchData b;
        b.from = ids.at(ln.from_bus);
        b.to = ids.at(ln.to_bus);
        b.y_series = y.y_series;
        b.y_shunt_half = y.y_shunt_half;
        b.rating_pu = y.rating_pu;
        b.is_transformer = false;
        b.label = fmt::format("line {}-{}", ln.from_bus, ln.to_bus);
        g.branches_.push_back(std::move(b));
    }
    for (const auto& tr : net.transformers) {
        const PerUnitBase base{net.base_mva, tr.lv_kv};
        const PhaseAdmittance y = branch_admittance(tr, base);
        BranchData b;
        b.from = ids.at(tr.hv_bus);
        b.to = ids.at(tr.lv_bus);
        b.y_series = y.y_series;
        b.y_shunt_half = y.y_shunt_half;
        b.rating_pu = y.rating_pu;
        b.is_transformer = true;
        b.label = fmt::format("transformer {}-{}", tr.hv_bus, tr.lv_bus);
        g.branches_.push_back(std::move(b));
    }

    const std::size_t slots = static_cast<std::size_t>(net.horizon) * net.buses.size() * kPhaseCount;
    g.load_p_.assign(slots, 0.0);
    g.load_q_.assign(slots, 0.0);
    for (const auto& load : net.loads) {
        const int n = ids.at(load.bus);
        for (int p = 0; p < kPhaseCount; ++p) {
            for (int t = 0; t < net.horizon; ++t) {
                g.load_p_[g.key(n, p, t)] += g.kw_to_pu(load.p_kw[p][t]);
                g.load_q_[g.key(n, p, t)] += g.kw_to_pu(load.q_kvar[p][t]);
            }
        }
    }

    for (const auto& pv : net.pv_units) {
        PvData d;
        d.bus = ids.at(pv.bus);
        d.connection = pv.connection;
        d.p_max_pu = g.kw_to_pu(pv.p_max_kw);
        d.profile = pv.profile;
        if (pv.q_min_kvar) d.q_min_pu = g.kw_to_pu(*pv.q_min_kvar);
        if (pv.q_max_kvar) d.q_max_pu = g.kw_to_pu(*pv.q_max_kvar);
        g.pv_.push_back(std::move(d));
    }

    g.ybus_ = assemble_ybus(g.bus_count(), g.slack_index_, g.branches_);
    return g;
}

int Grid::bus_index(int id) const {
    for (std::size_t i = 0; i < bus_ids_.size(); ++i) {
        if (bus_ids_[i] == id) return static_cast<int>(i);
    }
    return -1;
}

} // namespace triopf
