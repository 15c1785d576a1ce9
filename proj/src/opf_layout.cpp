#include <algorithm>

#include <fmt/format.h>

#include "triopf/opf.hpp"

namespace triopf {

std::string to_string(Formulation f) {
    return f == Formulation::power_voltage ? "power-voltage" : "current-voltage";
}

std::string to_string(Objective o) {
    switch (o) {
        case Objective::hosting: return "hosting";
        case Objective::losses: return "losses";
        case Objective::feasibility: return "feasibility";
    }
    return "unknown";
}

std::string to_string(Coupling c) { return c == Coupling::dispatch ? "dispatch" : "capacity"; }

namespace {

bool connects_phase(PvConnection c, int p) {
    return c == PvConnection::three_phase || connection_phase(c) == p;
}

bool has_reactive_band(const PvData& pv) {
    return pv.q_min_pu.has_value() || pv.q_max_pu.has_value();
}

} // namespace

double effective_capacity_pu(const Grid& grid, const PvData& pv, const OpfOptions& options) {
    double cap = pv.p_max_pu;
    if (options.export_cap_kw) {
        const int k = pv.connection == PvConnection::three_phase ? 3 : 1;
        cap = std::min(cap, k * grid.kw_to_pu(*options.export_cap_kw));
    }
    return cap;
}

VariableLayout::VariableLayout(const Grid& grid, Formulation formulation, const OpfOptions& options)
    : horizon_(grid.horizon()), buses_(grid.bus_count()), branches_(grid.branch_count()),
      units_(static_cast<int>(grid.pv_units().size())), slack_(grid.slack_index()),
      formulation_(formulation), coupling_(options.coupling) {
    period_base_.resize(horizon_);
    branch_base_.resize(horizon_);
    slack_base_.resize(horizon_);
    pv_p_idx_.assign(horizon_, std::vector<int>(units_ * 3, -1));
    pv_q_idx_.assign(horizon_, std::vector<int>(units_ * 3, -1));

    int pos = 0;
    auto push = [&](std::string name) {
        names_.push_back(std::move(name));
        return pos++;
    };

    for (int t = 0; t < horizon_; ++t) {
        period_base_[t] = pos;
        for (int n = 0; n < buses_; ++n) {
            if (n == slack_) continue;
            for (int p = 0; p < kPhaseCount; ++p) {
                push(fmt::format("t{}:u{}:{}:re", t, grid.bus_id(n), phase_name(p)));
                push(fmt::format("t{}:u{}:{}:im", t, grid.bus_id(n), phase_name(p)));
            }
        }
        branch_base_[t] = pos;
        for (int b = 0; b < branches_; ++b) {
            const auto& label = grid.branches()[b].label;
            for (int p = 0; p < kPhaseCount; ++p) {
                if (formulation_ == Formulation::power_voltage) {
                    for (const char* dir : {"from", "to"}) {
                        push(fmt::format("t{}:{}:{}:{}:P", t, label, phase_name(p), dir));
                        push(fmt::format("t{}:{}:{}:{}:Q", t, label, phase_name(p), dir));
                    }
                } else {
                    push(fmt::format("t{}:{}:{}:i_re", t, label, phase_name(p)));
                    push(fmt::format("t{}:{}:{}:i_im", t, label, phase_name(p)));
                }
            }
        }
        for (int k = 0; k < units_; ++k) {
            const auto& pv = grid.pv_units()[k];
            if (pv.profile[t] <= 0.0 || effective_capacity_pu(grid, pv, options) <= 0.0) continue;
            for (int p = 0; p < kPhaseCount; ++p) {
                if (!connects_phase(pv.connection, p)) continue;
                pv_p_idx_[t][k * 3 + p] = push(fmt::format("t{}:pv{}:{}:P", t, k, phase_name(p)));
            }
        }
        for (int k = 0; k < units_; ++k) {
            const auto& pv = grid.pv_units()[k];
            if (!has_reactive_band(pv)) continue;
            for (int p = 0; p < kPhaseCount; ++p) {
                if (!connects_phase(pv.connection, p)) continue;
                pv_q_idx_[t][k * 3 + p] = push(fmt::format("t{}:pv{}:{}:Q", t, k, phase_name(p)));
            }
        }
        slack_base_[t] = pos;
        for (int p = 0; p < kPhaseCount; ++p) push(fmt::format("t{}:slack:{}:P", t, phase_name(p)));
        for (int p = 0; p < kPhaseCount; ++p) push(fmt::format("t{}:slack:{}:Q", t, phase_name(p)));
    }

    capacity_idx_.assign(units_, -1);
    if (coupling_ == Coupling::capacity) {
        for (int k = 0; k < units_; ++k) {
            const auto& pv = grid.pv_units()[k];
            bool ever_produces = false;
            for (double v : pv.profile) ever_produces |= v > 0.0;
            if (ever_produces && effective_capacity_pu(grid, pv, options) > 0.0) {
                capacity_idx_[k] = push(fmt::format("cap:pv{}", k));
            }
        }
    }
    size_ = pos;
}

int VariableLayout::u_re(int t, int n, int p) const {
    if (n == slack_) return -1;
    const int ordinal = n < slack_ ? n : n - 1;
    return period_base_[t] + (ordinal * 3 + p) * 2;
}

int VariableLayout::u_im(int t, int n, int p) const {
    const int re = u_re(t, n, p);
    return re < 0 ? -1 : re + 1;
}

int VariableLayout::flow_p(int t, int b, int p, int dir) const {
    if (formulation_ != Formulation::power_voltage) return -1;
    return branch_base_[t] + ((b * 3 + p) * 2 + dir) * 2;
}

int VariableLayout::flow_q(int t, int b, int p, int dir) const {
    const int pp = flow_p(t, b, p, dir);
    return pp < 0 ? -1 : pp + 1;
}

int VariableLayout::cur_re(int t, int b, int p) const {
    if (formulation_ != Formulation::current_voltage) return -1;
    return branch_base_[t] + (b * 3 + p) * 2;
}

int VariableLayout::cur_im(int t, int b, int p) const {
    const int re = cur_re(t, b, p);
    return re < 0 ? -1 : re + 1;
}

int VariableLayout::pv_p(int t, int k, int p) const { return pv_p_idx_[t][k * 3 + p]; }
int VariableLayout::pv_q(int t, int k, int p) const { return pv_q_idx_[t][k * 3 + p]; }
int VariableLayout::slack_p(int t, int p) const { return slack_base_[t] + p; }
int VariableLayout::slack_q(int t, int p) const { return slack_base_[t] + 3 + p; }
int VariableLayout::capacity(int k) const { return capacity_idx_[k]; }

std::string ConstraintInfo::label() const {
    std::string head;
    switch (kind) {
        case Kind::flow_def: head = reactive ? "flow-def-Q" : "flow-def-P"; break;
        case Kind::current_def: head = reactive ? "current-def-im" : "current-def-re"; break;
        case Kind::power_balance: head = reactive ? "balance-Q" : "balance-P"; break;
        case Kind::current_balance: head = reactive ? "current-balance-im" : "current-balance-re"; break;
        case Kind::capacity_link: head = "capacity-link"; break;
        case Kind::phase_tie: head = "phase-tie"; break;
        case Kind::voltage_lower: head = "voltage-lower"; break;
        case Kind::voltage_upper: head = "voltage-upper"; break;
        case Kind::unbalance: head = "unbalance"; break;
        case Kind::thermal: head = "thermal"; break;
    }
    std::string out = head;
    if (period >= 0) out += fmt::format(" t{}", period);
    if (bus >= 0) out += fmt::format(" bus#{}", bus);
    if (branch >= 0) out += fmt::format(" branch#{}", branch);
    if (unit >= 0) out += fmt::format(" pv#{}", unit);
    if (phase >= 0) out += fmt::format(" phase {}", phase_name(phase));
    return out;
}

} // namespace triopf
