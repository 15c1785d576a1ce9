#include "triopf/io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "triopf/errors.hpp"

namespace triopf {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("/", "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

const json& member(const json& obj, const std::string& ptr, const char* key) {
    if (!obj.is_object()) throw SchemaError(ptr, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(ptr + "/" + key, "missing required field");
    return *it;
}

void reject_unknown(const json& obj, const std::string& ptr,
                    std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw SchemaError(ptr, "expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* key : allowed) known = known || it.key() == key;
        if (!known) throw SchemaError(ptr + "/" + it.key(), "unknown field");
    }
}

double number_at(const json& v, const std::string& ptr) {
    if (!v.is_number()) throw SchemaError(ptr, "expected a number");
    return v.get<double>();
}

int int_at(const json& v, const std::string& ptr) {
    if (!v.is_number_integer()) throw SchemaError(ptr, "expected an integer");
    return v.get<int>();
}

std::string string_at(const json& v, const std::string& ptr) {
    if (!v.is_string()) throw SchemaError(ptr, "expected a string");
    return v.get<std::string>();
}

double number_field(const json& obj, const std::string& ptr, const char* key) {
    return number_at(member(obj, ptr, key), ptr + "/" + key);
}

int int_field(const json& obj, const std::string& ptr, const char* key) {
    return int_at(member(obj, ptr, key), ptr + "/" + key);
}

std::string string_field(const json& obj, const std::string& ptr, const char* key) {
    return string_at(member(obj, ptr, key), ptr + "/" + key);
}

std::optional<double> optional_number_field(const json& obj, const std::string& ptr,
                                            const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    return number_at(*it, ptr + "/" + key);
}

double default_number_field(const json& obj, const std::string& ptr, const char* key,
                            double fallback) {
    return optional_number_field(obj, ptr, key).value_or(fallback);
}

std::vector<double> number_array(const json& v, const std::string& ptr) {
    if (!v.is_array()) throw SchemaError(ptr, "expected an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(number_at(v[i], ptr + "/" + std::to_string(i)));
    return out;
}

/// Demand entry: scalar, [3] per-phase constants, or [3][T] full series.
/// Always expands to three length-T vectors.
std::array<std::vector<double>, 3> demand_series(const json& v, const std::string& ptr,
                                                 int horizon) {
    std::array<std::vector<double>, 3> out;
    if (v.is_number()) {
        for (auto& series : out) series.assign(horizon, v.get<double>());
        return out;
    }
    if (!v.is_array() || v.size() != 3)
        throw SchemaError(ptr, "expected a number, three numbers, or three period series");
    for (int p = 0; p < 3; ++p) {
        const std::string phase_ptr = ptr + "/" + std::to_string(p);
        if (v[p].is_number()) {
            out[p].assign(horizon, v[p].get<double>());
        } else {
            out[p] = number_array(v[p], phase_ptr);
            if (static_cast<int>(out[p].size()) != horizon)
                throw SchemaError(phase_ptr, fmt::format("expected {} entries, got {}", horizon,
                                                         out[p].size()));
        }
    }
    return out;
}

/// Availability profile: inline [T] array or a reference into a series CSV
/// resolved relative to the network file.
std::vector<double> profile_series(const json& v, const std::string& ptr, int horizon,
                                   const fs::path& base_dir) {
    std::vector<double> profile;
    if (v.is_array()) {
        profile = number_array(v, ptr);
    } else if (v.is_object()) {
        reject_unknown(v, ptr, {"csv", "column"});
        const std::string rel = string_field(v, ptr, "csv");
        std::string column = "value";
        if (auto it = v.find("column"); it != v.end()) column = string_at(*it, ptr + "/column");
        CsvSeries series;
        try {
            series = load_series_csv((base_dir / rel).string());
        } catch (const SchemaError& e) {
            throw SchemaError(ptr + "/csv", e.what());
        }
        int col = -1;
        for (std::size_t i = 0; i < series.columns.size(); ++i)
            if (series.columns[i] == column) col = static_cast<int>(i);
        if (col < 0) throw SchemaError(ptr + "/column", "no column named " + column + " in " + rel);
        profile = series.values[col];
    } else {
        throw SchemaError(ptr, "expected an array or a csv reference object");
    }
    if (static_cast<int>(profile.size()) != horizon)
        throw SchemaError(ptr, fmt::format("expected {} entries, got {}", horizon, profile.size()));
    return profile;
}

BusKind bus_kind(const std::string& text, const std::string& ptr) {
    if (text == "slack") return BusKind::slack;
    if (text == "pq") return BusKind::pq;
    throw SchemaError(ptr, "expected \"slack\" or \"pq\", got \"" + text + "\"");
}

PvConnection pv_connection(const std::string& text, const std::string& ptr) {
    if (text == "a") return PvConnection::phase_a;
    if (text == "b") return PvConnection::phase_b;
    if (text == "c") return PvConnection::phase_c;
    if (text == "abc") return PvConnection::three_phase;
    throw SchemaError(ptr, "expected \"a\", \"b\", \"c\", or \"abc\", got \"" + text + "\"");
}

const char* connection_text(PvConnection c) {
    switch (c) {
    case PvConnection::phase_a: return "a";
    case PvConnection::phase_b: return "b";
    case PvConnection::phase_c: return "c";
    case PvConnection::three_phase: return "abc";
    }
    return "abc";
}

json series_json(const std::vector<double>& v) { return json(v); }

} // namespace

NetworkModel load_network(const std::string& path) {
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw SchemaError("/", e.what());
    }
    reject_unknown(doc, "", {"format_version", "base_mva", "u_slack", "horizon", "limits", "buses",
                             "lines", "transformers", "loads", "pv_units"});
    const int version = int_field(doc, "", "format_version");
    if (version != kNetworkFormatVersion)
        throw SchemaError("/format_version",
                          fmt::format("unsupported version {} (this build reads {})", version,
                                      kNetworkFormatVersion));

    NetworkModel net;
    net.base_mva = number_field(doc, "", "base_mva");
    net.u_slack = number_field(doc, "", "u_slack");
    net.horizon = int_field(doc, "", "horizon");
    if (net.horizon < 1) throw SchemaError("/horizon", "horizon must be at least 1");

    const json& limits = member(doc, "", "limits");
    reject_unknown(limits, "/limits", {"u_min_pu", "u_max_pu", "vuf_max"});
    net.limits.u_min_pu = number_field(limits, "/limits", "u_min_pu");
    net.limits.u_max_pu = number_field(limits, "/limits", "u_max_pu");
    net.limits.vuf_max = number_field(limits, "/limits", "vuf_max");

    const json& buses = member(doc, "", "buses");
    if (!buses.is_array()) throw SchemaError("/buses", "expected an array");
    for (std::size_t i = 0; i < buses.size(); ++i) {
        const std::string ptr = "/buses/" + std::to_string(i);
        reject_unknown(buses[i], ptr, {"id", "kind", "base_kv"});
        Bus bus;
        bus.id = int_field(buses[i], ptr, "id");
        bus.kind = bus_kind(string_field(buses[i], ptr, "kind"), ptr + "/kind");
        bus.base_kv = number_field(buses[i], ptr, "base_kv");
        net.buses.push_back(bus);
    }

    const json& lines = member(doc, "", "lines");
    if (!lines.is_array()) throw SchemaError("/lines", "expected an array");
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string ptr = "/lines/" + std::to_string(i);
        reject_unknown(lines[i], ptr,
                       {"from_bus", "to_bus", "length_km", "r1_ohm_per_km", "x1_ohm_per_km",
                        "r0_ohm_per_km", "x0_ohm_per_km", "max_i_ka", "b_us_per_km", "s_max_pu"});
        Line line;
        line.from_bus = int_field(lines[i], ptr, "from_bus");
        line.to_bus = int_field(lines[i], ptr, "to_bus");
        line.length_km = number_field(lines[i], ptr, "length_km");
        if (line.length_km < 0.0)
            throw SchemaError(ptr + "/length_km", "length must not be negative");
        line.r1_ohm_per_km = number_field(lines[i], ptr, "r1_ohm_per_km");
        line.x1_ohm_per_km = number_field(lines[i], ptr, "x1_ohm_per_km");
        line.r0_ohm_per_km = number_field(lines[i], ptr, "r0_ohm_per_km");
        line.x0_ohm_per_km = number_field(lines[i], ptr, "x0_ohm_per_km");
        line.max_i_ka = number_field(lines[i], ptr, "max_i_ka");
        if (line.max_i_ka < 0.0)
            throw SchemaError(ptr + "/max_i_ka", "rating must not be negative");
        line.b_us_per_km = default_number_field(lines[i], ptr, "b_us_per_km", 0.0);
        line.s_max_pu = optional_number_field(lines[i], ptr, "s_max_pu");
        net.lines.push_back(line);
    }

    const json& transformers = member(doc, "", "transformers");
    if (!transformers.is_array()) throw SchemaError("/transformers", "expected an array");
    for (std::size_t i = 0; i < transformers.size(); ++i) {
        const std::string ptr = "/transformers/" + std::to_string(i);
        reject_unknown(transformers[i], ptr,
                       {"hv_bus", "lv_bus", "s_rated_mva", "vk_percent", "vkr_percent", "hv_kv",
                        "lv_kv"});
        Transformer tr;
        tr.hv_bus = int_field(transformers[i], ptr, "hv_bus");
        tr.lv_bus = int_field(transformers[i], ptr, "lv_bus");
        tr.s_rated_mva = number_field(transformers[i], ptr, "s_rated_mva");
        tr.vk_percent = number_field(transformers[i], ptr, "vk_percent");
        tr.vkr_percent = number_field(transformers[i], ptr, "vkr_percent");
        tr.hv_kv = number_field(transformers[i], ptr, "hv_kv");
        tr.lv_kv = number_field(transformers[i], ptr, "lv_kv");
        net.transformers.push_back(tr);
    }

    const fs::path base_dir = fs::path(path).parent_path();

    const json& loads = member(doc, "", "loads");
    if (!loads.is_array()) throw SchemaError("/loads", "expected an array");
    for (std::size_t i = 0; i < loads.size(); ++i) {
        const std::string ptr = "/loads/" + std::to_string(i);
        reject_unknown(loads[i], ptr, {"bus", "p_kw", "q_kvar"});
        Load load;
        load.bus = int_field(loads[i], ptr, "bus");
        load.p_kw = demand_series(member(loads[i], ptr, "p_kw"), ptr + "/p_kw", net.horizon);
        load.q_kvar = demand_series(member(loads[i], ptr, "q_kvar"), ptr + "/q_kvar", net.horizon);
        net.loads.push_back(std::move(load));
    }

    const json& pv_units = member(doc, "", "pv_units");
    if (!pv_units.is_array()) throw SchemaError("/pv_units", "expected an array");
    for (std::size_t i = 0; i < pv_units.size(); ++i) {
        const std::string ptr = "/pv_units/" + std::to_string(i);
        reject_unknown(pv_units[i], ptr,
                       {"bus", "connection", "p_max_kw", "profile", "q_min_kvar", "q_max_kvar"});
        PvUnit pv;
        pv.bus = int_field(pv_units[i], ptr, "bus");
        pv.connection =
            pv_connection(string_field(pv_units[i], ptr, "connection"), ptr + "/connection");
        pv.p_max_kw = number_field(pv_units[i], ptr, "p_max_kw");
        pv.profile = profile_series(member(pv_units[i], ptr, "profile"), ptr + "/profile",
                                    net.horizon, base_dir);
        pv.q_min_kvar = optional_number_field(pv_units[i], ptr, "q_min_kvar");
        pv.q_max_kvar = optional_number_field(pv_units[i], ptr, "q_max_kvar");
        net.pv_units.push_back(std::move(pv));
    }

    return net;
}

void save_network(const NetworkModel& net, const std::string& path) {
    nlohmann::ordered_json doc;
    doc["format_version"] = kNetworkFormatVersion;
    doc["base_mva"] = net.base_mva;
    doc["u_slack"] = net.u_slack;
    doc["horizon"] = net.horizon;
    doc["limits"] = {{"u_min_pu", net.limits.u_min_pu},
                     {"u_max_pu", net.limits.u_max_pu},
                     {"vuf_max", net.limits.vuf_max}};

    doc["buses"] = nlohmann::ordered_json::array();
    for (const Bus& bus : net.buses)
        doc["buses"].push_back({{"id", bus.id},
                                {"kind", bus.kind == BusKind::slack ? "slack" : "pq"},
                                {"base_kv", bus.base_kv}});

    doc["lines"] = nlohmann::ordered_json::array();
    for (const Line& line : net.lines) {
        nlohmann::ordered_json entry{{"from_bus", line.from_bus},
                                     {"to_bus", line.to_bus},
                                     {"length_km", line.length_km},
                                     {"r1_ohm_per_km", line.r1_ohm_per_km},
                                     {"x1_ohm_per_km", line.x1_ohm_per_km},
                                     {"r0_ohm_per_km", line.r0_ohm_per_km},
                                     {"x0_ohm_per_km", line.x0_ohm_per_km},
                                     {"max_i_ka", line.max_i_ka},
                                     {"b_us_per_km", line.b_us_per_km}};
        entry["s_max_pu"] = line.s_max_pu ? nlohmann::ordered_json(*line.s_max_pu)
                                          : nlohmann::ordered_json(nullptr);
        doc["lines"].push_back(std::move(entry));
    }

    doc["transformers"] = nlohmann::ordered_json::array();
    for (const Transformer& tr : net.transformers)
        doc["transformers"].push_back({{"hv_bus", tr.hv_bus},
                                       {"lv_bus", tr.lv_bus},
                                       {"s_rated_mva", tr.s_rated_mva},
                                       {"vk_percent", tr.vk_percent},
                                       {"vkr_percent", tr.vkr_percent},
                                       {"hv_kv", tr.hv_kv},
                                       {"lv_kv", tr.lv_kv}});

    doc["loads"] = nlohmann::ordered_json::array();
    for (const Load& load : net.loads)
        doc["loads"].push_back(
            {{"bus", load.bus},
             {"p_kw", {series_json(load.p_kw[0]), series_json(load.p_kw[1]),
                       series_json(load.p_kw[2])}},
             {"q_kvar", {series_json(load.q_kvar[0]), series_json(load.q_kvar[1]),
                         series_json(load.q_kvar[2])}}});

    doc["pv_units"] = nlohmann::ordered_json::array();
    for (const PvUnit& pv : net.pv_units) {
        nlohmann::ordered_json entry{{"bus", pv.bus},
                                     {"connection", connection_text(pv.connection)},
                                     {"p_max_kw", pv.p_max_kw},
                                     {"profile", series_json(pv.profile)}};
        entry["q_min_kvar"] = pv.q_min_kvar ? nlohmann::ordered_json(*pv.q_min_kvar)
                                            : nlohmann::ordered_json(nullptr);
        entry["q_max_kvar"] = pv.q_max_kvar ? nlohmann::ordered_json(*pv.q_max_kvar)
                                            : nlohmann::ordered_json(nullptr);
        doc["pv_units"].push_back(std::move(entry));
    }

    write_text_file(path, doc.dump(2) + "\n");
}

CsvSeries load_series_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError(path, "cannot open file");

    auto parse_number = [&](const std::string& cell, int lineno) {
        double value = 0.0;
        const char* begin = cell.data();
        const char* end = begin + cell.size();
        auto [next, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc() || next != end)
            throw SchemaError(fmt::format("{}:{}", path, lineno),
                              "expected a number, got \"" + cell + "\"");
        return value;
    };

    auto split = [](const std::string& line) {
        std::vector<std::string> cells;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            cells.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        return cells;
    };

    CsvSeries series;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> cells = split(line);
        if (lineno == 1) {
            if (cells.empty() || cells.front() != "period")
                throw SchemaError(fmt::format("{}:1", path),
                                  "header must start with a period column");
            series.columns.assign(cells.begin() + 1, cells.end());
            series.values.assign(series.columns.size(), {});
            if (series.columns.empty())
                throw SchemaError(fmt::format("{}:1", path), "no data columns after the index");
            continue;
        }
        if (cells.size() != series.columns.size() + 1)
            throw SchemaError(fmt::format("{}:{}", path, lineno),
                              fmt::format("expected {} cells, got {}", series.columns.size() + 1,
                                          cells.size()));
        const int t = static_cast<int>(series.values.front().size());
        if (parse_number(cells[0], lineno) != static_cast<double>(t))
            throw SchemaError(fmt::format("{}:{}", path, lineno),
                              fmt::format("period index must be {}", t));
        for (std::size_t c = 0; c < series.columns.size(); ++c)
            series.values[c].push_back(parse_number(cells[c + 1], lineno));
    }
    if (lineno == 0) throw SchemaError(fmt::format("{}:1", path), "empty file");
    return series;
}

void save_series_csv(const CsvSeries& series, const std::string& path) {
    std::string out = "period";
    for (const std::string& name : series.columns) out += "," + name;
    out += "\n";
    const std::size_t rows = series.values.empty() ? 0 : series.values.front().size();
    for (std::size_t t = 0; t < rows; ++t) {
        out += fmt::format("{}", t);
        for (const auto& column : series.values) out += fmt::format(",{}", column[t]);
        out += "\n";
    }
    write_text_file(path, out);
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path);
    out << content;
    if (!out) throw Error("failed writing " + path);
}

} // namespace triopf
