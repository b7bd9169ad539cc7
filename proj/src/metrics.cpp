#include "ricsim/metrics.hpp"

#include <charconv>
#include <ostream>
#include <set>

#include "json_util.hpp"
#include "ricsim/error.hpp"
#include "ricsim/messages.hpp"
#include "ricsim/near_rt_ric.hpp"
#include "ricsim/ran_model.hpp"

namespace ricsim {

using detail::json;

namespace {

struct CellMeta {
    CellId id;
    CellRole role = CellRole::Capacity;
    PowerModel power;
};

[[noreturn]] void corrupt(std::size_t line, const std::string& what) {
    throw Error(ErrorCode::CorruptLog, "line " + std::to_string(line + 1) + ": " + what);
}

SectorId sector_from(const detail::Reader& r, const char* field) {
    const json& v = r.at(field);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer())
        r.fail(field, "expected [site, sector]");
    return {v[0].get<int>(), v[1].get<int>()};
}

std::vector<int> int_array(const detail::Reader& r, const char* field, std::size_t n) {
    const json& a = r.array(field);
    if (a.size() != n) r.fail(field, "expected " + std::to_string(n) + " entries");
    std::vector<int> out;
    out.reserve(n);
    for (const auto& v : a) {
        if (!v.is_number_integer()) r.fail(field, "expected integers");
        out.push_back(v.get<int>());
    }
    return out;
}

// Mode changes at the same timestamp collapse into the last one, and a
// collapse back to the previous level removes the point altogether.
void push_mode(std::vector<ModePoint>& timeline, ModePoint p) {
    if (!timeline.empty() && timeline.back().ts == p.ts) timeline.pop_back();
    if (!timeline.empty() && timeline.back().awake_capacity_count == p.awake_capacity_count) return;
    timeline.push_back(p);
}

// Iterates a log, parsing each line and dispatching by type. Enforces the
// run_start ... run_end framing and non-decreasing timestamps.
template <typename F>
void scan(const EventLog& log, F&& on_record) {
    const auto& lines = log.lines();
    if (lines.empty()) throw Error(ErrorCode::CorruptLog, "empty log");
    Timestamp last_ts = std::numeric_limits<Timestamp>::min();
    bool ended = false;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (ended) corrupt(i, "record after run_end");
        json j = json::parse(lines[i], nullptr, false);
        if (j.is_discarded() || !j.is_object()) corrupt(i, "malformed JSON");
        try {
            detail::Reader r(j, "", ErrorCode::CorruptLog);
            const std::string type = r.string("type");
            const Timestamp ts = r.integer("ts");
            if (ts < last_ts) corrupt(i, "timestamp goes backwards");
            last_ts = ts;
            if (i == 0 && type != "run_start") corrupt(i, "log must begin with run_start");
            if (i != 0 && type == "run_start") corrupt(i, "second run_start");
            if (type == "run_end") ended = true;
            on_record(i, type, r, lines[i]);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::CorruptLog) throw;
            corrupt(i, e.what());
        }
    }
    if (!ended) throw Error(ErrorCode::CorruptLog, "truncated log: no run_end");
}

bool is_engine_record(const std::string& type) {
    static const std::set<std::string> kTypes = {"run_start",  "run_end",         "snapshot",      "shadow_snapshot",
                                                 "ue_arrival", "ue_departure",    "audit",         "es_mode",
                                                 "es_decision", "drain_timeout",  "protocol_error"};
    return kTypes.count(type) != 0;
}

}  // namespace

MetricsReport compute_metrics(const EventLog& log) {
    MetricsReport m;
    std::vector<CellMeta> cells;
    double interval_s = 0.0;
    std::uint64_t snapshots = 0, shadow_snapshots = 0;
    std::map<CellId, EnergyState> last_state;
    std::set<CellId> was_asleep;

    scan(log, [&](std::size_t line, const std::string& type, const detail::Reader& r, const std::string& raw) {
        const Timestamp ts = r.integer("ts");
        if (type == "run_start") {
            m.mode = r.string("mode");
            const json& seed = r.at("seed");
            if (!seed.is_number_unsigned() && !seed.is_number_integer()) r.fail("seed", "expected integer");
            m.seed = seed.get<std::uint64_t>();
            m.interval_s = r.integer("interval_s");
            if (m.interval_s <= 0) r.fail("interval_s", "must be positive");
            interval_s = static_cast<double>(m.interval_s);
            const json& arr = r.array("cells");
            for (std::size_t i = 0; i < arr.size(); ++i) {
                detail::Reader c = r.element(arr[i], i, "cells");
                CellMeta meta;
                meta.id = c.cell("cell");
                auto role = cell_role_from(c.string("role"));
                if (!role) c.fail("role", "unknown role");
                meta.role = *role;
                detail::Reader p = c.child("power");
                meta.power = PowerModel{p.number("p_active_w"), p.number("p_per_prb_w"), p.number("p_sleep_w")};
                cells.push_back(meta);
                if (meta.role == CellRole::Capacity) m.per_cell_rrc_timeline[meta.id];
            }
        } else if (type == "run_end") {
            m.intervals = static_cast<std::uint64_t>(r.integer("intervals"));
            if (m.intervals != snapshots) corrupt(line, "run_end interval count does not match snapshots");
            if (shadow_snapshots != 0 && shadow_snapshots != snapshots)
                corrupt(line, "shadow snapshot count does not match snapshots");
        } else if (type == "snapshot") {
            const auto prb = int_array(r, "prb", cells.size());
            const auto rrc = int_array(r, "rrc", cells.size());
            const auto state = int_array(r, "state", cells.size());
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (state[i] < 0 || state[i] > 3) r.fail("state", "unknown energy state code");
                if (cells[i].role != CellRole::Capacity) continue;
                m.energy_actual_j +=
                    interval_energy(static_cast<EnergyState>(state[i]), prb[i], cells[i].power, interval_s);
                auto& tl = m.per_cell_rrc_timeline[cells[i].id];
                if (tl.empty() || tl.back().rrc_count != rrc[i]) tl.push_back({ts, rrc[i]});
            }
            ++snapshots;
        } else if (type == "shadow_snapshot") {
            const auto prb = int_array(r, "prb", cells.size());
            for (std::size_t i = 0; i < cells.size(); ++i)
                if (cells[i].role == CellRole::Capacity)
                    m.energy_baseline_j +=
                        interval_energy(EnergyState::IsNotEnergySaving, prb[i], cells[i].power, interval_s);
            ++shadow_snapshots;
        } else if (type == "ue_arrival") {
            r.integer("ue");
            ++m.attempts;
            if (!r.boolean("admitted")) ++m.blocked;
        } else if (type == "audit") {
            const auto rec = decode_audit(raw);
            ++m.handovers_attempted;
            if (rec.outcome.ok()) ++m.handovers_succeeded;
        } else if (type == "es_mode") {
            push_mode(m.es_mode_timeline[sector_from(r, "sector")],
                      {ts, static_cast<int>(r.integer("awake_capacity_count"))});
        } else if (type == "es_decision") {
            SectorSample s;
            s.ts = ts;
            s.load = r.number("load");
            if (!r.at("predicted").is_null()) s.predicted = r.number("predicted");
            s.awake_capacity_count = static_cast<int>(r.integer("awake_capacity_count"));
            m.sector_series[sector_from(r, "sector")].push_back(s);
        } else if (type == "drain_timeout") {
            r.cell("cell");
            ++m.drain_timeouts;
        } else if (type == "ccc_indication") {
            const auto ind = std::get<CccIndication>(decode(raw));
            auto [it, fresh] = last_state.emplace(ind.cell, ind.energy_state);
            if (!fresh && it->second == ind.energy_state) return;
            it->second = ind.energy_state;
            if (ind.energy_state == EnergyState::IsEnergySaving) {
                ++m.transitions;
                was_asleep.insert(ind.cell);
            } else if (ind.energy_state == EnergyState::IsNotEnergySaving && was_asleep.erase(ind.cell)) {
                ++m.transitions;
            }
        } else if (kind_from_type(type)) {
            decode(raw);
        } else if (!is_engine_record(type)) {
            corrupt(line, "unknown record type '" + type + "'");
        }
    });

    if (m.mode.empty()) throw Error(ErrorCode::CorruptLog, "missing run_start");
    m.accessibility = m.attempts == 0 ? 1.0 : static_cast<double>(m.attempts - m.blocked) / m.attempts;
    m.savings_capacity_pct = m.energy_baseline_j > 0.0 ? 100.0 * (1.0 - m.energy_actual_j / m.energy_baseline_j) : 0.0;
    return m;
}

std::map<UeId, CellId> final_attachments(const EventLog& log) {
    std::map<UeId, CellId> out;
    scan(log, [&](std::size_t, const std::string& type, const detail::Reader& r, const std::string& raw) {
        if (type == "ue_arrival") {
            if (r.boolean("admitted")) out[r.integer("ue")] = r.cell("serving");
        } else if (type == "ue_departure") {
            out.erase(r.integer("ue"));
        } else if (type == "audit") {
            const auto rec = decode_audit(raw);
            if (rec.outcome.ok()) out[rec.command.ue] = rec.command.target;
        }
    });
    return out;
}

namespace {

std::string sector_key(const SectorId& s) { return std::to_string(s.site) + "-" + std::to_string(s.sector); }
std::string cell_key(const CellId& c) {
    return std::to_string(c.site) + "-" + std::to_string(c.sector) + "-" + std::to_string(c.band);
}

std::vector<int> split_key(const std::string& key, std::size_t parts) {
    std::vector<int> out;
    const char* p = key.data();
    const char* end = key.data() + key.size();
    while (p < end) {
        int v = 0;
        auto [next, ec] = std::from_chars(p, end, v);
        if (ec != std::errc()) break;
        out.push_back(v);
        p = next;
        if (p == end) break;
        if (*p != '-') break;
        ++p;
    }
    if (out.size() != parts || p != end) throw Error(ErrorCode::DecodeError, "bad key '" + key + "'");
    return out;
}

}  // namespace

std::string metrics_to_json(const MetricsReport& m) {
    json j;
    j["mode"] = m.mode;
    j["seed"] = m.seed;
    j["interval_s"] = m.interval_s;
    j["intervals"] = m.intervals;
    j["energy"] = {{"baseline_j", m.energy_baseline_j},
                   {"actual_j", m.energy_actual_j},
                   {"savings_capacity_pct", m.savings_capacity_pct}};
    j["accessibility"] = {{"attempts", m.attempts}, {"blocked", m.blocked}, {"ratio", m.accessibility}};
    j["handovers"] = {{"attempted", m.handovers_attempted}, {"succeeded", m.handovers_succeeded}};
    j["transitions"] = m.transitions;
    j["drain_timeouts"] = m.drain_timeouts;

    json modes = json::object();
    for (const auto& [s, tl] : m.es_mode_timeline) {
        json a = json::array();
        for (const auto& p : tl) a.push_back({p.ts, p.awake_capacity_count});
        modes[sector_key(s)] = std::move(a);
    }
    j["es_mode_timeline"] = std::move(modes);

    json rrc = json::object();
    for (const auto& [c, tl] : m.per_cell_rrc_timeline) {
        json a = json::array();
        for (const auto& p : tl) a.push_back({p.ts, p.rrc_count});
        rrc[cell_key(c)] = std::move(a);
    }
    j["per_cell_rrc_timeline"] = std::move(rrc);

    json series = json::object();
    for (const auto& [s, samples] : m.sector_series) {
        json a = json::array();
        for (const auto& p : samples)
            a.push_back({p.ts, p.load, p.predicted ? json(*p.predicted) : json(nullptr), p.awake_capacity_count});
        series[sector_key(s)] = std::move(a);
    }
    j["sector_series"] = std::move(series);
    return j.dump(2);
}

MetricsReport metrics_from_json(std::string_view text) {
    const json j = detail::parse_or_throw(text, ErrorCode::DecodeError, "metrics");
    detail::Reader r(j, "", ErrorCode::DecodeError);
    MetricsReport m;
    try {
        m.mode = r.string("mode");
        m.seed = j.at("seed").get<std::uint64_t>();
        m.interval_s = r.integer("interval_s");
        m.intervals = j.at("intervals").get<std::uint64_t>();
        auto e = r.child("energy");
        m.energy_baseline_j = e.number("baseline_j");
        m.energy_actual_j = e.number("actual_j");
        m.savings_capacity_pct = e.number("savings_capacity_pct");
        auto a = r.child("accessibility");
        m.attempts = a.at("attempts").get<std::uint64_t>();
        m.blocked = a.at("blocked").get<std::uint64_t>();
        m.accessibility = a.number("ratio");
        auto h = r.child("handovers");
        m.handovers_attempted = h.at("attempted").get<std::uint64_t>();
        m.handovers_succeeded = h.at("succeeded").get<std::uint64_t>();
        m.transitions = j.at("transitions").get<std::uint64_t>();
        m.drain_timeouts = j.at("drain_timeouts").get<std::uint64_t>();

        for (const auto& [key, arr] : j.at("es_mode_timeline").items()) {
            auto p = split_key(key, 2);
            auto& tl = m.es_mode_timeline[{p[0], p[1]}];
            for (const auto& e : arr) tl.push_back({e.at(0).get<Timestamp>(), e.at(1).get<int>()});
        }
        for (const auto& [key, arr] : j.at("per_cell_rrc_timeline").items()) {
            auto p = split_key(key, 3);
            auto& tl = m.per_cell_rrc_timeline[{p[0], p[1], p[2]}];
            for (const auto& e : arr) tl.push_back({e.at(0).get<Timestamp>(), e.at(1).get<int>()});
        }
        for (const auto& [key, arr] : j.at("sector_series").items()) {
            auto p = split_key(key, 2);
            auto& s = m.sector_series[{p[0], p[1]}];
            for (const auto& e : arr) {
                SectorSample x;
                x.ts = e.at(0).get<Timestamp>();
                x.load = e.at(1).get<double>();
                if (!e.at(2).is_null()) x.predicted = e.at(2).get<double>();
                x.awake_capacity_count = e.at(3).get<int>();
                s.push_back(x);
            }
        }
    } catch (const json::exception& ex) {
        throw Error(ErrorCode::DecodeError, std::string("metrics: ") + ex.what());
    }
    return m;
}

void write_metrics_csv(std::ostream& out, const MetricsReport& m) {
    out << "metric,value\n";
    out << "mode," << m.mode << '\n';
    out << "seed," << m.seed << '\n';
    out << "intervals," << m.intervals << '\n';
    out << "energy_baseline_j," << json(m.energy_baseline_j).dump() << '\n';
    out << "energy_actual_j," << json(m.energy_actual_j).dump() << '\n';
    out << "savings_capacity_pct," << json(m.savings_capacity_pct).dump() << '\n';
    out << "attempts," << m.attempts << '\n';
    out << "blocked," << m.blocked << '\n';
    out << "accessibility," << json(m.accessibility).dump() << '\n';
    out << "handovers_attempted," << m.handovers_attempted << '\n';
    out << "handovers_succeeded," << m.handovers_succeeded << '\n';
    out << "transitions," << m.transitions << '\n';
    out << "drain_timeouts," << m.drain_timeouts << '\n';
}

void write_plot_data(std::ostream& out, const MetricsReport& m) {
    out << "timestamp,sector,load,predicted,awake_capacity_count\n";
    for (const auto& [s, samples] : m.sector_series)
        for (const auto& p : samples) {
            out << p.ts << ',' << sector_key(s) << ',' << json(p.load).dump() << ',';
            if (p.predicted) out << json(*p.predicted).dump();
            out << ',' << p.awake_capacity_count << '\n';
        }
}

void write_summary(std::ostream& out, const MetricsReport& m) {
    out << "mode " << m.mode << ", seed " << m.seed << ", " << m.intervals << " intervals of " << m.interval_s
        << " s\n";
    out << "capacity-layer energy: " << m.energy_actual_j / 3.6e6 << " kWh (baseline "
        << m.energy_baseline_j / 3.6e6 << " kWh), savings " << m.savings_capacity_pct << " %\n";
    out << "accessibility: " << m.accessibility << " (" << m.blocked << " blocked of " << m.attempts << ")\n";
    out << "handovers: " << m.handovers_succeeded << " of " << m.handovers_attempted << " succeeded\n";
    out << "on/off transitions: " << m.transitions << ", drain timeouts: " << m.drain_timeouts << '\n';
}

}  // namespace ricsim
