#include "ricsim/traffic.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "json_util.hpp"
#include "ricsim/error.hpp"

namespace ricsim {

namespace {

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what);
}

template <class T>
T parse_field(std::string_view field, std::size_t line, const char* name) {
    while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\r')) field.remove_suffix(1);
    T value{};
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size())
        parse_fail(line, std::string("bad ") + name + " '" + std::string(field) + "'");
    return value;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        auto next = s.find(sep, pos);
        out.push_back(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return out;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace

double TrafficTrace::at(const CellId& cell, std::size_t index) const {
    auto it = series.find(cell);
    if (it == series.end() || index >= it->second.size()) return 0.0;
    return it->second[index];
}

TrafficTrace parse_trace(std::istream& in, const Topology* topology) {
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line)) parse_fail(line_no, "empty trace");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "site,sector,band,timestamp,prb_util") parse_fail(line_no, "expected header site,sector,band,timestamp,prb_util");

    std::map<CellId, std::vector<std::pair<Timestamp, double>>> rows;
    std::map<CellId, std::size_t> first_line;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto f = split(line, ',');
        if (f.size() != 5) parse_fail(line_no, "expected 5 fields, got " + std::to_string(f.size()));
        CellId id{parse_field<int>(f[0], line_no, "site"), parse_field<int>(f[1], line_no, "sector"),
                  parse_field<int>(f[2], line_no, "band")};
        const auto ts = parse_field<Timestamp>(f[3], line_no, "timestamp");
        const auto util = parse_field<double>(f[4], line_no, "prb_util");
        if (!(util >= 0.0 && util <= 1.0))
            throw Error(ErrorCode::RangeError, "line " + std::to_string(line_no) + ": prb_util " + std::string(f[4]) +
                                                   " outside [0,1]");
        if (topology && !topology->find(id))
            throw Error(ErrorCode::UnknownCell, "line " + std::to_string(line_no) + ": " + to_string(id));
        auto& series = rows[id];
        if (!series.empty() && ts <= series.back().first)
            throw Error(ErrorCode::GridError, "line " + std::to_string(line_no) + ": timestamps not increasing for " +
                                                  to_string(id));
        first_line.emplace(id, line_no);
        series.emplace_back(ts, util);
    }

    TrafficTrace trace;
    if (rows.empty()) return trace;

    const auto& ref = rows.begin()->second;
    trace.start = ref.front().first;
    if (ref.size() > 1) trace.granularity_s = ref[1].first - ref[0].first;
    for (std::size_t i = 1; i < ref.size(); ++i)
        if (ref[i].first - ref[i - 1].first != trace.granularity_s)
            throw Error(ErrorCode::GridError, "irregular spacing for " + to_string(rows.begin()->first));

    for (const auto& [id, series] : rows) {
        if (series.size() != ref.size())
            throw Error(ErrorCode::GridError, to_string(id) + " has " + std::to_string(series.size()) +
                                                  " samples, expected " + std::to_string(ref.size()));
        std::vector<double> values;
        values.reserve(series.size());
        for (std::size_t i = 0; i < series.size(); ++i) {
            if (series[i].first != ref[i].first)
                throw Error(ErrorCode::GridError, to_string(id) + " timestamp " + std::to_string(series[i].first) +
                                                      " off the shared grid");
            values.push_back(series[i].second);
        }
        trace.series.emplace(id, std::move(values));
    }
    return trace;
}

TrafficTrace load_trace(const std::filesystem::path& path, const Topology* topology) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open trace " + path.string());
    return parse_trace(in, topology);
}

void write_trace(std::ostream& out, const TrafficTrace& trace) {
    out << "site,sector,band,timestamp,prb_util\n";
    for (const auto& [id, values] : trace.series)
        for (std::size_t i = 0; i < values.size(); ++i)
            out << id.site << ',' << id.sector << ',' << id.band << ',' << trace.timestamp(i) << ','
                << format_double(values[i]) << '\n';
}

void DiurnalConfig::validate() const {
    if (days <= 0) throw Error(ErrorCode::ConfigError, "days must be positive");
    // trough == peak is accepted: it degenerates to a constant series
    if (!(trough_utilization >= 0.0 && trough_utilization <= peak_utilization && peak_utilization <= 1.0))
        throw Error(ErrorCode::ConfigError, "need 0 <= trough <= peak <= 1");
    if (!(noise_std >= 0.0)) throw Error(ErrorCode::ConfigError, "noise_std must be non-negative");
    if (granularity_s <= 0 || 86400 % granularity_s != 0)
        throw Error(ErrorCode::ConfigError, "granularity must divide one day");
    for (double s : per_band_scale)
        if (!(s >= 0.0)) throw Error(ErrorCode::ConfigError, "per_band_scale entries must be non-negative");
}

DiurnalConfig parse_diurnal_config(std::string_view json_text) {
    const auto root = detail::parse_or_throw(json_text, ErrorCode::ConfigError, "diurnal config");
    detail::Reader r(root, "", ErrorCode::ConfigError);
    DiurnalConfig cfg;
    if (r.has("days")) cfg.days = static_cast<int>(r.integer("days"));
    if (r.has("peak_utilization")) cfg.peak_utilization = r.number("peak_utilization");
    if (r.has("trough_utilization")) cfg.trough_utilization = r.number("trough_utilization");
    if (r.has("peak_hour")) cfg.peak_hour = r.number("peak_hour");
    if (r.has("noise_std")) cfg.noise_std = r.number("noise_std");
    if (r.has("seed")) cfg.seed = static_cast<std::uint64_t>(r.integer("seed"));
    if (r.has("granularity_s")) cfg.granularity_s = r.integer("granularity_s");
    if (r.has("per_band_scale"))
        for (const auto& v : r.array("per_band_scale")) {
            if (!v.is_number()) r.fail("per_band_scale", "expected numbers");
            cfg.per_band_scale.push_back(v.get<double>());
        }
    cfg.validate();
    return cfg;
}

double diurnal_mean(const DiurnalConfig& cfg, int band, Timestamp t) {
    const double scale =
        band >= 0 && static_cast<std::size_t>(band) < cfg.per_band_scale.size() ? cfg.per_band_scale[band] : 1.0;
    const double hour = static_cast<double>(t % 86400) / 3600.0;
    const double shape = 0.5 * (1.0 + std::cos(2.0 * std::numbers::pi * (hour - cfg.peak_hour) / 24.0));
    const double u = scale * (cfg.trough_utilization + (cfg.peak_utilization - cfg.trough_utilization) * shape);
    return std::clamp(u, 0.0, 1.0);
}

TrafficTrace synth_diurnal(const Topology& topology, const DiurnalConfig& cfg) {
    cfg.validate();
    TrafficTrace trace;
    trace.granularity_s = cfg.granularity_s;
    trace.start = 0;
    const std::size_t length = static_cast<std::size_t>(cfg.days) * static_cast<std::size_t>(86400 / cfg.granularity_s);

    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (const auto& cell : topology.cells()) {
        std::vector<double> values(length);
        for (std::size_t i = 0; i < length; ++i) {
            double u = diurnal_mean(cfg, cell.id.band, trace.timestamp(i));
            if (cfg.noise_std > 0.0) u += cfg.noise_std * noise(rng);
            values[i] = std::clamp(u, 0.0, 1.0);
        }
        trace.series.emplace(cell.id, std::move(values));
    }
    return trace;
}

int target_ue_count(double utilization, int prb_capacity, int ue_demand_prb) {
    if (ue_demand_prb < 1) throw Error(ErrorCode::ConfigError, "UE demand must be at least one PRB");
    return static_cast<int>(std::lround(utilization * prb_capacity / ue_demand_prb));
}

std::vector<UeEvent> ue_events(const TrafficTrace& trace, std::size_t interval_index, const CellId& cell,
                               int prb_capacity, int ue_demand_prb, int current_count) {
    if (interval_index >= trace.length())
        throw Error(ErrorCode::RangeError, "interval " + std::to_string(interval_index) + " beyond trace");
    const int target = target_ue_count(trace.at(cell, interval_index), prb_capacity, ue_demand_prb);
    std::vector<UeEvent> out;
    const auto kind = target > current_count ? UeEvent::Kind::Arrival : UeEvent::Kind::Departure;
    for (int i = 0; i < std::abs(target - current_count); ++i) out.push_back({kind, cell});
    return out;
}

}  // namespace ricsim
