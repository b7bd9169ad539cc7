#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <vector>

#include "ricsim/topology.hpp"
#include "ricsim/types.hpp"

namespace ricsim {

/// Per-cell PRB-utilization series on a shared, regular time grid.
struct TrafficTrace {
    Timestamp granularity_s = 900;
    Timestamp start = 0;
    std::map<CellId, std::vector<double>> series;

    std::size_t length() const noexcept { return series.empty() ? 0 : series.begin()->second.size(); }
    Timestamp timestamp(std::size_t index) const noexcept {
        return start + static_cast<Timestamp>(index) * granularity_s;
    }
    /// Utilization of `cell` at `index`; 0 for cells without a series.
    double at(const CellId& cell, std::size_t index) const;

    bool operator==(const TrafficTrace&) const = default;
};

/// Parses `site,sector,band,timestamp,prb_util` CSV. When a topology is
/// given, rows naming cells outside it are rejected (UnknownCell).
TrafficTrace parse_trace(std::istream& in, const Topology* topology = nullptr);
TrafficTrace load_trace(const std::filesystem::path& path, const Topology* topology = nullptr);
void write_trace(std::ostream& out, const TrafficTrace& trace);

struct DiurnalConfig {
    int days = 14;
    double peak_utilization = 0.7;
    double trough_utilization = 0.05;
    double peak_hour = 20.0;
    double noise_std = 0.02;
    std::uint64_t seed = 1;
    /// Multiplier per band index; bands beyond the list use 1.0.
    std::vector<double> per_band_scale;
    Timestamp granularity_s = 900;

    void validate() const;  // throws ConfigError
};

DiurnalConfig parse_diurnal_config(std::string_view json_text);

/// Noiseless raised-cosine profile for one band at time t (seconds).
double diurnal_mean(const DiurnalConfig& cfg, int band, Timestamp t);

/// Raised cosine over 24 h plus white noise, clamped to [0, 1].
TrafficTrace synth_diurnal(const Topology& topology, const DiurnalConfig& cfg);

struct UeEvent {
    enum class Kind { Arrival, Departure };
    Kind kind = Kind::Arrival;
    CellId cell;

    bool operator==(const UeEvent&) const = default;
};

/// Number of UEs a cell's offered load corresponds to.
int target_ue_count(double utilization, int prb_capacity, int ue_demand_prb);

/// Arrivals or departures that move `current_count` offered UEs of `cell`
/// to the target implied by the trace at `interval_index`.
std::vector<UeEvent> ue_events(const TrafficTrace& trace, std::size_t interval_index, const CellId& cell,
                               int prb_capacity, int ue_demand_prb, int current_count);

}  // namespace ricsim
