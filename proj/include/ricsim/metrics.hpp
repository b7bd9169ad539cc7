#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ricsim/event_log.hpp"
#include "ricsim/types.hpp"

namespace ricsim {

struct ModePoint {
    Timestamp ts = 0;
    int awake_capacity_count = 0;
    bool operator==(const ModePoint&) const = default;
};

struct RrcPoint {
    Timestamp ts = 0;
    int rrc_count = 0;
    bool operator==(const RrcPoint&) const = default;
};

struct SectorSample {
    Timestamp ts = 0;
    double load = 0.0;
    std::optional<double> predicted;
    int awake_capacity_count = 0;
    bool operator==(const SectorSample&) const = default;
};

/// KPIs of one run. Accessibility counts UE arrival admission attempts.
struct MetricsReport {
    std::string mode;
    std::uint64_t seed = 0;
    Timestamp interval_s = 0;
    std::uint64_t intervals = 0;

    double energy_baseline_j = 0.0;  // capacity-layer cells, always-awake shadow pass
    double energy_actual_j = 0.0;    // capacity-layer cells, this run
    double savings_capacity_pct = 0.0;

    std::uint64_t attempts = 0;
    std::uint64_t blocked = 0;
    double accessibility = 1.0;

    std::uint64_t handovers_attempted = 0;
    std::uint64_t handovers_succeeded = 0;

    std::uint64_t transitions = 0;  // entries into plus exits from isEnergySaving
    std::uint64_t drain_timeouts = 0;

    std::map<SectorId, std::vector<ModePoint>> es_mode_timeline;
    std::map<CellId, std::vector<RrcPoint>> per_cell_rrc_timeline;
    std::map<SectorId, std::vector<SectorSample>> sector_series;

    bool operator==(const MetricsReport&) const = default;
};

/// Derives every KPI from the log alone; throws CorruptLog on malformed or truncated logs.
MetricsReport compute_metrics(const EventLog& log);

/// UE -> serving cell at the end of the run, reconstructed from the log.
std::map<UeId, CellId> final_attachments(const EventLog& log);

std::string metrics_to_json(const MetricsReport& report);
MetricsReport metrics_from_json(std::string_view json_text);

/// `metric,value` summary.
void write_metrics_csv(std::ostream& out, const MetricsReport& report);
/// `timestamp,sector,load,predicted,awake_capacity_count` rows.
void write_plot_data(std::ostream& out, const MetricsReport& report);
/// Short human-readable summary.
void write_summary(std::ostream& out, const MetricsReport& report);

}  // namespace ricsim
