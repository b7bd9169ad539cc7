#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "ricsim/es_rapp.hpp"
#include "ricsim/event_log.hpp"
#include "ricsim/metrics.hpp"
#include "ricsim/topology.hpp"
#include "ricsim/traffic.hpp"
#include "ricsim/ts_xapp.hpp"

namespace ricsim {

struct InitialUe {
    UeId id = 0;
    Position position;
    int demand_prb = 5;
    QosClass qos = QosClass::Broadband;
    CellId serving;
};

struct ScriptedAction {
    std::size_t interval = 0;
    bool sleep = true;
    CellId cell;
};

struct Scenario {
    Topology topology;
    std::optional<TrafficTrace> trace;
    TsConfig xapp;
    EsConfig rapp;
    NotificationMode mode = NotificationMode::A1;
    bool es_enabled = true;
    std::uint64_t seed = 1;
    std::size_t duration_intervals = 1;
    Timestamp interval_s = 900;
    int ue_demand_prb = 5;
    double voice_fraction = 0.0;
    double ue_min_radius_m = 30.0;
    double ue_max_radius_m = 300.0;
    int settle_budget = 16;
    std::vector<InitialUe> initial_ues;
    std::vector<ScriptedAction> script;

    /// Sets the notification mode on the scenario and both apps.
    void set_mode(NotificationMode m);
    void validate() const;  // throws ConfigError
};

/// Parses a scenario; relative topology/trace paths resolve against `base_dir`.
Scenario parse_scenario(std::string_view json_text, const std::filesystem::path& base_dir);
Scenario load_scenario(const std::filesystem::path& path);

struct RunResult {
    EventLog log;
    MetricsReport metrics;
    /// Live UE -> cell map at the end of the run.
    std::map<UeId, CellId> attachments;
};

/// Runs the scenario plus its always-awake shadow pass. Deterministic for a
/// fixed scenario and seed. Throws ConfigError or NonQuiescence.
RunResult run(const Scenario& scenario);

/// Metrics from a recorded log alone; equals the live run's metrics.
MetricsReport replay(const EventLog& log);

}  // namespace ricsim
