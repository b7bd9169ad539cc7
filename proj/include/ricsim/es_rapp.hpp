#pragma once

#include <cstddef>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ricsim/messages.hpp"
#include "ricsim/near_rt_ric.hpp"
#include "ricsim/topology.hpp"

namespace ricsim {

struct EsConfig {
    double theta_off = 0.5;  // sleep while projected utilization stays at or below this
    double theta_on = 0.8;   // wake once projected utilization exceeds this
    Timestamp min_dwell_s = 1800;
    int horizon_intervals = 2;
    int drain_timeout_epochs = 8;
    NotificationMode mode = NotificationMode::A1;
    bool auto_decide = true;
    std::string predictor = "seasonal_ewma";
    int history_days = 7;

    void validate(Timestamp granularity_s) const;  // throws ConfigError
};

EsConfig parse_es_config(std::string_view json_text);

/// Per-cell ring buffer of utilization samples at trace granularity.
class LoadHistory {
public:
    struct Sample {
        Timestamp ts = 0;
        double utilization = 0.0;
    };

    LoadHistory(Timestamp granularity_s, std::size_t capacity_intervals);

    /// Appends a sample; a repeated timestamp replaces the last sample.
    /// Throws GridError on gaps or going back in time.
    void record(const CellId& cell, Timestamp ts, double utilization);

    Timestamp granularity_s() const noexcept { return granularity_s_; }
    std::size_t capacity() const noexcept { return capacity_; }
    const std::map<CellId, std::deque<Sample>>& series() const noexcept { return series_; }
    /// Shortest per-cell history, in samples.
    std::size_t min_length() const noexcept;

private:
    Timestamp granularity_s_;
    std::size_t capacity_;
    std::map<CellId, std::deque<Sample>> series_;
};

/// Maps history to a utilization forecast in [0,1] per cell.
class Predictor {
public:
    virtual ~Predictor() = default;
    virtual std::string_view name() const noexcept = 0;
    /// Forecast `horizon_intervals` steps after each cell's last sample.
    /// Throws InsufficientHistory when less than a day is available.
    virtual std::map<CellId, double> predict(const LoadHistory& history, int horizon_intervals) const = 0;
};

/// Same-time-of-day mean over the available past days, corrected by an
/// EWMA (alpha 0.5) of the last four seasonal residuals at half weight.
class SeasonalEwmaPredictor final : public Predictor {
public:
    std::string_view name() const noexcept override { return "seasonal_ewma"; }
    std::map<CellId, double> predict(const LoadHistory& history, int horizon_intervals) const override;
};

std::unique_ptr<Predictor> make_predictor(std::string_view name);

struct EsMode {
    SectorId sector;
    int awake_capacity_count = 0;

    bool operator==(const EsMode&) const = default;
};

/// Coverage carrier plus capacity carriers of one sector, in wake order
/// (lowest band first; sleeping goes the other way).
struct SectorLayout {
    SectorId sector;
    CellId coverage;
    int coverage_prb = 0;
    std::vector<CellId> capacity;
    std::vector<int> capacity_prb;

    static SectorLayout from(const Topology& topology, const SectorId& sector);
    /// coverage capacity plus the first `awake` capacity carriers.
    double capacity_with(int awake) const;
    double total_capacity() const { return capacity_with(static_cast<int>(capacity.size())); }
};

/// Sum of predicted utilization times PRB capacity over every cell of the sector.
double projected_demand(const SectorLayout& layout, const std::map<CellId, double>& predictions);

/// Load-based mode choice with hysteresis and a minimum dwell time.
EsMode decide_mode(const SectorLayout& layout, const std::map<CellId, double>& predictions, const EsMode& current,
                   std::optional<Timestamp> last_change, Timestamp now, const EsConfig& config);

struct EsModeChange {
    Timestamp ts = 0;
    SectorId sector;
    int awake_capacity_count = 0;
};

struct EsDecisionRecord {
    Timestamp ts = 0;
    SectorId sector;
    double load = 0.0;
    std::optional<double> predicted;
    int awake_capacity_count = 0;
};

struct DrainTimeout {
    Timestamp ts = 0;
    CellId cell;
};

using RappEvent = std::variant<EsModeChange, EsDecisionRecord, DrainTimeout>;

/// Energy Saving rApp: forecasts sector load, picks the number of awake
/// capacity carriers and drives the switch-off / switch-on procedures.
class EsRapp {
public:
    static constexpr std::string_view kAppId = "es-rapp";

    EsRapp(const Topology& topology, Timestamp granularity_s, EsConfig config, std::unique_ptr<Predictor> predictor);

    Subscription subscription() const;

    /// KPM reports feed history and RRC counts; CCC indications track cell states.
    std::vector<Message> handle(const Message& message);

    /// Interval decision for every sector; returns protocol actions.
    std::vector<Message> step(Timestamp now);

    /// Scripted switch-off / switch-on of one capacity cell, bypassing the decision logic.
    std::vector<Message> force(const CellId& cell, bool sleep, Timestamp now);

    /// Advances pending procedures by one report epoch.
    std::vector<Message> epoch_tick(Timestamp now);

    bool has_pending() const noexcept;
    std::vector<RappEvent> take_events() { return std::exchange(events_, {}); }

    const EsConfig& config() const noexcept { return config_; }
    const LoadHistory& history() const noexcept { return history_; }
    EsMode mode(const SectorId& sector) const;
    std::optional<int> last_rrc(const CellId& cell) const;

    /// Initial ES mode of every sector.
    std::vector<EsModeChange> initial_modes(Timestamp ts) const;

private:
    enum class Phase { Awake, Draining, Finalizing, Asleep, Waking };

    struct CellTrack {
        Phase phase = Phase::Awake;
        int epochs = 0;
        std::optional<int> last_rrc;
        std::optional<EnergyState> state;
    };

    struct SectorTrack {
        SectorLayout layout;
        int awake = 0;
        std::optional<Timestamp> last_change;
        std::optional<Timestamp> previous_change;
    };

    std::vector<Message> begin_sleep(const CellId& cell, Timestamp now);
    std::vector<Message> begin_wake(const CellId& cell, Timestamp now);
    void note_mode(SectorTrack& sector, int awake, Timestamp now);
    static std::string policy_id_for(const CellId& cell);

    const Topology* topology_;
    EsConfig config_;
    std::unique_ptr<Predictor> predictor_;
    LoadHistory history_;
    std::map<CellId, CellTrack> cells_;
    std::map<SectorId, SectorTrack> sectors_;
    std::vector<RappEvent> events_;
};

}  // namespace ricsim
