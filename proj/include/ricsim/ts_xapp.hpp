#pragma once

#include <map>
#include <optional>
#include <set>
#include <string_view>
#include <vector>

#include "ricsim/messages.hpp"
#include "ricsim/near_rt_ric.hpp"

namespace ricsim {

struct TsConfig {
    NotificationMode mode = NotificationMode::A1;
    /// Voice UEs stay on a coverage cell whose RSRP is within this margin of the best.
    double voice_margin_db = 6.0;
    /// Undrained UEs are retried every this many report epochs.
    int retry_epochs = 1;
};

TsConfig parse_ts_config(std::string_view json_text);

struct CellView {
    CellRole role = CellRole::Capacity;
    int prb_capacity = 0;
    std::optional<KpmReport> last_kpm;
    std::optional<EnergyState> state;  // only known when subscribed to CCC
    std::set<UeId> attached;
    int prb_load = 0;  // sum of attached UE demands

    double utilization() const noexcept {
        return prb_capacity > 0 ? static_cast<double>(prb_load) / prb_capacity : 0.0;
    }
};

struct UeView {
    std::optional<CellId> serving;
    std::vector<RsrpEntry> rsrp;
    int demand_prb = 1;
    QosClass qos = QosClass::Broadband;
    std::optional<CellId> home;
};

/// The xApp's picture of the RAN, built only from messages it received.
struct TsWorldView {
    std::map<CellId, CellView> cells;
    std::map<UeId, UeView> ues;
    std::set<CellId> forbidden;
    std::set<CellId> to_be_energy_saving;

    /// forbidden plus cells last reported toBeEnergySaving.
    std::set<CellId> draining() const;
    bool is_draining(const CellId& cell) const;
    /// Known, not draining and not reported as (going) asleep.
    bool selectable(const CellId& cell) const;
};

/// PRBs promised to earlier commands of the same batch.
using Reservations = std::map<CellId, int>;

struct TargetOptions {
    double voice_margin_db = 6.0;
    const std::set<CellId>* exclude = nullptr;
    const Reservations* reserved = nullptr;
};

/// Best admissible cell for `ue` by RSRP, then lower utilization, then lower CellId.
std::optional<CellId> select_target(const UeView& ue, const TsWorldView& view, const TargetOptions& options = {});

/// One handover per UE of `cell` that has a viable target elsewhere.
/// `reserved`, when given, carries PRBs promised by other pending commands and is updated.
std::vector<HandoverCommand> drain(const CellId& cell, const TsWorldView& view, Timestamp ts,
                                   double voice_margin_db = 6.0, const std::set<UeId>& skip = {},
                                   Reservations* reserved = nullptr);

class TsXapp {
public:
    static constexpr std::string_view kAppId = "ts-xapp";

    explicit TsXapp(TsConfig config = {}) : config_(config) {}

    Subscription subscription() const;

    /// Dispatches any subscribed message; returns handover commands to submit.
    std::vector<HandoverCommand> handle(const Message& message);
    std::vector<HandoverCommand> on_policy_change(const A1PolicyChange& change);
    std::vector<HandoverCommand> on_ccc_indication(const CccIndication& indication);

    /// Initial association for an arriving UE whose measurement was already received.
    std::optional<CellId> place_arrival(UeId ue, int demand_prb, QosClass qos, std::optional<CellId> home) const;

    /// RIC control acknowledgement for a command this app issued.
    void on_control_outcome(const HandoverCommand& command, const ControlOutcome& outcome);

    /// Retry pass for draining cells that still hold UEs.
    std::vector<HandoverCommand> epoch_tick(Timestamp ts);

    bool has_inflight() const noexcept { return !inflight_.empty(); }
    const TsWorldView& view() const noexcept { return view_; }
    const TsConfig& config() const noexcept { return config_; }

private:
    std::vector<HandoverCommand> drain_cells(const std::vector<CellId>& cells, Timestamp ts);
    void move_ue(UeId ue, const std::optional<CellId>& to);

    TsConfig config_;
    TsWorldView view_;
    std::map<UeId, HandoverCommand> inflight_;
    Timestamp now_ = 0;
    long epoch_ = 0;
};

}  // namespace ricsim
