#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ricsim/topology.hpp"
#include "ricsim/types.hpp"

namespace ricsim {

/// E2SM-KPM cell load report.
struct KpmReport {
    Timestamp ts = 0;
    CellId cell;
    double prb_utilization = 0.0;
    int rrc_count = 0;

    bool operator==(const KpmReport&) const = default;
};

struct RsrpEntry {
    CellId cell;
    double rsrp_dbm = 0.0;

    bool operator==(const RsrpEntry&) const = default;
};

/// E2SM-RC REPORT Style 1 (message copy): per-UE RSRP measurements.
struct RcMeasurement {
    Timestamp ts = 0;
    UeId ue = 0;
    std::vector<RsrpEntry> rsrp;

    bool operator==(const RcMeasurement&) const = default;
};

struct NodeCellInfo {
    CellId cell;
    std::string cgi;
    int pci = 0;
    CellRole role = CellRole::Capacity;
    int prb_capacity = 0;

    bool operator==(const NodeCellInfo&) const = default;
};

/// E2SM-RC REPORT Style 3 (E2 node information change).
struct RcNodeInfo {
    Timestamp ts = 0;
    std::vector<NodeCellInfo> cells;

    bool operator==(const RcNodeInfo&) const = default;
};

/// E2SM-RC REPORT Style 4 (UE information change).
struct RcUeInfo {
    Timestamp ts = 0;
    UeId ue = 0;
    bool attached = true;
    CellId serving;  // the cell attached to, or detached from
    int demand_prb = 1;
    QosClass qos = QosClass::Broadband;
    std::optional<CellId> home;

    bool operator==(const RcUeInfo&) const = default;
};

/// E2SM-RC CONTROL Style 3 (connected mode mobility).
struct HandoverCommand {
    Timestamp ts = 0;
    UeId ue = 0;
    CellId source;
    CellId target;

    bool operator==(const HandoverCommand&) const = default;
};

/// E2SM-CCC indication carrying the O-CES attributes after a change.
struct CccIndication {
    Timestamp ts = 0;
    CellId cell;
    bool ces_switch = false;
    EnergyState energy_state = EnergyState::IsNotEnergySaving;
    std::optional<EnergyControl> control;

    bool operator==(const CccIndication&) const = default;
};

/// E2SM-CCC control writing energySavingControl.
struct CccControl {
    Timestamp ts = 0;
    CellId cell;
    EnergyControl control = EnergyControl::ToBeEnergySaving;

    bool operator==(const CccControl&) const = default;
};

enum class Preference { Forbid, Avoid, Prefer, Shall };

std::string_view to_string(Preference p) noexcept;
std::optional<Preference> preference_from(std::string_view s) noexcept;

/// A1 traffic-steering-preference policy.
struct TspPolicy {
    std::string policy_id;
    Preference preference = Preference::Forbid;
    std::vector<CellId> scope_cells;

    bool operator==(const TspPolicy&) const = default;
};

struct A1PolicyPut {
    Timestamp ts = 0;
    TspPolicy policy;

    bool operator==(const A1PolicyPut&) const = default;
};

struct A1PolicyDelete {
    Timestamp ts = 0;
    std::string policy_id;

    bool operator==(const A1PolicyDelete&) const = default;
};

/// Broker push to A1 consumers after the live policy set changed.
struct A1PolicyChange {
    Timestamp ts = 0;
    std::vector<TspPolicy> live;

    bool operator==(const A1PolicyChange&) const = default;
};

enum class O1Attribute { EnergySavingState, CesSwitch };

struct O1Write {
    Timestamp ts = 0;
    CellId cell;
    O1Attribute attribute = O1Attribute::EnergySavingState;
    std::variant<EnergyState, bool> value = EnergyState::IsNotEnergySaving;

    bool operator==(const O1Write&) const = default;
};

using Message = std::variant<KpmReport, RcMeasurement, RcNodeInfo, RcUeInfo, HandoverCommand, CccIndication,
                             CccControl, A1PolicyPut, A1PolicyDelete, A1PolicyChange, O1Write>;

enum class MessageKind {
    KpmReport,
    RcMeasurement,
    RcNodeInfo,
    RcUeInfo,
    HandoverCommand,
    CccIndication,
    CccControl,
    A1PolicyPut,
    A1PolicyDelete,
    A1PolicyChange,
    O1Write,
};

MessageKind kind_of(const Message& m) noexcept;
/// The `type` discriminator used on the wire.
std::string_view type_name(MessageKind k) noexcept;
std::optional<MessageKind> kind_from_type(std::string_view type) noexcept;
Timestamp timestamp_of(const Message& m) noexcept;
/// The cell a message is about, for subscription cell filters.
std::optional<CellId> subject_cell(const Message& m) noexcept;

/// Checks the per-type invariants; throws InvalidMessage.
void validate(const Message& m);

/// One JSON object without trailing newline. Validates first.
std::string encode(const Message& m);
/// Inverse of encode; throws DecodeError naming the offending field path.
Message decode(std::string_view line);

/// A policy is admissible iff every scoped cell exists and none is on the
/// coverage layer. Throws UnknownCell or CoverageForbidden.
void validate_policy(const TspPolicy& policy, const Topology& topology);

}  // namespace ricsim
