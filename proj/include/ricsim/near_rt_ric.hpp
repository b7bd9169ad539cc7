#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ricsim/messages.hpp"
#include "ricsim/ran_model.hpp"

namespace ricsim {

using AppId = std::string;

struct Subscription {
    AppId subscriber;
    std::set<MessageKind> kinds;
    /// When set, only messages about these cells are delivered.
    std::optional<std::set<CellId>> cells;
};

class PolicyStore {
public:
    /// Re-putting an identical policy is a no-op; a different policy under a live id throws DuplicateId.
    void put(const TspPolicy& policy);
    /// Throws UnknownId.
    void erase(const std::string& policy_id);

    bool contains(const std::string& policy_id) const { return live_.count(policy_id) != 0; }
    /// True iff some live FORBID policy scopes the cell.
    bool forbidden(const CellId& cell) const;
    std::vector<TspPolicy> live() const;

private:
    std::map<std::string, TspPolicy> live_;
};

enum class DenyReason { PolicyForbidden, EnergyStateConflict, NoHeadroom };

std::string_view to_string(DenyReason r) noexcept;

struct ControlOutcome {
    enum class Status { Success, Denied, ExecutionFailed };

    Status status = Status::Success;
    std::optional<DenyReason> deny;
    /// Admission result or "unknown_ue" for execution failures.
    std::string failure;

    bool ok() const noexcept { return status == Status::Success; }
    bool operator==(const ControlOutcome&) const = default;
};

std::string_view to_string(ControlOutcome::Status s) noexcept;

struct AuditRecord {
    HandoverCommand command;
    ControlOutcome outcome;
};

/// Audit log line: `{"type":"audit","ts":...,"outcome":...}`.
std::string encode_audit(const AuditRecord& record);
AuditRecord decode_audit(std::string_view line);

/// Broker between the emulated RAN and the apps: subscription registry,
/// indication routing, A1 policy store and the control conflict guard.
class NearRtRic {
public:
    explicit NearRtRic(const Topology& topology) : topology_(&topology) {}

    /// Replaces any earlier subscription of the same app. Throws ConfigError if kinds is empty.
    void subscribe(Subscription sub);
    /// Subscribers matching kind and cell filter, in app id order.
    std::vector<AppId> route(const Message& message) const;

    /// Applies the conflict guard, then executes the handover on `ran`.
    /// Every call appends exactly one audit record.
    ControlOutcome submit_control(const HandoverCommand& command, Ran& ran);

    /// Validates and stores the policy; returns the push notification for A1 consumers.
    A1PolicyChange a1_put(const TspPolicy& policy, Timestamp ts);
    A1PolicyChange a1_delete(const std::string& policy_id, Timestamp ts);

    const PolicyStore& policies() const noexcept { return policies_; }
    const std::vector<AuditRecord>& audit_log() const noexcept { return audit_; }
    /// Audit records appended since the last call.
    std::vector<AuditRecord> take_new_audit();

private:
    const Topology* topology_;
    std::map<AppId, Subscription> subscriptions_;
    PolicyStore policies_;
    std::vector<AuditRecord> audit_;
    std::size_t audit_cursor_ = 0;
};

}  // namespace ricsim
