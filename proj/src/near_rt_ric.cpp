#include "ricsim/near_rt_ric.hpp"

#include <algorithm>

#include "json_util.hpp"

namespace ricsim {

using detail::cell_json;
using detail::json;

void PolicyStore::put(const TspPolicy& policy) {
    auto [it, fresh] = live_.emplace(policy.policy_id, policy);
    if (!fresh && !(it->second == policy)) throw Error(ErrorCode::DuplicateId, policy.policy_id);
}

void PolicyStore::erase(const std::string& policy_id) {
    if (live_.erase(policy_id) == 0) throw Error(ErrorCode::UnknownId, policy_id);
}

bool PolicyStore::forbidden(const CellId& cell) const {
    for (const auto& [id, p] : live_)
        if (p.preference == Preference::Forbid &&
            std::find(p.scope_cells.begin(), p.scope_cells.end(), cell) != p.scope_cells.end())
            return true;
    return false;
}

std::vector<TspPolicy> PolicyStore::live() const {
    std::vector<TspPolicy> out;
    for (const auto& [id, p] : live_) out.push_back(p);
    return out;
}

std::string_view to_string(DenyReason r) noexcept {
    switch (r) {
        case DenyReason::PolicyForbidden: return "PolicyForbidden";
        case DenyReason::EnergyStateConflict: return "EnergyStateConflict";
        case DenyReason::NoHeadroom: return "NoHeadroom";
    }
    return "";
}

std::string_view to_string(ControlOutcome::Status s) noexcept {
    switch (s) {
        case ControlOutcome::Status::Success: return "success";
        case ControlOutcome::Status::Denied: return "denied";
        case ControlOutcome::Status::ExecutionFailed: return "failed";
    }
    return "";
}

std::string encode_audit(const AuditRecord& record) {
    const auto& c = record.command;
    json j = {{"type", "audit"},
              {"ts", c.ts},
              {"ue", c.ue},
              {"source", cell_json(c.source)},
              {"target", cell_json(c.target)},
              {"outcome", to_string(record.outcome.status)}};
    if (record.outcome.deny) j["reason"] = to_string(*record.outcome.deny);
    if (!record.outcome.failure.empty()) j["reason"] = record.outcome.failure;
    return j.dump();
}

AuditRecord decode_audit(std::string_view line) {
    const json j = detail::parse_or_throw(line, ErrorCode::DecodeError, "audit");
    detail::Reader r(j, "", ErrorCode::DecodeError);
    if (r.string("type") != "audit") r.fail("type", "expected audit");
    AuditRecord rec;
    rec.command = HandoverCommand{r.integer("ts"), r.integer("ue"), r.cell("source"), r.cell("target")};
    const std::string outcome = r.string("outcome");
    if (outcome == "success") {
        rec.outcome.status = ControlOutcome::Status::Success;
    } else if (outcome == "denied") {
        rec.outcome.status = ControlOutcome::Status::Denied;
        const std::string reason = r.string("reason");
        for (auto d : {DenyReason::PolicyForbidden, DenyReason::EnergyStateConflict, DenyReason::NoHeadroom})
            if (to_string(d) == reason) rec.outcome.deny = d;
        if (!rec.outcome.deny) r.fail("reason", "unknown deny reason");
    } else if (outcome == "failed") {
        rec.outcome.status = ControlOutcome::Status::ExecutionFailed;
        rec.outcome.failure = r.string("reason");
    } else {
        r.fail("outcome", "unknown outcome");
    }
    return rec;
}

void NearRtRic::subscribe(Subscription sub) {
    if (sub.kinds.empty()) throw Error(ErrorCode::ConfigError, "subscription of " + sub.subscriber + " has no kinds");
    AppId id = sub.subscriber;
    subscriptions_.insert_or_assign(std::move(id), std::move(sub));
}

std::vector<AppId> NearRtRic::route(const Message& message) const {
    const MessageKind kind = kind_of(message);
    const auto cell = subject_cell(message);
    std::vector<AppId> out;
    for (const auto& [id, sub] : subscriptions_) {
        if (!sub.kinds.count(kind)) continue;
        if (sub.cells && (!cell || !sub.cells->count(*cell))) continue;
        out.push_back(id);
    }
    return out;
}

ControlOutcome NearRtRic::submit_control(const HandoverCommand& command, Ran& ran) {
    ControlOutcome outcome;
    const Cell* target = ran.find_cell(command.target);
    const Cell* source = ran.find_cell(command.source);
    const bool ue_known = ran.has_ue(command.ue);

    if (!target || !source || command.source == command.target || !ue_known) {
        outcome.status = ControlOutcome::Status::ExecutionFailed;
        outcome.failure = !ue_known ? "unknown_ue" : "invalid_command";
    } else if (policies_.forbidden(command.target)) {
        outcome.status = ControlOutcome::Status::Denied;
        outcome.deny = DenyReason::PolicyForbidden;
    } else if (!is_awake(target->energy_state)) {
        outcome.status = ControlOutcome::Status::Denied;
        outcome.deny = DenyReason::EnergyStateConflict;
    } else if (target->prb_used + ran.ue(command.ue).demand_prb > target->prb_capacity) {
        outcome.status = ControlOutcome::Status::Denied;
        outcome.deny = DenyReason::NoHeadroom;
    } else {
        const Ue& ue = ran.ue(command.ue);
        if (!ue.serving || *ue.serving != command.source) {
            outcome.status = ControlOutcome::Status::ExecutionFailed;
            outcome.failure = "unknown_ue";
        } else {
            const AdmitResult r = ran.handover(command.ue, command.source, command.target);
            if (r != AdmitResult::Admitted) {
                outcome.status = ControlOutcome::Status::ExecutionFailed;
                outcome.failure = std::string(to_string(r));
            }
        }
    }
    audit_.push_back({command, outcome});
    return outcome;
}

A1PolicyChange NearRtRic::a1_put(const TspPolicy& policy, Timestamp ts) {
    validate_policy(policy, *topology_);
    policies_.put(policy);
    return A1PolicyChange{ts, policies_.live()};
}

A1PolicyChange NearRtRic::a1_delete(const std::string& policy_id, Timestamp ts) {
    policies_.erase(policy_id);
    return A1PolicyChange{ts, policies_.live()};
}

std::vector<AuditRecord> NearRtRic::take_new_audit() {
    std::vector<AuditRecord> out(audit_.begin() + static_cast<std::ptrdiff_t>(audit_cursor_), audit_.end());
    audit_cursor_ = audit_.size();
    return out;
}

}  // namespace ricsim
