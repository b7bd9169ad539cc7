#include "ricsim/messages.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "json_util.hpp"

namespace ricsim {

using detail::cell_json;
using detail::json;
using detail::Reader;

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidMessage, what); }

json policy_json(const TspPolicy& p) {
    json scope = json::array();
    for (const auto& c : p.scope_cells) scope.push_back(cell_json(c));
    return {{"policy_id", p.policy_id}, {"preference", to_string(p.preference)}, {"scope_cells", std::move(scope)}};
}

TspPolicy policy_from(const Reader& r) {
    TspPolicy p;
    p.policy_id = r.string("policy_id");
    auto pref = preference_from(r.string("preference"));
    if (!pref) r.fail("preference", "unknown preference");
    p.preference = *pref;
    const json& scope = r.array("scope_cells");
    for (std::size_t i = 0; i < scope.size(); ++i)
        p.scope_cells.push_back(r.cell_from(scope[i], "scope_cells/" + std::to_string(i)));
    return p;
}

void validate_policy_shape(const TspPolicy& p) {
    if (p.policy_id.empty()) invalid("policy_id must be non-empty");
    if (p.scope_cells.empty()) invalid("policy " + p.policy_id + " has empty scope_cells");
}

EnergyState state_field(const Reader& r, const char* field) {
    auto s = energy_state_from(r.string(field));
    if (!s) r.fail(field, "unknown energy state");
    return *s;
}

EnergyControl control_field(const Reader& r, const char* field) {
    auto c = energy_control_from(r.string(field));
    if (!c) r.fail(field, "unknown energy control");
    return *c;
}

}  // namespace

std::string_view to_string(Preference p) noexcept {
    switch (p) {
        case Preference::Forbid: return "FORBID";
        case Preference::Avoid: return "AVOID";
        case Preference::Prefer: return "PREFER";
        case Preference::Shall: return "SHALL";
    }
    return "";
}

std::optional<Preference> preference_from(std::string_view s) noexcept {
    if (s == "FORBID") return Preference::Forbid;
    if (s == "AVOID") return Preference::Avoid;
    if (s == "PREFER") return Preference::Prefer;
    if (s == "SHALL") return Preference::Shall;
    return std::nullopt;
}

MessageKind kind_of(const Message& m) noexcept { return static_cast<MessageKind>(m.index()); }

std::string_view type_name(MessageKind k) noexcept {
    switch (k) {
        case MessageKind::KpmReport: return "kpm_report";
        case MessageKind::RcMeasurement: return "rc_measurement";
        case MessageKind::RcNodeInfo: return "rc_node_info";
        case MessageKind::RcUeInfo: return "rc_ue_info";
        case MessageKind::HandoverCommand: return "handover_command";
        case MessageKind::CccIndication: return "ccc_indication";
        case MessageKind::CccControl: return "ccc_control";
        case MessageKind::A1PolicyPut: return "a1_policy_put";
        case MessageKind::A1PolicyDelete: return "a1_policy_delete";
        case MessageKind::A1PolicyChange: return "a1_policy_change";
        case MessageKind::O1Write: return "o1_write";
    }
    return "";
}

std::optional<MessageKind> kind_from_type(std::string_view type) noexcept {
    for (int k = 0; k <= static_cast<int>(MessageKind::O1Write); ++k)
        if (type_name(static_cast<MessageKind>(k)) == type) return static_cast<MessageKind>(k);
    return std::nullopt;
}

Timestamp timestamp_of(const Message& m) noexcept {
    return std::visit([](const auto& v) { return v.ts; }, m);
}

std::optional<CellId> subject_cell(const Message& m) noexcept {
    return std::visit(overloaded{
                          [](const KpmReport& v) -> std::optional<CellId> { return v.cell; },
                          [](const RcUeInfo& v) -> std::optional<CellId> { return v.serving; },
                          [](const HandoverCommand& v) -> std::optional<CellId> { return v.target; },
                          [](const CccIndication& v) -> std::optional<CellId> { return v.cell; },
                          [](const CccControl& v) -> std::optional<CellId> { return v.cell; },
                          [](const O1Write& v) -> std::optional<CellId> { return v.cell; },
                          [](const auto&) -> std::optional<CellId> { return std::nullopt; },
                      },
                      m);
}

void validate(const Message& m) {
    std::visit(overloaded{
                   [](const KpmReport& v) {
                       if (!(v.prb_utilization >= 0.0 && v.prb_utilization <= 1.0))
                           invalid("prb_utilization outside [0,1]");
                       if (v.rrc_count < 0) invalid("negative rrc_count");
                   },
                   [](const RcMeasurement& v) {
                       if (v.rsrp.empty()) invalid("measurement report without cells");
                       for (const auto& e : v.rsrp)
                           if (!std::isfinite(e.rsrp_dbm)) invalid("non-finite rsrp");
                   },
                   [](const RcUeInfo& v) {
                       if (v.demand_prb < 1) invalid("demand_prb must be >= 1");
                   },
                   [](const HandoverCommand& v) {
                       if (v.source == v.target) invalid("handover source equals target");
                   },
                   [](const A1PolicyPut& v) { validate_policy_shape(v.policy); },
                   [](const A1PolicyDelete& v) {
                       if (v.policy_id.empty()) invalid("policy_id must be non-empty");
                   },
                   [](const A1PolicyChange& v) {
                       std::set<std::string> ids;
                       for (const auto& p : v.live) {
                           validate_policy_shape(p);
                           if (!ids.insert(p.policy_id).second) invalid("duplicate live policy " + p.policy_id);
                       }
                   },
                   [](const O1Write& v) {
                       const bool is_state = std::holds_alternative<EnergyState>(v.value);
                       if ((v.attribute == O1Attribute::EnergySavingState) != is_state)
                           invalid("O1 value type does not match attribute");
                   },
                   [](const auto&) {},
               },
               m);
}

std::string encode(const Message& m) {
    validate(m);
    json j;
    j["type"] = type_name(kind_of(m));
    j["ts"] = timestamp_of(m);
    std::visit(overloaded{
                   [&](const KpmReport& v) {
                       j["cell"] = cell_json(v.cell);
                       j["prb_utilization"] = v.prb_utilization;
                       j["rrc_count"] = v.rrc_count;
                   },
                   [&](const RcMeasurement& v) {
                       j["ue"] = v.ue;
                       json list = json::array();
                       for (const auto& e : v.rsrp) list.push_back({{"cell", cell_json(e.cell)}, {"dbm", e.rsrp_dbm}});
                       j["rsrp"] = std::move(list);
                   },
                   [&](const RcNodeInfo& v) {
                       json list = json::array();
                       for (const auto& c : v.cells)
                           list.push_back({{"cell", cell_json(c.cell)},
                                           {"cgi", c.cgi},
                                           {"pci", c.pci},
                                           {"role", to_string(c.role)},
                                           {"prb_capacity", c.prb_capacity}});
                       j["cells"] = std::move(list);
                   },
                   [&](const RcUeInfo& v) {
                       j["ue"] = v.ue;
                       j["attached"] = v.attached;
                       j["serving"] = cell_json(v.serving);
                       j["demand_prb"] = v.demand_prb;
                       j["qos"] = to_string(v.qos);
                       if (v.home) j["home"] = cell_json(*v.home);
                   },
                   [&](const HandoverCommand& v) {
                       j["ue"] = v.ue;
                       j["source"] = cell_json(v.source);
                       j["target"] = cell_json(v.target);
                   },
                   [&](const CccIndication& v) {
                       j["cell"] = cell_json(v.cell);
                       j["cesSwitch"] = v.ces_switch;
                       j["energySavingState"] = to_string(v.energy_state);
                       if (v.control) j["energySavingControl"] = to_string(*v.control);
                   },
                   [&](const CccControl& v) {
                       j["cell"] = cell_json(v.cell);
                       j["energySavingControl"] = to_string(v.control);
                   },
                   [&](const A1PolicyPut& v) { j["policy"] = policy_json(v.policy); },
                   [&](const A1PolicyDelete& v) { j["policy_id"] = v.policy_id; },
                   [&](const A1PolicyChange& v) {
                       json list = json::array();
                       for (const auto& p : v.live) list.push_back(policy_json(p));
                       j["live"] = std::move(list);
                   },
                   [&](const O1Write& v) {
                       j["cell"] = cell_json(v.cell);
                       if (v.attribute == O1Attribute::EnergySavingState) {
                           j["attribute"] = "energySavingState";
                           j["value"] = to_string(std::get<EnergyState>(v.value));
                       } else {
                           j["attribute"] = "cesSwitch";
                           j["value"] = std::get<bool>(v.value);
                       }
                   },
               },
               m);
    return j.dump();
}

Message decode(std::string_view line) {
    const json j = detail::parse_or_throw(line, ErrorCode::DecodeError, "message");
    Reader r(j, "", ErrorCode::DecodeError);
    const std::string type = r.string("type");
    auto kind = kind_from_type(type);
    if (!kind) r.fail("type", "unknown message type '" + type + "'");
    const Timestamp ts = r.integer("ts");

    Message out;
    switch (*kind) {
        case MessageKind::KpmReport:
            out = KpmReport{ts, r.cell("cell"), r.number("prb_utilization"), static_cast<int>(r.integer("rrc_count"))};
            break;
        case MessageKind::RcMeasurement: {
            RcMeasurement m{ts, r.integer("ue"), {}};
            const json& list = r.array("rsrp");
            for (std::size_t i = 0; i < list.size(); ++i) {
                Reader e = r.element(list[i], i, "rsrp");
                m.rsrp.push_back({e.cell("cell"), e.number("dbm")});
            }
            out = std::move(m);
            break;
        }
        case MessageKind::RcNodeInfo: {
            RcNodeInfo m{ts, {}};
            const json& list = r.array("cells");
            for (std::size_t i = 0; i < list.size(); ++i) {
                Reader e = r.element(list[i], i, "cells");
                auto role = cell_role_from(e.string("role"));
                if (!role) e.fail("role", "unknown role");
                m.cells.push_back({e.cell("cell"), e.string("cgi"), static_cast<int>(e.integer("pci")), *role,
                                   static_cast<int>(e.integer("prb_capacity"))});
            }
            out = std::move(m);
            break;
        }
        case MessageKind::RcUeInfo: {
            RcUeInfo m;
            m.ts = ts;
            m.ue = r.integer("ue");
            m.attached = r.boolean("attached");
            m.serving = r.cell("serving");
            m.demand_prb = static_cast<int>(r.integer("demand_prb"));
            auto q = qos_class_from(r.string("qos"));
            if (!q) r.fail("qos", "unknown QoS class");
            m.qos = *q;
            if (r.has("home")) m.home = r.cell("home");
            out = std::move(m);
            break;
        }
        case MessageKind::HandoverCommand:
            out = HandoverCommand{ts, r.integer("ue"), r.cell("source"), r.cell("target")};
            break;
        case MessageKind::CccIndication: {
            CccIndication m{ts, r.cell("cell"), r.boolean("cesSwitch"), state_field(r, "energySavingState"), {}};
            if (r.has("energySavingControl")) m.control = control_field(r, "energySavingControl");
            out = m;
            break;
        }
        case MessageKind::CccControl:
            out = CccControl{ts, r.cell("cell"), control_field(r, "energySavingControl")};
            break;
        case MessageKind::A1PolicyPut:
            out = A1PolicyPut{ts, policy_from(r.child("policy"))};
            break;
        case MessageKind::A1PolicyDelete:
            out = A1PolicyDelete{ts, r.string("policy_id")};
            break;
        case MessageKind::A1PolicyChange: {
            A1PolicyChange m{ts, {}};
            const json& list = r.array("live");
            for (std::size_t i = 0; i < list.size(); ++i) m.live.push_back(policy_from(r.element(list[i], i, "live")));
            out = std::move(m);
            break;
        }
        case MessageKind::O1Write: {
            O1Write m;
            m.ts = ts;
            m.cell = r.cell("cell");
            const std::string attr = r.string("attribute");
            if (attr == "energySavingState") {
                m.attribute = O1Attribute::EnergySavingState;
                m.value = state_field(r, "value");
            } else if (attr == "cesSwitch") {
                m.attribute = O1Attribute::CesSwitch;
                m.value = r.boolean("value");
            } else {
                r.fail("attribute", "unknown O1 attribute");
            }
            out = std::move(m);
            break;
        }
    }

    try {
        validate(out);
    } catch (const Error& e) {
        throw Error(ErrorCode::DecodeError, e.what());
    }
    return out;
}

void validate_policy(const TspPolicy& policy, const Topology& topology) {
    validate_policy_shape(policy);
    for (const auto& id : policy.scope_cells) {
        const auto* cell = topology.find(id);
        if (!cell) throw Error(ErrorCode::UnknownCell, "policy " + policy.policy_id + " scopes " + to_string(id));
        if (cell->role == CellRole::Coverage)
            throw Error(ErrorCode::CoverageForbidden,
                        "policy " + policy.policy_id + " scopes coverage cell " + to_string(id));
    }
}

}  // namespace ricsim
