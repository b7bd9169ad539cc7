#include "ricsim/ts_xapp.hpp"

#include <algorithm>

#include "json_util.hpp"

namespace ricsim {

TsConfig parse_ts_config(std::string_view json_text) {
    const auto root = detail::parse_or_throw(json_text, ErrorCode::ConfigError, "xApp config");
    detail::Reader r(root, "", ErrorCode::ConfigError);
    TsConfig cfg;
    if (r.has("mode")) {
        auto m = notification_mode_from(r.string("mode"));
        if (!m) r.fail("mode", "expected a1|ccc");
        cfg.mode = *m;
    }
    if (r.has("voice_margin_db")) cfg.voice_margin_db = r.number("voice_margin_db");
    if (r.has("retry_epochs")) cfg.retry_epochs = static_cast<int>(r.integer("retry_epochs"));
    if (cfg.retry_epochs < 1) r.fail("retry_epochs", "must be >= 1");
    return cfg;
}

std::set<CellId> TsWorldView::draining() const {
    std::set<CellId> out = forbidden;
    out.insert(to_be_energy_saving.begin(), to_be_energy_saving.end());
    return out;
}

bool TsWorldView::is_draining(const CellId& cell) const {
    return forbidden.count(cell) || to_be_energy_saving.count(cell);
}

bool TsWorldView::selectable(const CellId& cell) const {
    auto it = cells.find(cell);
    if (it == cells.end() || is_draining(cell)) return false;
    return !it->second.state || is_awake(*it->second.state);
}

namespace {

struct Candidate {
    CellId cell;
    double rsrp = 0.0;
    double utilization = 0.0;
    CellRole role = CellRole::Capacity;
};

bool better(const Candidate& a, const Candidate& b) {
    if (a.rsrp != b.rsrp) return a.rsrp > b.rsrp;
    if (a.utilization != b.utilization) return a.utilization < b.utilization;
    return a.cell < b.cell;
}

}  // namespace

std::optional<CellId> select_target(const UeView& ue, const TsWorldView& view, const TargetOptions& options) {
    std::vector<Candidate> candidates;
    for (const auto& m : ue.rsrp) {
        if (options.exclude && options.exclude->count(m.cell)) continue;
        if (!view.selectable(m.cell)) continue;
        const CellView& cv = view.cells.at(m.cell);
        int load = cv.prb_load;
        if (options.reserved) {
            auto it = options.reserved->find(m.cell);
            if (it != options.reserved->end()) load += it->second;
        }
        if (load + ue.demand_prb > cv.prb_capacity) continue;
        candidates.push_back({m.cell, m.rsrp_dbm, cv.prb_capacity > 0 ? double(load) / cv.prb_capacity : 1.0, cv.role});
    }
    if (candidates.empty()) return std::nullopt;

    const Candidate best = *std::min_element(candidates.begin(), candidates.end(), better);
    if (ue.qos == QosClass::Voice && best.role != CellRole::Coverage) {
        std::optional<Candidate> macro;
        for (const auto& c : candidates)
            if (c.role == CellRole::Coverage && c.rsrp >= best.rsrp - options.voice_margin_db &&
                (!macro || better(c, *macro)))
                macro = c;
        if (macro) return macro->cell;
    }
    return best.cell;
}

std::vector<HandoverCommand> drain(const CellId& cell, const TsWorldView& view, Timestamp ts, double voice_margin_db,
                                   const std::set<UeId>& skip, Reservations* shared) {
    std::vector<HandoverCommand> out;
    auto it = view.cells.find(cell);
    if (it == view.cells.end()) return out;

    const std::set<CellId> exclude{cell};
    Reservations local;
    Reservations& reserved = shared ? *shared : local;
    TargetOptions options{voice_margin_db, &exclude, &reserved};
    for (UeId id : it->second.attached) {
        if (skip.count(id)) continue;
        auto u = view.ues.find(id);
        if (u == view.ues.end()) continue;
        if (auto target = select_target(u->second, view, options)) {
            reserved[*target] += u->second.demand_prb;
            out.push_back(HandoverCommand{ts, id, cell, *target});
        }
    }
    return out;
}

Subscription TsXapp::subscription() const {
    Subscription sub;
    sub.subscriber = AppId(kAppId);
    sub.kinds = {MessageKind::KpmReport, MessageKind::RcMeasurement, MessageKind::RcNodeInfo, MessageKind::RcUeInfo};
    if (config_.mode == NotificationMode::A1) sub.kinds.insert(MessageKind::A1PolicyChange);
    else sub.kinds.insert(MessageKind::CccIndication);
    return sub;
}

void TsXapp::move_ue(UeId id, const std::optional<CellId>& to) {
    auto& ue = view_.ues[id];
    if (ue.serving) {
        auto it = view_.cells.find(*ue.serving);
        if (it != view_.cells.end() && it->second.attached.erase(id)) it->second.prb_load -= ue.demand_prb;
    }
    ue.serving = to;
    if (to) {
        auto& cv = view_.cells[*to];
        if (cv.attached.insert(id).second) cv.prb_load += ue.demand_prb;
    }
}

std::vector<HandoverCommand> TsXapp::handle(const Message& message) {
    now_ = std::max(now_, timestamp_of(message));
    if (const auto* kpm = std::get_if<KpmReport>(&message)) {
        view_.cells[kpm->cell].last_kpm = *kpm;
    } else if (const auto* node = std::get_if<RcNodeInfo>(&message)) {
        for (const auto& c : node->cells) {
            auto& cv = view_.cells[c.cell];
            cv.role = c.role;
            cv.prb_capacity = c.prb_capacity;
        }
    } else if (const auto* meas = std::get_if<RcMeasurement>(&message)) {
        view_.ues[meas->ue].rsrp = meas->rsrp;
    } else if (const auto* info = std::get_if<RcUeInfo>(&message)) {
        if (info->attached) {
            auto& ue = view_.ues[info->ue];
            if (!ue.serving || *ue.serving != info->serving) {
                if (ue.serving) move_ue(info->ue, std::nullopt);
                ue.demand_prb = info->demand_prb;
                ue.qos = info->qos;
                ue.home = info->home;
                move_ue(info->ue, info->serving);
            }
        } else if (view_.ues.count(info->ue)) {
            move_ue(info->ue, std::nullopt);
            view_.ues.erase(info->ue);
            inflight_.erase(info->ue);
        }
    } else if (const auto* change = std::get_if<A1PolicyChange>(&message)) {
        return on_policy_change(*change);
    } else if (const auto* ind = std::get_if<CccIndication>(&message)) {
        return on_ccc_indication(*ind);
    }
    return {};
}

std::vector<HandoverCommand> TsXapp::on_policy_change(const A1PolicyChange& change) {
    now_ = std::max(now_, change.ts);
    std::set<CellId> forbidden;
    for (const auto& p : change.live)
        if (p.preference == Preference::Forbid) forbidden.insert(p.scope_cells.begin(), p.scope_cells.end());

    std::vector<CellId> fresh;
    for (const auto& c : forbidden)
        if (!view_.forbidden.count(c)) fresh.push_back(c);
    view_.forbidden = std::move(forbidden);

    return drain_cells(fresh, change.ts);
}

std::vector<HandoverCommand> TsXapp::on_ccc_indication(const CccIndication& ind) {
    now_ = std::max(now_, ind.ts);
    auto& cv = view_.cells[ind.cell];
    const bool changed = !cv.state || *cv.state != ind.energy_state;
    cv.state = ind.energy_state;
    if (!changed) return {};

    if (ind.energy_state == EnergyState::ToBeEnergySaving) {
        view_.to_be_energy_saving.insert(ind.cell);
        return drain_cells({ind.cell}, ind.ts);
    }
    view_.to_be_energy_saving.erase(ind.cell);
    return {};
}

std::optional<CellId> TsXapp::place_arrival(UeId id, int demand_prb, QosClass qos, std::optional<CellId> home) const {
    auto it = view_.ues.find(id);
    if (it == view_.ues.end()) return std::nullopt;
    UeView ue = it->second;
    ue.demand_prb = demand_prb;
    ue.qos = qos;
    ue.home = home;

    // offered load returns to its own carrier whenever that carrier can take it
    if (qos == QosClass::Broadband && home && view_.selectable(*home)) {
        const bool measured =
            std::any_of(ue.rsrp.begin(), ue.rsrp.end(), [&](const RsrpEntry& e) { return e.cell == *home; });
        const CellView& cv = view_.cells.at(*home);
        if (measured && cv.prb_load + demand_prb <= cv.prb_capacity) return home;
    }
    return select_target(ue, view_, TargetOptions{config_.voice_margin_db, nullptr, nullptr});
}

void TsXapp::on_control_outcome(const HandoverCommand& command, const ControlOutcome& outcome) {
    inflight_.erase(command.ue);
    if (outcome.ok()) move_ue(command.ue, command.target);
}

std::vector<HandoverCommand> TsXapp::epoch_tick(Timestamp ts) {
    now_ = std::max(now_, ts);
    ++epoch_;
    if (epoch_ % config_.retry_epochs != 0) return {};
    const auto draining = view_.draining();
    return drain_cells(std::vector<CellId>(draining.begin(), draining.end()), ts);
}

std::vector<HandoverCommand> TsXapp::drain_cells(const std::vector<CellId>& cells, Timestamp ts) {
    // commands still awaiting their acknowledgement keep their PRBs reserved
    Reservations reserved;
    std::set<UeId> skip;
    for (const auto& [ue, cmd] : inflight_) {
        skip.insert(ue);
        auto it = view_.ues.find(ue);
        reserved[cmd.target] += it != view_.ues.end() ? it->second.demand_prb : 0;
    }
    std::vector<HandoverCommand> out;
    for (const auto& cell : cells) {
        auto cmds = drain(cell, view_, ts, config_.voice_margin_db, skip, &reserved);
        for (const auto& c : cmds) {
            inflight_.emplace(c.ue, c);
            skip.insert(c.ue);
        }
        out.insert(out.end(), cmds.begin(), cmds.end());
    }
    return out;
}

}  // namespace ricsim
