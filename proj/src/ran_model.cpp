#include "ricsim/ran_model.hpp"

#include <algorithm>
#include <cmath>

#include "ricsim/error.hpp"

namespace ricsim {

Cell Cell::from_config(const CellConfig& config) {
    Cell c;
    c.id = config.id;
    c.cgi = config.cgi;
    c.pci = config.pci;
    c.role = config.role;
    c.position = config.position;
    c.azimuth_deg = config.azimuth_deg;
    c.path_loss_offset_db = config.path_loss_offset_db;
    c.power = config.power;
    c.prb_capacity = config.prb_capacity;
    c.ces_switch = config.role == CellRole::Capacity;
    return c;
}

std::string_view to_string(AdmitResult r) noexcept {
    switch (r) {
        case AdmitResult::Admitted: return "admitted";
        case AdmitResult::RejectedEnergySaving: return "energy_saving";
        case AdmitResult::RejectedNoCapacity: return "no_capacity";
    }
    return "";
}

double rsrp_dbm(const Position& ue, const Cell& cell, const RadioParams& radio) {
    const double d = std::max(1.0, std::hypot(ue.x - cell.position.x, ue.y - cell.position.y));
    const double path_loss = radio.ref_loss_db + 10.0 * radio.path_loss_exponent * std::log10(d / radio.ref_distance_m);
    return radio.tx_power_dbm - path_loss - cell.path_loss_offset_db;
}

AdmitResult admit(Cell& cell, const Ue& ue) {
    if (cell.rrc_connected.count(ue.id))
        throw Error(ErrorCode::DuplicateId, "UE " + std::to_string(ue.id) + " already on " + to_string(cell.id));
    if (!is_awake(cell.energy_state)) return AdmitResult::RejectedEnergySaving;
    if (cell.prb_used + ue.demand_prb > cell.prb_capacity) return AdmitResult::RejectedNoCapacity;
    cell.rrc_connected.emplace(ue.id, ue.demand_prb);
    cell.prb_used += ue.demand_prb;
    return AdmitResult::Admitted;
}

void release(Cell& cell, UeId ue) {
    auto it = cell.rrc_connected.find(ue);
    if (it == cell.rrc_connected.end())
        throw Error(ErrorCode::UnknownUe, "UE " + std::to_string(ue) + " not on " + to_string(cell.id));
    cell.prb_used = std::max(0, cell.prb_used - it->second);
    cell.rrc_connected.erase(it);
}

EnergyState apply_energy_control(Cell& cell, EnergyControl control) {
    if (!cell.ces_switch) throw Error(ErrorCode::CesDisabled, to_string(cell.id));
    const EnergyState next =
        control == EnergyControl::ToBeEnergySaving ? EnergyState::ToBeEnergySaving : EnergyState::ToBeNotEnergySaving;
    if (!is_legal_transition(cell.energy_state, next))
        throw Error(ErrorCode::IllegalTransition, to_string(cell.id) + ": " + std::string(to_string(cell.energy_state)) +
                                                      " -> " + std::string(to_string(next)));
    cell.energy_state = next;
    cell.energy_control = control;
    return next;
}

EnergyState finalize_sleep(Cell& cell) {
    if (cell.energy_state == EnergyState::ToBeEnergySaving && cell.rrc_connected.empty())
        cell.energy_state = EnergyState::IsEnergySaving;
    return cell.energy_state;
}

EnergyState finalize_wake(Cell& cell) {
    if (cell.energy_state == EnergyState::ToBeNotEnergySaving) cell.energy_state = EnergyState::IsNotEnergySaving;
    return cell.energy_state;
}

double interval_energy(EnergyState state, int prb_used, const PowerModel& model, double interval_s) {
    if (state == EnergyState::IsEnergySaving) return model.p_sleep_w * interval_s;
    return (model.p_active_w + model.p_per_prb_w * prb_used) * interval_s;
}

double interval_energy(const Cell& cell, const PowerModel& model, double interval_s) {
    return interval_energy(cell.energy_state, cell.prb_used, model, interval_s);
}

Ran::Ran(const Topology& topology) : topology_(&topology) {
    cells_.reserve(topology.cells().size());
    for (const auto& c : topology.cells()) cells_.push_back(Cell::from_config(c));
}

const Cell* Ran::find_cell(const CellId& id) const noexcept {
    auto idx = topology_->index_of(id);
    return idx ? &cells_[*idx] : nullptr;
}

const Cell& Ran::cell(const CellId& id) const {
    if (const auto* c = find_cell(id)) return *c;
    throw Error(ErrorCode::UnknownCell, to_string(id));
}

Cell& Ran::mutable_cell(const CellId& id) { return const_cast<Cell&>(cell(id)); }

const Ue& Ran::ue(UeId id) const {
    auto it = ues_.find(id);
    if (it == ues_.end()) throw Error(ErrorCode::UnknownUe, std::to_string(id));
    return it->second;
}

void Ran::add_ue(Ue ue) {
    if (ue.demand_prb < 1) throw Error(ErrorCode::ConfigError, "UE demand must be at least one PRB");
    ue.serving.reset();
    const UeId id = ue.id;
    if (!ues_.emplace(id, std::move(ue)).second) throw Error(ErrorCode::DuplicateId, "UE " + std::to_string(id));
}

void Ran::remove_ue(UeId id) {
    if (ue(id).serving) detach(id);
    ues_.erase(id);
}

AdmitResult Ran::attach(UeId id, const CellId& cell_id) {
    Ue& u = const_cast<Ue&>(ue(id));
    if (u.serving) throw Error(ErrorCode::DuplicateId, "UE " + std::to_string(id) + " already attached");
    Cell& c = mutable_cell(cell_id);
    const AdmitResult r = admit(c, u);
    if (r == AdmitResult::Admitted) {
        u.serving = cell_id;
        dirty_.insert(cell_id);
    }
    return r;
}

void Ran::detach(UeId id) {
    Ue& u = const_cast<Ue&>(ue(id));
    if (!u.serving) throw Error(ErrorCode::UnknownUe, "UE " + std::to_string(id) + " is not attached");
    release(mutable_cell(*u.serving), id);
    dirty_.insert(*u.serving);
    u.serving.reset();
}

AdmitResult Ran::handover(UeId id, const CellId& source, const CellId& target) {
    const Ue& u = ue(id);
    if (!u.serving || *u.serving != source)
        throw Error(ErrorCode::UnknownUe, "UE " + std::to_string(id) + " is not served by " + to_string(source));
    Cell& tgt = mutable_cell(target);
    detach(id);
    const AdmitResult r = attach(id, tgt.id);
    if (r != AdmitResult::Admitted) {
        // put the UE back where it was; the source still has its PRBs free
        Cell& src = mutable_cell(source);
        src.rrc_connected.emplace(id, u.demand_prb);
        src.prb_used += u.demand_prb;
        const_cast<Ue&>(u).serving = source;
    }
    return r;
}

void Ran::emit(const Cell& cell, Timestamp ts) {
    indications_.push_back(CccIndication{ts, cell.id, cell.ces_switch, cell.energy_state, cell.energy_control});
}

EnergyState Ran::energy_control(const CellId& id, EnergyControl control, Timestamp ts) {
    Cell& c = mutable_cell(id);
    const EnergyState s = apply_energy_control(c, control);
    emit(c, ts);
    return s;
}

void Ran::set_ces_switch(Cell& cell, bool value, Timestamp ts) {
    if (value && cell.role == CellRole::Coverage)
        throw Error(ErrorCode::CesDisabled, "coverage cell " + to_string(cell.id) + " cannot enable energy saving");
    if (cell.ces_switch == value) return;
    if (!value && !is_awake(cell.energy_state))
        throw Error(ErrorCode::IllegalTransition, "cannot disable cesSwitch while " +
                                                      std::string(to_string(cell.energy_state)));
    cell.ces_switch = value;
    emit(cell, ts);
}

void Ran::o1_write(const O1Write& write) {
    validate(Message{write});
    Cell& c = mutable_cell(write.cell);
    if (write.attribute == O1Attribute::CesSwitch) {
        set_ces_switch(c, std::get<bool>(write.value), write.ts);
        return;
    }
    const EnergyState wanted = std::get<EnergyState>(write.value);
    if (wanted == c.energy_state) return;
    switch (wanted) {
        case EnergyState::IsEnergySaving:
            // walk the legal path; the node finishes the sleep on its next tick
            if (c.energy_state == EnergyState::IsNotEnergySaving) energy_control(c.id, EnergyControl::ToBeEnergySaving, write.ts);
            else if (c.energy_state != EnergyState::ToBeEnergySaving)
                throw Error(ErrorCode::IllegalTransition, "O1 sleep from " + std::string(to_string(c.energy_state)));
            break;
        case EnergyState::IsNotEnergySaving:
            if (c.energy_state == EnergyState::IsEnergySaving || c.energy_state == EnergyState::ToBeEnergySaving)
                energy_control(c.id, EnergyControl::ToBeNotEnergySaving, write.ts);
            break;
        default:
            throw Error(ErrorCode::IllegalTransition, "O1 may only write isEnergySaving or isNotEnergySaving");
    }
}

void Ran::tick(Timestamp ts) {
    for (auto& c : cells_) {
        const EnergyState before = c.energy_state;
        if (before == EnergyState::ToBeEnergySaving) finalize_sleep(c);
        else if (before == EnergyState::ToBeNotEnergySaving) finalize_wake(c);
        if (c.energy_state != before) emit(c, ts);
    }
}

std::vector<RsrpEntry> Ran::measure(UeId id, const SectorId& sector) const {
    const Ue& u = ue(id);
    std::vector<RsrpEntry> out;
    for (const auto& cid : topology_->sector_cells(sector))
        out.push_back({cid, rsrp_dbm(u.position, cell(cid), topology_->radio())});
    return out;
}

std::vector<CccIndication> Ran::take_indications() { return std::exchange(indications_, {}); }

std::set<CellId> Ran::take_dirty() { return std::exchange(dirty_, {}); }

std::size_t Ran::attached_count() const noexcept {
    std::size_t n = 0;
    for (const auto& c : cells_) n += c.rrc_count();
    return n;
}

}  // namespace ricsim
