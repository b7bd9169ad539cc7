#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ricsim/messages.hpp"
#include "ricsim/topology.hpp"
#include "ricsim/types.hpp"

namespace ricsim {

struct Ue {
    UeId id = 0;
    Position position;
    int demand_prb = 1;
    std::optional<CellId> serving;
    QosClass qos = QosClass::Broadband;
    /// Cell whose offered-load series produced this UE, if any.
    std::optional<CellId> home;
};

/// Mutable state of one carrier at one sector.
struct Cell {
    CellId id;
    std::string cgi;
    int pci = 0;
    CellRole role = CellRole::Capacity;
    Position position;
    double azimuth_deg = 0.0;
    double path_loss_offset_db = 0.0;
    PowerModel power;
    int prb_capacity = 0;
    bool ces_switch = false;
    EnergyState energy_state = EnergyState::IsNotEnergySaving;
    std::optional<EnergyControl> energy_control;
    /// Attached UEs and the PRBs each one holds.
    std::map<UeId, int> rrc_connected;
    int prb_used = 0;

    std::size_t rrc_count() const noexcept { return rrc_connected.size(); }
    double prb_utilization() const noexcept {
        return prb_capacity > 0 ? static_cast<double>(prb_used) / prb_capacity : 0.0;
    }

    static Cell from_config(const CellConfig& config);
};

enum class AdmitResult { Admitted, RejectedEnergySaving, RejectedNoCapacity };

std::string_view to_string(AdmitResult r) noexcept;

/// Log-distance path loss with a per-band offset; distance clamped to 1 m.
double rsrp_dbm(const Position& ue, const Cell& cell, const RadioParams& radio);

/// Admits `ue` if the cell is awake and has PRB headroom.
/// Throws DuplicateId if the UE is already attached here.
AdmitResult admit(Cell& cell, const Ue& ue);

/// Throws UnknownUe if `ue` is not attached.
void release(Cell& cell, UeId ue);

/// Writes energySavingControl. Throws CesDisabled or IllegalTransition.
EnergyState apply_energy_control(Cell& cell, EnergyControl control);

/// toBeEnergySaving -> isEnergySaving once the last UE has left; otherwise a no-op.
EnergyState finalize_sleep(Cell& cell);

/// toBeNotEnergySaving -> isNotEnergySaving; otherwise a no-op.
EnergyState finalize_wake(Cell& cell);

/// Energy drawn over one interval at the given state and load.
double interval_energy(EnergyState state, int prb_used, const PowerModel& model, double interval_s);
double interval_energy(const Cell& cell, const PowerModel& model, double interval_s);

/// The emulated E2 node(s): every cell and UE of the topology. Every
/// O-CES attribute change is queued as a CccIndication.
class Ran {
public:
    explicit Ran(const Topology& topology);

    const Topology& topology() const noexcept { return *topology_; }
    const std::vector<Cell>& cells() const noexcept { return cells_; }
    const Cell& cell(const CellId& id) const;
    const Cell* find_cell(const CellId& id) const noexcept;

    const std::map<UeId, Ue>& ues() const noexcept { return ues_; }
    const Ue& ue(UeId id) const;
    bool has_ue(UeId id) const noexcept { return ues_.count(id) != 0; }

    /// Registers an unattached UE. Throws DuplicateId.
    void add_ue(Ue ue);
    /// Detaches (if attached) and forgets the UE.
    void remove_ue(UeId id);

    AdmitResult attach(UeId ue, const CellId& cell);
    void detach(UeId ue);

    /// Moves a UE; on admission failure the UE is restored at the source.
    AdmitResult handover(UeId ue, const CellId& source, const CellId& target);

    EnergyState energy_control(const CellId& cell, EnergyControl control, Timestamp ts);
    void o1_write(const O1Write& write);

    /// Node-side completion of pending transitions (sleep once empty, wake).
    void tick(Timestamp ts);

    /// Per-cell RSRP for every cell of the UE's sector, ordered by CellId.
    std::vector<RsrpEntry> measure(UeId ue, const SectorId& sector) const;

    std::vector<CccIndication> take_indications();
    /// Cells whose connection count changed since the last call.
    std::set<CellId> take_dirty();

    std::size_t attached_count() const noexcept;

private:
    Cell& mutable_cell(const CellId& id);
    void emit(const Cell& cell, Timestamp ts);
    void set_ces_switch(Cell& cell, bool value, Timestamp ts);

    const Topology* topology_;
    std::vector<Cell> cells_;
    std::map<UeId, Ue> ues_;
    std::vector<CccIndication> indications_;
    std::set<CellId> dirty_;
};

}  // namespace ricsim
