#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace ricsim {

using UeId = std::int64_t;
using Timestamp = std::int64_t;  // integer seconds since scenario epoch

/// One carrier instance at one sector.
struct CellId {
    int site = 0;
    int sector = 0;
    int band = 0;

    auto operator<=>(const CellId&) const = default;
};

std::string to_string(const CellId& id);

/// (site, sector) pair; offered load and ES modes are tracked per sector.
struct SectorId {
    int site = 0;
    int sector = 0;

    auto operator<=>(const SectorId&) const = default;
};

inline SectorId sector_of(const CellId& id) { return {id.site, id.sector}; }

std::string to_string(const SectorId& id);

enum class EnergyState { IsNotEnergySaving, ToBeEnergySaving, IsEnergySaving, ToBeNotEnergySaving };

/// Value of the energySavingControl attribute.
enum class EnergyControl { ToBeEnergySaving, ToBeNotEnergySaving };

enum class CellRole { Coverage, Capacity };

enum class QosClass { Broadband, Voice };

/// Notification path between the ES rApp and the TS xApp.
enum class NotificationMode { A1, Ccc };

// Wire names follow the O-CES attribute spelling.
std::string_view to_string(EnergyState s) noexcept;
std::string_view to_string(EnergyControl c) noexcept;
std::string_view to_string(CellRole r) noexcept;
std::string_view to_string(QosClass q) noexcept;
std::string_view to_string(NotificationMode m) noexcept;

std::optional<EnergyState> energy_state_from(std::string_view s) noexcept;
std::optional<EnergyControl> energy_control_from(std::string_view s) noexcept;
std::optional<CellRole> cell_role_from(std::string_view s) noexcept;
std::optional<QosClass> qos_class_from(std::string_view s) noexcept;
std::optional<NotificationMode> notification_mode_from(std::string_view s) noexcept;

/// States in which a cell may serve new users.
inline bool is_awake(EnergyState s) noexcept { return s == EnergyState::IsNotEnergySaving; }

/// The legal-transition graph of the energy-state machine.
bool is_legal_transition(EnergyState from, EnergyState to) noexcept;

}  // namespace ricsim

template <>
struct std::hash<ricsim::CellId> {
    std::size_t operator()(const ricsim::CellId& c) const noexcept {
        return (static_cast<std::size_t>(c.site) << 20) ^ (static_cast<std::size_t>(c.sector) << 8) ^
               static_cast<std::size_t>(c.band);
    }
};
