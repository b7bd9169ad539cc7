#include "ricsim/error.hpp"
#include "ricsim/types.hpp"

namespace ricsim {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::UnknownUe: return "UnknownUe";
        case ErrorCode::CesDisabled: return "CesDisabled";
        case ErrorCode::IllegalTransition: return "IllegalTransition";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::GridError: return "GridError";
        case ErrorCode::RangeError: return "RangeError";
        case ErrorCode::DecodeError: return "DecodeError";
        case ErrorCode::InvalidMessage: return "InvalidMessage";
        case ErrorCode::UnknownCell: return "UnknownCell";
        case ErrorCode::CoverageForbidden: return "CoverageForbidden";
        case ErrorCode::DuplicateId: return "DuplicateId";
        case ErrorCode::UnknownId: return "UnknownId";
        case ErrorCode::InsufficientHistory: return "InsufficientHistory";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::NonQuiescence: return "NonQuiescence";
        case ErrorCode::CorruptLog: return "CorruptLog";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

std::string to_string(const CellId& id) {
    return "(" + std::to_string(id.site) + "," + std::to_string(id.sector) + "," + std::to_string(id.band) + ")";
}

std::string to_string(const SectorId& id) {
    return "(" + std::to_string(id.site) + "," + std::to_string(id.sector) + ")";
}

std::string_view to_string(EnergyState s) noexcept {
    switch (s) {
        case EnergyState::IsNotEnergySaving: return "isNotEnergySaving";
        case EnergyState::ToBeEnergySaving: return "toBeEnergySaving";
        case EnergyState::IsEnergySaving: return "isEnergySaving";
        case EnergyState::ToBeNotEnergySaving: return "toBeNotEnergySaving";
    }
    return "";
}

std::string_view to_string(EnergyControl c) noexcept {
    return c == EnergyControl::ToBeEnergySaving ? "toBeEnergySaving" : "toBeNotEnergySaving";
}

std::string_view to_string(CellRole r) noexcept { return r == CellRole::Coverage ? "coverage" : "capacity"; }

std::string_view to_string(QosClass q) noexcept { return q == QosClass::Voice ? "voice" : "broadband"; }

std::string_view to_string(NotificationMode m) noexcept { return m == NotificationMode::A1 ? "a1" : "ccc"; }

std::optional<EnergyState> energy_state_from(std::string_view s) noexcept {
    if (s == "isNotEnergySaving") return EnergyState::IsNotEnergySaving;
    if (s == "toBeEnergySaving") return EnergyState::ToBeEnergySaving;
    if (s == "isEnergySaving") return EnergyState::IsEnergySaving;
    if (s == "toBeNotEnergySaving") return EnergyState::ToBeNotEnergySaving;
    return std::nullopt;
}

std::optional<EnergyControl> energy_control_from(std::string_view s) noexcept {
    if (s == "toBeEnergySaving") return EnergyControl::ToBeEnergySaving;
    if (s == "toBeNotEnergySaving") return EnergyControl::ToBeNotEnergySaving;
    return std::nullopt;
}

std::optional<CellRole> cell_role_from(std::string_view s) noexcept {
    if (s == "coverage") return CellRole::Coverage;
    if (s == "capacity") return CellRole::Capacity;
    return std::nullopt;
}

std::optional<QosClass> qos_class_from(std::string_view s) noexcept {
    if (s == "broadband") return QosClass::Broadband;
    if (s == "voice") return QosClass::Voice;
    return std::nullopt;
}

std::optional<NotificationMode> notification_mode_from(std::string_view s) noexcept {
    if (s == "a1" || s == "A" || s == "a") return NotificationMode::A1;
    if (s == "ccc" || s == "B" || s == "b") return NotificationMode::Ccc;
    return std::nullopt;
}

bool is_legal_transition(EnergyState from, EnergyState to) noexcept {
    using S = EnergyState;
    switch (from) {
        case S::IsNotEnergySaving: return to == S::ToBeEnergySaving;
        case S::ToBeEnergySaving: return to == S::IsEnergySaving || to == S::ToBeNotEnergySaving;
        case S::IsEnergySaving: return to == S::ToBeNotEnergySaving;
        case S::ToBeNotEnergySaving: return to == S::IsNotEnergySaving;
    }
    return false;
}

}  // namespace ricsim
