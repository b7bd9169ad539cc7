#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ricsim/types.hpp"

namespace ricsim {

struct Position {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Position&) const = default;
};

/// Affine per-cell power draw: fixed cost while awake, plus a per-PRB term.
struct PowerModel {
    double p_active_w = 0.0;
    double p_per_prb_w = 0.0;
    double p_sleep_w = 0.0;

    bool operator==(const PowerModel&) const = default;
    void validate() const;  // throws ConfigError
};

/// Log-distance path-loss parameters shared by every cell.
struct RadioParams {
    double tx_power_dbm = 30.0;
    double ref_loss_db = 60.0;        // PL0 at the reference distance
    double path_loss_exponent = 3.5;  // n
    double ref_distance_m = 1.0;      // d0

    bool operator==(const RadioParams&) const = default;
};

struct BandConfig {
    int band = 0;
    CellRole role = CellRole::Capacity;
    int prb_capacity = 100;
    double path_loss_offset_db = 0.0;
    PowerModel power;

    bool operator==(const BandConfig&) const = default;
};

struct SectorConfig {
    double azimuth_deg = 0.0;
    std::vector<int> bands;

    bool operator==(const SectorConfig&) const = default;
};

struct SiteConfig {
    Position position;
    std::vector<SectorConfig> sectors;

    bool operator==(const SiteConfig&) const = default;
};

/// Static, per-cell view of the topology derived from sites x sectors x bands.
struct CellConfig {
    CellId id;
    std::string cgi;
    int pci = 0;
    CellRole role = CellRole::Capacity;
    Position position;
    double azimuth_deg = 0.0;
    int prb_capacity = 0;
    double path_loss_offset_db = 0.0;
    PowerModel power;
};

int assign_pci(const CellId& id) noexcept;
std::string assign_cgi(const CellId& id);

class Topology {
public:
    Topology() = default;
    Topology(RadioParams radio, std::vector<BandConfig> bands, std::vector<SiteConfig> sites);

    const RadioParams& radio() const noexcept { return radio_; }
    const std::vector<BandConfig>& bands() const noexcept { return bands_; }
    const std::vector<SiteConfig>& sites() const noexcept { return sites_; }

    /// All cells ordered by CellId.
    const std::vector<CellConfig>& cells() const noexcept { return cells_; }
    const CellConfig* find(const CellId& id) const noexcept;
    const CellConfig& cell(const CellId& id) const;  // throws UnknownCell
    std::optional<std::size_t> index_of(const CellId& id) const noexcept;

    std::vector<SectorId> sectors() const;
    /// Cells of one sector, ordered by band.
    std::vector<CellId> sector_cells(const SectorId& sector) const;

    std::size_t coverage_count() const;
    std::size_t capacity_count() const;

private:
    RadioParams radio_;
    std::vector<BandConfig> bands_;
    std::vector<SiteConfig> sites_;
    std::vector<CellConfig> cells_;
    std::unordered_map<CellId, std::size_t> index_;
};

/// Topology file I/O. The schema is documented in README.md.
Topology parse_topology(std::string_view json_text);
Topology load_topology(const std::filesystem::path& path);
std::string topology_to_json(const Topology& topology);

struct TopologyGenParams {
    int sites = 13;
    int sectors = 41;
    int bands = 5;
    double inter_site_distance_m = 500.0;
};

/// Deterministic synthetic topology: sectors spread as evenly as possible
/// over sites, band 0 as coverage on every sector, and 1..bands-1 capacity
/// carriers per sector in a repeating pattern.
Topology generate_topology(const TopologyGenParams& params);

/// Default per-band configuration used by the generator.
std::vector<BandConfig> default_bands(int count);

}  // namespace ricsim
