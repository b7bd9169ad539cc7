#include "ricsim/topology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "json_util.hpp"

namespace ricsim {

using detail::json;
using detail::Reader;

void PowerModel::validate() const {
    if (p_active_w < 0 || p_per_prb_w < 0 || p_sleep_w < 0)
        throw Error(ErrorCode::ConfigError, "power model values must be non-negative");
    if (!(p_sleep_w < p_active_w)) throw Error(ErrorCode::ConfigError, "p_sleep_w must be below p_active_w");
}

int assign_pci(const CellId& id) noexcept { return (id.site * 3 + id.sector + id.band * 64) % 1008; }

std::string assign_cgi(const CellId& id) {
    std::ostringstream os;
    os << "001-01-" << id.site << "-" << id.sector << "-" << id.band;
    return os.str();
}

Topology::Topology(RadioParams radio, std::vector<BandConfig> bands, std::vector<SiteConfig> sites)
    : radio_(radio), bands_(std::move(bands)), sites_(std::move(sites)) {
    if (radio_.ref_distance_m <= 0) throw Error(ErrorCode::ConfigError, "ref_distance_m must be positive");

    std::unordered_map<int, const BandConfig*> by_band;
    for (const auto& b : bands_) {
        if (b.band < 0) throw Error(ErrorCode::ConfigError, "negative band index");
        if (b.prb_capacity <= 0) throw Error(ErrorCode::ConfigError, "band prb_capacity must be positive");
        b.power.validate();
        if (!by_band.emplace(b.band, &b).second)
            throw Error(ErrorCode::ConfigError, "duplicate band " + std::to_string(b.band));
    }

    for (std::size_t s = 0; s < sites_.size(); ++s) {
        const auto& site = sites_[s];
        for (std::size_t k = 0; k < site.sectors.size(); ++k) {
            const auto& sector = site.sectors[k];
            std::set<int> seen;
            int coverage = 0;
            for (int band : sector.bands) {
                auto it = by_band.find(band);
                if (it == by_band.end())
                    throw Error(ErrorCode::ConfigError, "sector references unknown band " + std::to_string(band));
                if (!seen.insert(band).second)
                    throw Error(ErrorCode::ConfigError, "sector lists band " + std::to_string(band) + " twice");
                const BandConfig& bc = *it->second;
                if (bc.role == CellRole::Coverage) ++coverage;

                CellConfig c;
                c.id = CellId{static_cast<int>(s), static_cast<int>(k), band};
                c.cgi = assign_cgi(c.id);
                c.pci = assign_pci(c.id);
                c.role = bc.role;
                c.position = site.position;
                c.azimuth_deg = sector.azimuth_deg;
                c.prb_capacity = bc.prb_capacity;
                c.path_loss_offset_db = bc.path_loss_offset_db;
                c.power = bc.power;
                cells_.push_back(std::move(c));
            }
            if (coverage != 1)
                throw Error(ErrorCode::ConfigError, "sector " + to_string(SectorId{static_cast<int>(s), static_cast<int>(k)}) +
                                                        " must have exactly one coverage cell");
        }
    }

    std::sort(cells_.begin(), cells_.end(), [](const CellConfig& a, const CellConfig& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < cells_.size(); ++i) index_.emplace(cells_[i].id, i);
}

const CellConfig* Topology::find(const CellId& id) const noexcept {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &cells_[it->second];
}

const CellConfig& Topology::cell(const CellId& id) const {
    if (const auto* c = find(id)) return *c;
    throw Error(ErrorCode::UnknownCell, to_string(id));
}

std::optional<std::size_t> Topology::index_of(const CellId& id) const noexcept {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::vector<SectorId> Topology::sectors() const {
    std::vector<SectorId> out;
    for (std::size_t s = 0; s < sites_.size(); ++s)
        for (std::size_t k = 0; k < sites_[s].sectors.size(); ++k)
            out.push_back(SectorId{static_cast<int>(s), static_cast<int>(k)});
    return out;
}

std::vector<CellId> Topology::sector_cells(const SectorId& sector) const {
    std::vector<CellId> out;
    for (const auto& c : cells_)
        if (sector_of(c.id) == sector) out.push_back(c.id);
    return out;
}

std::size_t Topology::coverage_count() const {
    return static_cast<std::size_t>(
        std::count_if(cells_.begin(), cells_.end(), [](const CellConfig& c) { return c.role == CellRole::Coverage; }));
}

std::size_t Topology::capacity_count() const { return cells_.size() - coverage_count(); }

Topology parse_topology(std::string_view json_text) {
    const json root = detail::parse_or_throw(json_text, ErrorCode::ConfigError, "topology");
    Reader r(root, "", ErrorCode::ConfigError);

    RadioParams radio;
    if (r.has("radio")) {
        Reader rr = r.child("radio");
        if (rr.has("tx_power_dbm")) radio.tx_power_dbm = rr.number("tx_power_dbm");
        if (rr.has("ref_loss_db")) radio.ref_loss_db = rr.number("ref_loss_db");
        if (rr.has("path_loss_exponent")) radio.path_loss_exponent = rr.number("path_loss_exponent");
        if (rr.has("ref_distance_m")) radio.ref_distance_m = rr.number("ref_distance_m");
    }

    std::vector<BandConfig> bands;
    const json& jb = r.array("bands");
    for (std::size_t i = 0; i < jb.size(); ++i) {
        Reader br = r.element(jb[i], i, "bands");
        BandConfig b;
        b.band = static_cast<int>(br.integer("band"));
        auto role = cell_role_from(br.string("role"));
        if (!role) br.fail("role", "expected \"coverage\" or \"capacity\"");
        b.role = *role;
        b.prb_capacity = static_cast<int>(br.integer("prb_capacity"));
        if (br.has("path_loss_offset_db")) b.path_loss_offset_db = br.number("path_loss_offset_db");
        Reader pr = br.child("power");
        b.power.p_active_w = pr.number("p_active_w");
        b.power.p_per_prb_w = pr.number("p_per_prb_w");
        b.power.p_sleep_w = pr.number("p_sleep_w");
        bands.push_back(b);
    }

    std::vector<SiteConfig> sites;
    const json& js = r.array("sites");
    for (std::size_t i = 0; i < js.size(); ++i) {
        Reader sr = r.element(js[i], i, "sites");
        SiteConfig site;
        site.position = {sr.number("x"), sr.number("y")};
        const json& jsec = sr.array("sectors");
        for (std::size_t k = 0; k < jsec.size(); ++k) {
            Reader kr = sr.element(jsec[k], k, "sectors");
            SectorConfig sector;
            sector.azimuth_deg = kr.number("azimuth_deg");
            for (const auto& b : kr.array("bands")) {
                if (!b.is_number_integer()) kr.fail("bands", "expected integer band index");
                sector.bands.push_back(b.get<int>());
            }
            site.sectors.push_back(std::move(sector));
        }
        sites.push_back(std::move(site));
    }
    return Topology(radio, std::move(bands), std::move(sites));
}

Topology load_topology(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open topology " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_topology(ss.str());
}

std::string topology_to_json(const Topology& topology) {
    json root;
    const auto& radio = topology.radio();
    root["radio"] = {{"tx_power_dbm", radio.tx_power_dbm},
                     {"ref_loss_db", radio.ref_loss_db},
                     {"path_loss_exponent", radio.path_loss_exponent},
                     {"ref_distance_m", radio.ref_distance_m}};
    root["bands"] = json::array();
    for (const auto& b : topology.bands()) {
        root["bands"].push_back({{"band", b.band},
                                 {"role", to_string(b.role)},
                                 {"prb_capacity", b.prb_capacity},
                                 {"path_loss_offset_db", b.path_loss_offset_db},
                                 {"power",
                                  {{"p_active_w", b.power.p_active_w},
                                   {"p_per_prb_w", b.power.p_per_prb_w},
                                   {"p_sleep_w", b.power.p_sleep_w}}}});
    }
    root["sites"] = json::array();
    for (const auto& s : topology.sites()) {
        json site = {{"x", s.position.x}, {"y", s.position.y}, {"sectors", json::array()}};
        for (const auto& k : s.sectors) site["sectors"].push_back({{"azimuth_deg", k.azimuth_deg}, {"bands", k.bands}});
        root["sites"].push_back(std::move(site));
    }
    return root.dump(2) + "\n";
}

std::vector<BandConfig> default_bands(int count) {
    std::vector<BandConfig> out;
    for (int b = 0; b < count; ++b) {
        BandConfig bc;
        bc.band = b;
        bc.role = b == 0 ? CellRole::Coverage : CellRole::Capacity;
        bc.prb_capacity = 100;
        bc.path_loss_offset_db = 3.0 * b;  // higher bands propagate worse
        bc.power = b == 0 ? PowerModel{200.0, 0.5, 20.0} : PowerModel{150.0, 0.5, 50.0};
        out.push_back(bc);
    }
    return out;
}

Topology generate_topology(const TopologyGenParams& params) {
    if (params.sites <= 0 || params.bands <= 0 || params.sectors < params.sites)
        throw Error(ErrorCode::ConfigError, "need sites > 0, bands > 0 and sectors >= sites");

    std::vector<SiteConfig> sites;
    const int base = params.sectors / params.sites;
    const int extra = params.sectors % params.sites;
    const int per_row = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(params.sites))));
    const int capacity_bands = params.bands - 1;

    int sector_index = 0;
    for (int s = 0; s < params.sites; ++s) {
        SiteConfig site;
        const int row = s / per_row;
        const int col = s % per_row;
        // offset rows give a hexagonal-ish layout
        site.position = {params.inter_site_distance_m * (col + 0.5 * (row % 2)),
                         params.inter_site_distance_m * row * std::numbers::sqrt3 / 2.0};
        const int n_sectors = base + (s < extra ? 1 : 0);
        for (int k = 0; k < n_sectors; ++k, ++sector_index) {
            SectorConfig sector;
            sector.azimuth_deg = 360.0 * k / n_sectors;
            sector.bands.push_back(0);
            if (capacity_bands > 0) {
                const int n_capacity = 1 + sector_index % capacity_bands;
                for (int b = 1; b <= n_capacity; ++b) sector.bands.push_back(b);
            }
            site.sectors.push_back(std::move(sector));
        }
        sites.push_back(std::move(site));
    }
    return Topology(RadioParams{}, default_bands(params.bands), std::move(sites));
}

}  // namespace ricsim
