#include <doctest.h>

#include <set>

#include "ricsim/error.hpp"
#include "ricsim/topology.hpp"
#include "support/builders.hpp"

using namespace ricsim;

TEST_CASE("generated default topology has the 13/41/5 shape") {
    const Topology t = generate_topology({13, 41, 5, 500.0});
    CHECK(t.sites().size() == 13);
    CHECK(t.sectors().size() == 41);
    CHECK(t.coverage_count() == 41);
    CHECK(t.capacity_count() == t.cells().size() - 41);

    std::set<CellId> ids;
    for (const auto& c : t.cells()) CHECK(ids.insert(c.id).second);
    for (const auto& s : t.sectors()) {
        int coverage = 0, capacity = 0;
        for (const auto& id : t.sector_cells(s)) {
            if (t.cell(id).role == CellRole::Coverage) ++coverage;
            else ++capacity;
        }
        CHECK(coverage == 1);
        CHECK(capacity >= 1);
        CHECK(capacity <= 4);
    }
}

TEST_CASE("cells are ordered by id and indexable") {
    const Topology t = generate_topology({3, 7, 3, 400.0});
    for (std::size_t i = 0; i + 1 < t.cells().size(); ++i) CHECK(t.cells()[i].id < t.cells()[i + 1].id);
    for (std::size_t i = 0; i < t.cells().size(); ++i) CHECK(t.index_of(t.cells()[i].id) == i);
    CHECK_FALSE(t.index_of({99, 0, 0}).has_value());
    CHECK(t.find({99, 0, 0}) == nullptr);
    CHECK_THROWS_AS(t.cell({99, 0, 0}), Error);
}

TEST_CASE("pci formula") {
    CHECK(assign_pci({0, 0, 0}) == 0);
    CHECK(assign_pci({2, 1, 3}) == (2 * 3 + 1 + 3 * 64) % 1008);
    CHECK(assign_pci({400, 2, 1}) == (400 * 3 + 2 + 64) % 1008);
}

TEST_CASE("topology json round trip") {
    const Topology t = generate_topology({4, 9, 4, 300.0});
    const Topology back = parse_topology(topology_to_json(t));
    CHECK(back.radio() == t.radio());
    CHECK(back.bands() == t.bands());
    CHECK(back.sites() == t.sites());
    CHECK(topology_to_json(back) == topology_to_json(t));
}

TEST_CASE("sector without a coverage band is rejected") {
    auto bands = default_bands(2);
    SiteConfig site;
    site.sectors.push_back({0.0, {1}});
    try {
        Topology t(RadioParams{}, bands, {site});
        FAIL("expected ConfigError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ConfigError);
    }
}

TEST_CASE("sector with two coverage bands is rejected") {
    auto bands = default_bands(2);
    bands[1].role = CellRole::Coverage;
    SiteConfig site;
    site.sectors.push_back({0.0, {0, 1}});
    CHECK_THROWS_AS(Topology(RadioParams{}, bands, {site}), Error);
}

TEST_CASE("duplicate band in one sector is rejected") {
    SiteConfig site;
    site.sectors.push_back({0.0, {0, 1, 1}});
    CHECK_THROWS_AS(Topology(RadioParams{}, default_bands(2), {site}), Error);
}

TEST_CASE("malformed topology json names the field") {
    try {
        parse_topology(R"({"radio":{},"bands":[{"band":0,"role":"nope"}],"sites":[]})");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("role") != std::string::npos);
    }
}

TEST_CASE("default bands: coverage draws more and every sleep power is below active") {
    const auto bands = default_bands(5);
    REQUIRE(bands.size() == 5);
    CHECK(bands[0].role == CellRole::Coverage);
    for (const auto& b : bands) {
        CHECK(b.power.p_sleep_w < b.power.p_active_w);
        CHECK_NOTHROW(b.power.validate());
    }
}
