#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "ricsim/error.hpp"
#include "ricsim/traffic.hpp"
#include "support/builders.hpp"

using namespace ricsim;

namespace {

TrafficTrace parse(const std::string& text, const Topology* topo = nullptr) {
    std::istringstream in(text);
    return parse_trace(in, topo);
}

ErrorCode code_of(const std::string& text) {
    try {
        parse(text);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::Io;
}

const char* kHeader = "site,sector,band,timestamp,prb_util\n";

}  // namespace

TEST_CASE("one cell, four rows") {
    const auto t = parse(std::string(kHeader) + "0,0,1,0,0.1\n0,0,1,900,0.2\n0,0,1,1800,0.3\n0,0,1,2700,0.4\n");
    CHECK(t.length() == 4);
    CHECK(t.granularity_s == 900);
    CHECK(t.at({0, 0, 1}, 2) == doctest::Approx(0.3));
    CHECK(t.at({0, 0, 2}, 2) == 0.0);
    CHECK(t.timestamp(3) == 2700);
}

TEST_CASE("out of range utilization reports the line") {
    try {
        parse(std::string(kHeader) + "0,0,1,0,0.1\n0,0,1,900,1.3\n");
        FAIL("expected RangeError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::RangeError);
        CHECK(std::string(e.what()).find("3") != std::string::npos);
    }
}

TEST_CASE("grid errors") {
    // mismatched grids across cells
    CHECK(code_of(std::string(kHeader) + "0,0,1,0,0.1\n0,0,1,900,0.2\n0,0,2,0,0.1\n0,0,2,1800,0.2\n") ==
          ErrorCode::GridError);
    // uneven spacing
    CHECK(code_of(std::string(kHeader) + "0,0,1,0,0.1\n0,0,1,900,0.2\n0,0,1,2000,0.2\n") == ErrorCode::GridError);
    // repeated timestamp
    CHECK(code_of(std::string(kHeader) + "0,0,1,0,0.1\n0,0,1,0,0.2\n") == ErrorCode::GridError);
}

TEST_CASE("parse errors") {
    CHECK(code_of("a,b,c\n0,0,1,0,0.1\n") == ErrorCode::ParseError);
    CHECK(code_of(std::string(kHeader) + "0,0,1,zero,0.1\n") == ErrorCode::ParseError);
    CHECK(code_of(std::string(kHeader) + "0,0,1,0\n") == ErrorCode::ParseError);
}

TEST_CASE("unknown cell against a topology") {
    const Topology topo = testsupport::one_sector({0.0, 0.0});
    try {
        parse(std::string(kHeader) + "0,0,7,0,0.1\n", &topo);
        FAIL("expected UnknownCell");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnknownCell);
    }
}

TEST_CASE("serialize then parse gives an equal trace") {
    const Topology topo = generate_topology({2, 4, 3, 500.0});
    DiurnalConfig cfg;
    cfg.days = 2;
    cfg.seed = 99;
    const TrafficTrace t = synth_diurnal(topo, cfg);
    std::stringstream ss;
    write_trace(ss, t);
    const TrafficTrace back = parse_trace(ss, &topo);
    CHECK(back == t);
    std::stringstream again;
    write_trace(again, back);
    CHECK(again.str() == ss.str());
}

TEST_CASE("14 days at 15 minutes is 1344 intervals per cell") {
    const Topology topo = generate_topology({13, 41, 5, 500.0});
    DiurnalConfig cfg;
    const TrafficTrace t = synth_diurnal(topo, cfg);
    CHECK(t.series.size() == topo.cells().size());
    for (const auto& [cell, s] : t.series) CHECK(s.size() == 14 * 96);
    for (const auto& [cell, s] : t.series)
        for (double v : s) REQUIRE((v >= 0.0 && v <= 1.0));
}

TEST_CASE("flat noiseless profile is constant") {
    const Topology topo = testsupport::one_sector({0.0, 0.0});
    DiurnalConfig cfg;
    cfg.days = 1;
    cfg.noise_std = 0.0;
    cfg.peak_utilization = 0.5;
    cfg.trough_utilization = 0.5;
    const TrafficTrace t = synth_diurnal(topo, cfg);
    for (const auto& [cell, s] : t.series)
        for (double v : s) CHECK(v == 0.5);
}

TEST_CASE("same seed gives identical bytes; another seed does not") {
    const Topology topo = generate_topology({2, 4, 3, 500.0});
    DiurnalConfig cfg;
    cfg.days = 1;
    std::stringstream a, b, c;
    write_trace(a, synth_diurnal(topo, cfg));
    write_trace(b, synth_diurnal(topo, cfg));
    cfg.seed = 2;
    write_trace(c, synth_diurnal(topo, cfg));
    CHECK(a.str() == b.str());
    CHECK(a.str() != c.str());
}

TEST_CASE("noiseless profile matches the raised cosine") {
    DiurnalConfig cfg;
    cfg.noise_std = 0.0;
    // independent evaluation of trough + (peak - trough) * (1 + cos(2 pi (h - peak_hour) / 24)) / 2
    for (Timestamp t = 0; t < 86400; t += 900) {
        const double h = t / 3600.0;
        const double expected = 0.05 + 0.65 * 0.5 * (1.0 + std::cos(2.0 * std::numbers::pi * (h - 20.0) / 24.0));
        CHECK(diurnal_mean(cfg, 1, t) == doctest::Approx(expected).epsilon(1e-12));
    }
    CHECK(diurnal_mean(cfg, 1, 20 * 3600) == doctest::Approx(0.7));
    CHECK(diurnal_mean(cfg, 1, 8 * 3600) == doctest::Approx(0.05));
}

TEST_CASE("diurnal config validation") {
    DiurnalConfig cfg;
    cfg.peak_utilization = 0.2;
    cfg.trough_utilization = 0.4;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = {};
    cfg.noise_std = -1.0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = {};
    cfg.days = 0;
    CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("ue_events") {
    TrafficTrace t;
    t.series[{0, 0, 1}] = {0.5, 0.5, 0.0, 0.21};

    CHECK(target_ue_count(0.5, 100, 10) == 5);
    auto ev = ue_events(t, 0, {0, 0, 1}, 100, 10, 0);
    CHECK(ev.size() == 5);
    for (const auto& e : ev) CHECK(e.kind == UeEvent::Kind::Arrival);

    CHECK(ue_events(t, 1, {0, 0, 1}, 100, 10, 5).empty());

    ev = ue_events(t, 2, {0, 0, 1}, 100, 10, 5);
    CHECK(ev.size() == 5);
    for (const auto& e : ev) CHECK(e.kind == UeEvent::Kind::Departure);

    // 0.21 * 100 / 5 = 4.2 -> 4
    CHECK(ue_events(t, 3, {0, 0, 1}, 100, 5, 0).size() == 4);
}
