#include <doctest.h>

#include <random>

#include "ricsim/error.hpp"
#include "ricsim/messages.hpp"
#include "support/builders.hpp"

using namespace ricsim;

namespace {

CellId random_cell(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> d(0, 20);
    return {d(rng), d(rng) % 4, d(rng) % 5};
}

std::vector<Message> samples() {
    std::vector<Message> out;
    out.push_back(KpmReport{900, {0, 1, 2}, 0.37, 4});
    out.push_back(RcMeasurement{900, 17, {{{0, 1, 0}, -95.25}, {{0, 1, 2}, -101.0}}});
    out.push_back(RcNodeInfo{0, {{{0, 0, 0}, "001-01-0-0-0", 0, CellRole::Coverage, 100},
                                 {{0, 0, 1}, "001-01-0-0-1", 64, CellRole::Capacity, 50}}});
    out.push_back(RcUeInfo{900, 17, true, {0, 1, 2}, 5, QosClass::Voice, CellId{0, 1, 3}});
    out.push_back(RcUeInfo{900, 18, false, {0, 1, 2}, 5, QosClass::Broadband, std::nullopt});
    out.push_back(HandoverCommand{1800, 17, {0, 1, 2}, {0, 1, 3}});
    out.push_back(CccIndication{1800, {0, 1, 2}, true, EnergyState::ToBeEnergySaving, EnergyControl::ToBeEnergySaving});
    out.push_back(CccIndication{1800, {0, 1, 2}, false, EnergyState::IsNotEnergySaving, std::nullopt});
    out.push_back(CccControl{1800, {0, 1, 2}, EnergyControl::ToBeNotEnergySaving});
    out.push_back(A1PolicyPut{1800, {"p1", Preference::Forbid, {{0, 1, 2}, {0, 1, 3}}}});
    out.push_back(A1PolicyPut{1800, {"p2", Preference::Prefer, {{1, 0, 1}}}});
    out.push_back(A1PolicyDelete{2700, "p1"});
    out.push_back(A1PolicyChange{2700, {{"p2", Preference::Prefer, {{1, 0, 1}}}}});
    out.push_back(A1PolicyChange{2700, {}});
    out.push_back(O1Write{2700, {0, 1, 2}, O1Attribute::EnergySavingState, EnergyState::IsEnergySaving});
    out.push_back(O1Write{2700, {0, 1, 2}, O1Attribute::CesSwitch, false});
    return out;
}

}  // namespace

TEST_CASE("every message kind round-trips") {
    for (const auto& m : samples()) {
        const std::string line = encode(m);
        CHECK(line.find('\n') == std::string::npos);
        CHECK(decode(line) == m);
        CHECK(encode(decode(line)) == line);
    }
}

TEST_CASE("random CCC indications round-trip") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> st(0, 3), ctl(0, 2), b(0, 1);
    std::uniform_int_distribution<Timestamp> ts(0, 1'000'000);
    for (int i = 0; i < 2000; ++i) {
        CccIndication ind;
        ind.ts = ts(rng);
        ind.cell = random_cell(rng);
        ind.ces_switch = b(rng) == 1;
        ind.energy_state = static_cast<EnergyState>(st(rng));
        const int c = ctl(rng);
        if (c < 2) ind.control = static_cast<EnergyControl>(c);
        REQUIRE(std::get<CccIndication>(decode(encode(ind))) == ind);
    }
}

TEST_CASE("CCC wire names follow the O-CES attributes") {
    const std::string line =
        encode(CccIndication{0, {0, 0, 1}, true, EnergyState::IsEnergySaving, EnergyControl::ToBeEnergySaving});
    CHECK(line.find("\"cesSwitch\":true") != std::string::npos);
    CHECK(line.find("\"energySavingState\":\"isEnergySaving\"") != std::string::npos);
    CHECK(line.find("\"energySavingControl\":\"toBeEnergySaving\"") != std::string::npos);
    CHECK(line.find("\"type\":\"ccc_indication\"") != std::string::npos);
}

TEST_CASE("unknown type is a decode error naming the field") {
    try {
        decode(R"({"type":"x2_setup","ts":0})");
        FAIL("expected DecodeError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DecodeError);
        CHECK(std::string(e.what()).find("type") != std::string::npos);
    }
}

TEST_CASE("bad fields are decode errors with their path") {
    try {
        decode(R"({"type":"kpm_report","ts":0,"cell":[0,0],"prb_utilization":0.1,"rrc_count":1})");
        FAIL("expected DecodeError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DecodeError);
        CHECK(std::string(e.what()).find("cell") != std::string::npos);
    }
    try {
        decode(R"({"type":"rc_measurement","ts":0,"ue":1,"rsrp":[{"cell":[0,0,0],"dbm":"loud"}]})");
        FAIL("expected DecodeError");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("/rsrp/0") != std::string::npos);
    }
    CHECK_THROWS_AS(decode(R"({"type":"kpm_report","ts":0,"cell":[0,0,0],"prb_utilization":1.5,"rrc_count":1})"),
                    Error);
}

TEST_CASE("empty policy scope is rejected before encode") {
    try {
        encode(A1PolicyPut{0, {"p", Preference::Forbid, {}}});
        FAIL("expected InvalidMessage");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidMessage);
    }
    CHECK_THROWS_AS(encode(HandoverCommand{0, 1, {0, 0, 1}, {0, 0, 1}}), Error);
    CHECK_THROWS_AS(encode(O1Write{0, {0, 0, 1}, O1Attribute::CesSwitch, EnergyState::IsEnergySaving}), Error);
}

TEST_CASE("validate_policy") {
    const Topology topo = generate_topology({13, 41, 5, 500.0});
    CHECK_NOTHROW(validate_policy({"p", Preference::Forbid, {{0, 0, 1}}}, topo));
    try {
        validate_policy({"p", Preference::Forbid, {{0, 0, 0}}}, topo);
        FAIL("expected CoverageForbidden");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::CoverageForbidden);
    }
    try {
        validate_policy({"p", Preference::Forbid, {{99, 0, 0}}}, topo);
        FAIL("expected UnknownCell");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnknownCell);
    }
}

TEST_CASE("subject cells used by subscription filters") {
    CHECK(subject_cell(KpmReport{0, {1, 2, 3}, 0.0, 0}) == CellId{1, 2, 3});
    CHECK(subject_cell(HandoverCommand{0, 1, {0, 0, 1}, {0, 0, 2}}) == CellId{0, 0, 2});
    CHECK_FALSE(subject_cell(A1PolicyDelete{0, "x"}).has_value());
}

TEST_CASE("fuzzed input never crashes the decoder") {
    std::mt19937_64 rng(1234);
    const auto valid = samples();
    std::uniform_int_distribution<int> byte(0, 255);
    const std::string alphabet = "{}[]\",:0123456789-.etruflsnaype_ ";
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    int decoded = 0, rejected = 0;
    for (int i = 0; i < 20000; ++i) {
        std::string line = encode(valid[static_cast<std::size_t>(i) % valid.size()]);
        const int mode = i % 3;
        if (mode == 0) {
            // flip a few bytes
            for (int k = 0; k < 3; ++k)
                line[std::uniform_int_distribution<std::size_t>(0, line.size() - 1)(rng)] = static_cast<char>(byte(rng));
        } else if (mode == 1) {
            line.resize(std::uniform_int_distribution<std::size_t>(0, line.size())(rng));
        } else {
            line.clear();
            const auto n = std::uniform_int_distribution<std::size_t>(0, 80)(rng);
            for (std::size_t k = 0; k < n; ++k) line.push_back(alphabet[pick(rng)]);
        }
        try {
            const Message m = decode(line);
            CHECK_NOTHROW(validate(m));
            ++decoded;
        } catch (const Error& e) {
            REQUIRE(e.code() == ErrorCode::DecodeError);
            ++rejected;
        }
    }
    CHECK(decoded + rejected == 20000);
    CHECK(rejected > 0);
}
