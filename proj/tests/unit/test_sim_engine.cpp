#include <doctest.h>

#include <json.hpp>

#include "ricsim/error.hpp"
#include "ricsim/sim_engine.hpp"
#include "support/builders.hpp"
#include "support/log_checker.hpp"
#include "support/scenarios.hpp"

using namespace ricsim;
using nlohmann::json;
using testsupport::cell_no;
using testsupport::check_log;
using testsupport::fixture;
using testsupport::small_scenario;

namespace {

std::vector<json> records_of(const EventLog& log, const std::string& type) {
    std::vector<json> out;
    for (const auto& l : log.lines()) {
        auto j = json::parse(l);
        if (j.at("type") == type) out.push_back(std::move(j));
    }
    return out;
}

template <typename F>
void expect_error(ErrorCode code, F&& f) {
    try {
        f();
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == code);
    }
}

}  // namespace

TEST_CASE("runs are deterministic") {
    const auto sc = small_scenario(2, 4, 3, 2, 7, NotificationMode::A1);
    const auto a = run(sc);
    const auto b = run(sc);
    CHECK(a.log.str() == b.log.str());
    CHECK(a.metrics == b.metrics);
    auto other = sc;
    other.seed = 8;
    CHECK(run(other).log.str() != a.log.str());
}

TEST_CASE("replay reproduces the live metrics") {
    const auto res = run(small_scenario(2, 4, 3, 2, 3, NotificationMode::Ccc));
    CHECK(replay(res.log) == res.metrics);
    CHECK(replay(EventLog::parse(res.log.str())) == res.metrics);
    CHECK(final_attachments(res.log) == res.attachments);
}

TEST_CASE("disabled energy saving never switches cells") {
    auto sc = small_scenario(2, 4, 3, 2, 5, NotificationMode::A1);
    sc.es_enabled = false;
    const auto res = run(sc);
    CHECK(res.metrics.transitions == 0);
    CHECK(res.metrics.savings_capacity_pct == doctest::Approx(0.0));
    CHECK(res.metrics.energy_actual_j == doctest::Approx(res.metrics.energy_baseline_j));
    CHECK(records_of(res.log, "a1_policy_put").empty());
    CHECK(records_of(res.log, "ccc_control").empty());
    CHECK(records_of(res.log, "o1_write").empty());
}

TEST_CASE("offered load follows the trace when nothing sleeps") {
    auto sc = small_scenario(1, 3, 3, 1, 11, NotificationMode::A1);
    sc.es_enabled = false;
    const auto res = run(sc);
    const auto snaps = records_of(res.log, "snapshot");
    REQUIRE(snaps.size() == sc.duration_intervals);
    const auto& cells = sc.topology.cells();
    for (std::size_t i = 0; i < snaps.size(); ++i) {
        for (std::size_t k = 0; k < cells.size(); ++k) {
            const int expected =
                target_ue_count(sc.trace->at(cells[k].id, i), cells[k].prb_capacity, sc.ue_demand_prb);
            CHECK(snaps[i]["rrc"][k].get<int>() == expected);
            CHECK(snaps[i]["prb"][k].get<int>() == expected * sc.ue_demand_prb);
        }
    }
    CHECK(res.metrics.accessibility == 1.0);
}

TEST_CASE("offload handover burst and switch-off") {
    for (auto mode : {NotificationMode::A1, NotificationMode::Ccc}) {
        CAPTURE(static_cast<int>(mode));
        auto sc = load_scenario(fixture("offload/scenario.json"));
        sc.set_mode(mode);
        const auto res = run(sc);
        const auto hos = records_of(res.log, "handover_command");
        REQUIRE(hos.size() == 10);
        for (const auto& h : hos) {
            CHECK(h["source"] == json::array({0, 0, 1}));
            CHECK(h["target"] == json::array({0, 0, 3}));
        }
        CHECK(res.metrics.handovers_attempted == 10);
        CHECK(res.metrics.handovers_succeeded == 10);
        const auto snap = records_of(res.log, "snapshot").back();
        CHECK(snap["rrc"] == json::array({0, 0, 0, 12, 0}));
        CHECK(snap["state"][1] == 2);
        for (UeId u = 1; u <= 12; ++u) CHECK(res.attachments.at(u) == cell_no(4));
        CHECK(check_log(res.log).empty());
        if (mode == NotificationMode::A1) {
            const auto writes = records_of(res.log, "o1_write");
            REQUIRE(writes.size() == 1);
            CHECK(writes[0]["cell"] == json::array({0, 0, 1}));
        } else {
            CHECK(records_of(res.log, "ccc_control").size() == 1);
            CHECK(records_of(res.log, "o1_write").empty());
        }
    }
}

TEST_CASE("both notification modes give the same outcome") {
    for (std::uint64_t seed : {1u, 2u}) {
        const auto a = run(small_scenario(2, 4, 4, 2, seed, NotificationMode::A1));
        const auto b = run(small_scenario(2, 4, 4, 2, seed, NotificationMode::Ccc));
        CHECK(a.attachments == b.attachments);
        CHECK(a.metrics.es_mode_timeline == b.metrics.es_mode_timeline);
        CHECK(a.metrics.energy_actual_j == doctest::Approx(b.metrics.energy_actual_j));
    }
}

TEST_CASE("logs satisfy the protocol invariants") {
    for (std::uint64_t seed : {4u, 9u}) {
        for (auto mode : {NotificationMode::A1, NotificationMode::Ccc}) {
            const auto res = run(small_scenario(2, 5, 5, 2, seed, mode));
            const auto v = check_log(res.log);
            for (const auto& item : v.items) INFO(item);
            CHECK(v.empty());
        }
    }
}

TEST_CASE("sector modes respect the dwell time") {
    const auto sc = small_scenario(2, 4, 4, 3, 6, NotificationMode::A1);
    const auto res = run(sc);
    std::size_t changes = 0;
    for (const auto& [sector, points] : res.metrics.es_mode_timeline) {
        changes += points.size() - 1;
        for (std::size_t i = 2; i < points.size(); ++i) {
            CHECK(points[i].ts - points[i - 1].ts >= sc.rapp.min_dwell_s);
        }
    }
    CHECK(changes > 0);
}

TEST_CASE("the log checker catches tampered logs") {
    const auto res = run(load_scenario(fixture("offload/scenario.json")));
    REQUIRE(check_log(res.log).empty());
    SUBCASE("handover for a UE never reported") {
        EventLog bad;
        for (const auto& l : res.log.lines()) {
            if (json::parse(l)["type"] == "run_end")
                bad.append(R"({"source":[0,0,0],"target":[0,0,3],"ts":1800,"type":"handover_command","ue":999})");
            bad.append(l);
        }
        CHECK_FALSE(check_log(bad).empty());
    }
    SUBCASE("sleeping cell still holding a UE") {
        EventLog bad;
        bool done = false;
        for (const auto& l : res.log.lines()) {
            auto j = json::parse(l);
            if (!done && j["type"] == "snapshot" && j["state"][1] == 2) {
                j["rrc"][1] = 1;
                done = true;
            }
            bad.append(j.dump());
        }
        REQUIRE(done);
        CHECK_FALSE(check_log(bad).empty());
    }
}

TEST_CASE("a truncated log is rejected") {
    const auto res = run(small_scenario(1, 2, 3, 1, 2, NotificationMode::A1));
    auto lines = res.log.lines();
    EventLog cut;
    for (std::size_t i = 0; i + 1 < lines.size(); ++i) cut.append(lines[i]);
    expect_error(ErrorCode::CorruptLog, [&] { compute_metrics(cut); });
    EventLog garbage;
    garbage.append("{\"type\":");
    expect_error(ErrorCode::CorruptLog, [&] { compute_metrics(garbage); });
    expect_error(ErrorCode::CorruptLog, [&] { compute_metrics(EventLog{}); });
}

TEST_CASE("a blocked arrival lowers accessibility") {
    // A single cell filled by a scripted UE, which counts as offered load; the
    // trace asks for a second one.
    Scenario sc;
    sc.topology = testsupport::one_sector({0.0}, 10);
    TrafficTrace trace;
    trace.granularity_s = 900;
    trace.series[{0, 0, 0}] = {1.0};
    sc.trace = trace;
    sc.duration_intervals = 1;
    sc.initial_ues.push_back({1, {0.0, 100.0}, 10, QosClass::Broadband, {0, 0, 0}});
    const auto res = run(sc);
    // the scripted UE is logged as an admitted arrival too
    CHECK(res.metrics.attempts == 2);
    CHECK(res.metrics.blocked == 1);
    CHECK(res.metrics.accessibility == 0.5);
}

TEST_CASE("scenario parsing") {
    const std::string dir = fixture("offload");
    SUBCASE("fixture") {
        const auto sc = load_scenario(fixture("offload/scenario.json"));
        CHECK(sc.initial_ues.size() == 12);
        CHECK(sc.script.size() == 1);
        CHECK_FALSE(sc.rapp.auto_decide);
        CHECK(sc.topology.cells().size() == 5);
    }
    SUBCASE("errors") {
        expect_error(ErrorCode::ConfigError, [&] { parse_scenario("{", dir); });
        expect_error(ErrorCode::ConfigError,
                     [&] { parse_scenario(R"({"topology":"topology.json","mode":"x"})", dir); });
        expect_error(ErrorCode::ConfigError,
                     [&] { parse_scenario(R"({"topology":"topology.json","duration_intervals":0})", dir); });
        expect_error(ErrorCode::ConfigError, [&] {
            parse_scenario(R"({"topology":"topology.json","script":[{"interval":0,"action":"nap","cell":[0,0,1]}]})",
                           dir);
        });
        expect_error(ErrorCode::Io, [&] { load_scenario(fixture("missing.json")); });
    }
}
