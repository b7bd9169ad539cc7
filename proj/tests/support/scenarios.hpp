#pragma once

#include <string>

#include "ricsim/sim_engine.hpp"

namespace testsupport {

inline std::string fixture(const std::string& rel) { return std::string(RICSIM_FIXTURES) + "/" + rel; }

// Generated topology with a diurnal trace; the trace seed follows the scenario seed.
inline ricsim::Scenario small_scenario(int sites, int sectors, int bands, int days, std::uint64_t seed,
                                       ricsim::NotificationMode mode) {
    ricsim::Scenario sc;
    sc.topology = ricsim::generate_topology({sites, sectors, bands, 500.0});
    ricsim::DiurnalConfig cfg;
    cfg.days = days;
    cfg.seed = seed;
    sc.trace = ricsim::synth_diurnal(sc.topology, cfg);
    sc.interval_s = cfg.granularity_s;
    sc.duration_intervals = sc.trace->length();
    sc.seed = seed;
    sc.set_mode(mode);
    return sc;
}

}  // namespace testsupport
