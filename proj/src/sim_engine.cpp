#include "ricsim/sim_engine.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "json_util.hpp"
#include "ricsim/near_rt_ric.hpp"
#include "ricsim/ran_model.hpp"

namespace ricsim {

using detail::json;

void Scenario::set_mode(NotificationMode m) {
    mode = m;
    xapp.mode = m;
    rapp.mode = m;
}

void Scenario::validate() const {
    auto fail = [](const std::string& what) { throw Error(ErrorCode::ConfigError, "scenario: " + what); };
    if (topology.cells().empty()) fail("topology has no cells");
    if (duration_intervals < 1) fail("duration_intervals must be positive");
    if (interval_s <= 0) fail("interval_s must be positive");
    if (trace) {
        if (trace->granularity_s != interval_s) fail("interval_s differs from the trace granularity");
        if (trace->length() < duration_intervals) fail("trace is shorter than duration_intervals");
        for (const auto& [cell, s] : trace->series)
            if (!topology.find(cell)) fail("trace names unknown cell " + to_string(cell));
    }
    if (ue_demand_prb < 1) fail("ue_demand_prb must be positive");
    if (!(voice_fraction >= 0.0 && voice_fraction <= 1.0)) fail("voice_fraction must be in [0,1]");
    if (!(ue_min_radius_m >= 0.0 && ue_min_radius_m <= ue_max_radius_m)) fail("bad UE placement radii");
    if (settle_budget < 1) fail("settle_budget must be positive");
    if (xapp.mode != mode || rapp.mode != mode) fail("apps disagree on the notification mode");
    rapp.validate(interval_s);
    std::set<UeId> ids;
    for (const auto& u : initial_ues) {
        if (u.id < 1) fail("UE ids must be positive");
        if (!ids.insert(u.id).second) fail("duplicate initial UE " + std::to_string(u.id));
        if (!topology.find(u.serving)) fail("initial UE on unknown cell " + to_string(u.serving));
        if (u.demand_prb < 1) fail("initial UE demand must be positive");
    }
    for (const auto& a : script) {
        const auto* c = topology.find(a.cell);
        if (!c) fail("script names unknown cell " + to_string(a.cell));
        if (c->role == CellRole::Coverage) fail("script switches coverage cell " + to_string(a.cell));
        if (a.interval >= duration_intervals) fail("script action after the end of the run");
    }
}

Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir) {
    const json root = detail::parse_or_throw(text, ErrorCode::ConfigError, "scenario");
    detail::Reader r(root, "", ErrorCode::ConfigError);
    auto resolve = [&](const std::string& p) {
        std::filesystem::path path(p);
        return path.is_absolute() ? path : base_dir / path;
    };

    Scenario sc;
    if (r.at("topology").is_string()) sc.topology = load_topology(resolve(r.string("topology")));
    else sc.topology = parse_topology(r.at("topology").dump());

    if (r.has("seed")) {
        const json& s = r.at("seed");
        if (!s.is_number_integer() || (s.is_number_integer() && !s.is_number_unsigned() && s.get<std::int64_t>() < 0))
            r.fail("seed", "expected non-negative integer");
        sc.seed = s.get<std::uint64_t>();
    }
    if (r.has("xapp")) sc.xapp = parse_ts_config(r.at("xapp").dump());
    if (r.has("rapp")) sc.rapp = parse_es_config(r.at("rapp").dump());
    NotificationMode mode = sc.rapp.mode;
    if (r.has("mode")) {
        auto m = notification_mode_from(r.string("mode"));
        if (!m) r.fail("mode", "expected a1|ccc");
        mode = *m;
    }
    sc.set_mode(mode);

    if (r.has("trace") && !r.at("trace").is_null()) {
        detail::Reader t = r.child("trace");
        if (t.has("file")) {
            sc.trace = load_trace(resolve(t.string("file")), &sc.topology);
        } else if (t.has("diurnal")) {
            json cfg = t.at("diurnal");
            if (cfg.is_string()) {
                std::ifstream in(resolve(cfg.get<std::string>()));
                if (!in) t.fail("diurnal", "cannot open config");
                std::stringstream ss;
                ss << in.rdbuf();
                cfg = detail::parse_or_throw(ss.str(), ErrorCode::ConfigError, "diurnal config");
            }
            if (!cfg.is_object()) t.fail("diurnal", "expected object or path");
            if (!cfg.contains("seed")) cfg["seed"] = sc.seed;
            sc.trace = synth_diurnal(sc.topology, parse_diurnal_config(cfg.dump()));
        } else {
            r.fail("trace", "expected {\"file\": ...} or {\"diurnal\": ...}");
        }
        sc.interval_s = sc.trace->granularity_s;
        sc.duration_intervals = sc.trace->length();
    }
    if (r.has("interval_s")) {
        sc.interval_s = r.integer("interval_s");
    }
    if (r.has("duration_intervals")) {
        const auto d = r.integer("duration_intervals");
        if (d < 1) r.fail("duration_intervals", "must be positive");
        sc.duration_intervals = static_cast<std::size_t>(d);
    }
    if (r.has("es_enabled")) sc.es_enabled = r.boolean("es_enabled");
    if (r.has("ue_demand_prb")) sc.ue_demand_prb = static_cast<int>(r.integer("ue_demand_prb"));
    if (r.has("voice_fraction")) sc.voice_fraction = r.number("voice_fraction");
    if (r.has("ue_radius_m")) {
        const json& a = r.array("ue_radius_m");
        if (a.size() != 2 || !a[0].is_number() || !a[1].is_number()) r.fail("ue_radius_m", "expected [min, max]");
        sc.ue_min_radius_m = a[0].get<double>();
        sc.ue_max_radius_m = a[1].get<double>();
    }
    if (r.has("settle_budget")) sc.settle_budget = static_cast<int>(r.integer("settle_budget"));

    if (r.has("initial_ues")) {
        const json& arr = r.array("initial_ues");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            detail::Reader u = r.element(arr[i], i, "initial_ues");
            InitialUe ue;
            ue.id = u.integer("id");
            ue.position = {u.number("x"), u.number("y")};
            ue.serving = u.cell("serving");
            if (u.has("demand_prb")) ue.demand_prb = static_cast<int>(u.integer("demand_prb"));
            else ue.demand_prb = sc.ue_demand_prb;
            if (u.has("qos")) {
                auto q = qos_class_from(u.string("qos"));
                if (!q) u.fail("qos", "expected broadband|voice");
                ue.qos = *q;
            }
            sc.initial_ues.push_back(ue);
        }
    }
    if (r.has("script")) {
        const json& arr = r.array("script");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            detail::Reader a = r.element(arr[i], i, "script");
            ScriptedAction act;
            const auto interval = a.integer("interval");
            if (interval < 0) a.fail("interval", "must be non-negative");
            act.interval = static_cast<std::size_t>(interval);
            const std::string action = a.string("action");
            if (action == "sleep") act.sleep = true;
            else if (action == "wake") act.sleep = false;
            else a.fail("action", "expected sleep|wake");
            act.cell = a.cell("cell");
            sc.script.push_back(act);
        }
    }
    sc.validate();
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str(), path.parent_path());
}

namespace {

struct Envelope {
    std::string sender;
    Message message;
};

constexpr std::string_view kNode = "e2-node";
constexpr std::string_view kRic = "near-rt-ric";

json power_json(const PowerModel& p) {
    return {{"p_active_w", p.p_active_w}, {"p_per_prb_w", p.p_per_prb_w}, {"p_sleep_w", p.p_sleep_w}};
}

class Simulation {
public:
    Simulation(const Scenario& sc, bool shadow, const std::vector<std::vector<int>>* reference)
        : sc_(sc),
          shadow_(shadow),
          reference_(reference),
          es_enabled_(sc.es_enabled && !shadow),
          ran_(sc.topology),
          ric_(sc.topology),
          xapp_(sc.xapp),
          rapp_(sc.topology, sc.interval_s, sc.rapp, make_predictor(sc.rapp.predictor)),
          rng_(sc.seed) {
        ric_.subscribe(xapp_.subscription());
        ric_.subscribe(rapp_.subscription());
        for (const auto& u : sc.initial_ues) next_ue_ = std::max(next_ue_, u.id + 1);
    }

    void run() {
        const Timestamp t0 = interval_ts(0);
        if (!shadow_) {
            json cells = json::array();
            for (const auto& c : sc_.topology.cells())
                cells.push_back({{"cell", detail::cell_json(c.id)},
                                 {"role", to_string(c.role)},
                                 {"prb_capacity", c.prb_capacity},
                                 {"power", power_json(c.power)}});
            record({{"type", "run_start"},
                    {"ts", t0},
                    {"mode", to_string(sc_.mode)},
                    {"seed", sc_.seed},
                    {"interval_s", sc_.interval_s},
                    {"intervals", sc_.duration_intervals},
                    {"es_enabled", es_enabled_},
                    {"cells", std::move(cells)}});
        }
        bootstrap(t0);
        for (std::size_t i = 0; i < sc_.duration_intervals; ++i) interval(i);
        if (!shadow_) record({{"type", "run_end"}, {"ts", now_}, {"intervals", sc_.duration_intervals}});
    }

    EventLog take_log() { return std::move(log_); }
    const std::vector<std::vector<int>>& prb_history() const { return prb_history_; }
    std::map<UeId, CellId> attachments() const {
        std::map<UeId, CellId> out;
        for (const auto& [id, ue] : ran_.ues())
            if (ue.serving) out.emplace(id, *ue.serving);
        return out;
    }

private:
    Timestamp interval_ts(std::size_t i) const {
        return sc_.trace ? sc_.trace->timestamp(i) : static_cast<Timestamp>(i) * sc_.interval_s;
    }

    void record(const json& j) {
        if (!shadow_) log_.append(j.dump());
    }
    void record_message(const Message& m) {
        if (!shadow_) log_.append(encode(m));
    }

    void bootstrap(Timestamp ts) {
        now_ = ts;
        RcNodeInfo info{ts, {}};
        for (const auto& c : sc_.topology.cells())
            info.cells.push_back({c.id, c.cgi, c.pci, c.role, c.prb_capacity});
        deliver({std::string(kNode), info}, nullptr);

        for (const auto& u : sc_.initial_ues) {
            Ue ue{u.id, u.position, u.demand_prb, std::nullopt, u.qos, u.serving};
            ran_.add_ue(ue);
            deliver({std::string(kNode), RcMeasurement{ts, u.id, ran_.measure(u.id, sector_of(u.serving))}}, nullptr);
            if (ran_.attach(u.id, u.serving) != AdmitResult::Admitted)
                throw Error(ErrorCode::ConfigError, "initial UE " + std::to_string(u.id) + " does not fit on " +
                                                        to_string(u.serving));
            offered_[u.serving].push_back(u.id);
            record({{"type", "ue_arrival"},
                    {"ts", ts},
                    {"ue", u.id},
                    {"home", detail::cell_json(u.serving)},
                    {"admitted", true},
                    {"serving", detail::cell_json(u.serving)}});
            deliver({std::string(kNode), ue_info(u.id, true, u.serving, ts)}, nullptr);
        }
        if (!shadow_)
            for (const auto& m : rapp_.initial_modes(ts)) log_rapp_event(m);
    }

    RcUeInfo ue_info(UeId id, bool attached, const CellId& cell, Timestamp ts) const {
        const Ue& u = ran_.ue(id);
        return RcUeInfo{ts, id, attached, cell, u.demand_prb, u.qos, u.home};
    }

    void interval(std::size_t index) {
        now_ = interval_ts(index);
        const Timestamp ts = now_;
        if (sc_.trace) traffic(index, ts);

        for (const auto& c : ran_.cells())
            deliver({std::string(kNode), KpmReport{ts, c.id, c.prb_utilization(), static_cast<int>(c.rrc_count())}},
                    nullptr);
        ran_.take_dirty();

        std::vector<Envelope> actions;
        if (es_enabled_) {
            for (const auto& a : sc_.script)
                if (a.interval == index)
                    for (auto& m : rapp_.force(a.cell, a.sleep, ts)) actions.push_back({std::string(EsRapp::kAppId), m});
            for (auto& m : rapp_.step(ts)) actions.push_back({std::string(EsRapp::kAppId), m});
        }
        settle(std::move(actions), ts);
        flush_rapp_events();
        snapshot(index, ts);
    }

    void traffic(std::size_t index, Timestamp ts) {
        std::vector<std::pair<CellId, int>> arrivals;
        for (const auto& [cell, series] : sc_.trace->series) {
            const auto& cfg = sc_.topology.cell(cell);
            auto& queue = offered_[cell];
            for (const auto& ev : ue_events(*sc_.trace, index, cell, cfg.prb_capacity, sc_.ue_demand_prb,
                                            static_cast<int>(queue.size()))) {
                if (ev.kind == UeEvent::Kind::Departure) {
                    const UeId id = queue.front();
                    queue.pop_front();
                    depart(id, ts);
                } else {
                    if (arrivals.empty() || arrivals.back().first != cell) arrivals.emplace_back(cell, 0);
                    ++arrivals.back().second;
                }
            }
        }
        for (const auto& [cell, n] : arrivals)
            for (int k = 0; k < n; ++k) arrive(cell, ts);
    }

    void depart(UeId id, Timestamp ts) {
        const Ue& u = ran_.ue(id);
        json rec = {{"type", "ue_departure"}, {"ts", ts}, {"ue", id}};
        if (u.serving) {
            const CellId serving = *u.serving;
            rec["serving"] = detail::cell_json(serving);
            ran_.detach(id);
            record(rec);
            deliver({std::string(kNode), ue_info(id, false, serving, ts)}, nullptr);
        } else {
            record(rec);
        }
        ran_.remove_ue(id);
    }

    Position place_near(const CellId& home) {
        const auto& c = sc_.topology.cell(home);
        std::uniform_real_distribution<double> angle(-60.0, 60.0);
        std::uniform_real_distribution<double> radius(sc_.ue_min_radius_m, sc_.ue_max_radius_m);
        const double a = (c.azimuth_deg + angle(rng_)) * std::numbers::pi / 180.0;
        const double d = radius(rng_);
        return {c.position.x + d * std::sin(a), c.position.y + d * std::cos(a)};
    }

    void arrive(const CellId& home, Timestamp ts) {
        const UeId id = next_ue_++;
        QosClass qos = QosClass::Broadband;
        if (sc_.voice_fraction > 0.0) {
            std::bernoulli_distribution voice(sc_.voice_fraction);
            if (voice(rng_)) qos = QosClass::Voice;
        }
        ran_.add_ue(Ue{id, place_near(home), sc_.ue_demand_prb, std::nullopt, qos, home});
        deliver({std::string(kNode), RcMeasurement{ts, id, ran_.measure(id, sector_of(home))}}, nullptr);

        json rec = {{"type", "ue_arrival"}, {"ts", ts}, {"ue", id}, {"home", detail::cell_json(home)}};
        const auto target = xapp_.place_arrival(id, sc_.ue_demand_prb, qos, home);
        AdmitResult result = AdmitResult::RejectedNoCapacity;
        if (target) result = ran_.attach(id, *target);
        if (result == AdmitResult::Admitted) {
            rec["admitted"] = true;
            rec["serving"] = detail::cell_json(*target);
            record(rec);
            offered_[home].push_back(id);
            deliver({std::string(kNode), ue_info(id, true, *target, ts)}, nullptr);
        } else {
            rec["admitted"] = false;
            rec["reason"] = target ? std::string(to_string(result)) : std::string("no_target");
            record(rec);
            deliver({std::string(kNode), ue_info(id, false, target.value_or(home), ts)}, nullptr);
            ran_.remove_ue(id);
        }
    }

    // Logs a message and hands it to every subscriber; replies go to `out`.
    void deliver(const Envelope& env, std::vector<Envelope>* out) {
        record_message(env.message);
        for (const auto& app : ric_.route(env.message)) {
            if (app == TsXapp::kAppId) {
                auto cmds = xapp_.handle(env.message);
                if (out)
                    for (auto& c : cmds) out->push_back({app, std::move(c)});
                else if (!cmds.empty())
                    throw Error(ErrorCode::NonQuiescence, "xApp issued commands outside the settle loop");
            } else if (app == EsRapp::kAppId) {
                auto msgs = rapp_.handle(env.message);
                if (out)
                    for (auto& m : msgs) out->push_back({app, std::move(m)});
                else if (!msgs.empty())
                    throw Error(ErrorCode::NonQuiescence, "rApp issued actions outside the settle loop");
            }
        }
    }

    void drain_indications(std::vector<Envelope>& out) {
        for (auto& ind : ran_.take_indications()) out.push_back({std::string(kNode), ind});
    }

    void protocol_error(const Message& m, const Error& e, Timestamp ts) {
        record({{"type", "protocol_error"},
                {"ts", ts},
                {"message", type_name(kind_of(m))},
                {"error", to_string(e.code())},
                {"detail", e.what()}});
    }

    void process(const Envelope& env, std::vector<Envelope>& out, Timestamp ts) {
        const Message& m = env.message;
        try {
            if (const auto* put = std::get_if<A1PolicyPut>(&m)) {
                record_message(m);
                out.push_back({std::string(kRic), ric_.a1_put(put->policy, ts)});
            } else if (const auto* del = std::get_if<A1PolicyDelete>(&m)) {
                record_message(m);
                out.push_back({std::string(kRic), ric_.a1_delete(del->policy_id, ts)});
            } else if (const auto* o1 = std::get_if<O1Write>(&m)) {
                record_message(m);
                ran_.o1_write(*o1);
                drain_indications(out);
            } else if (const auto* ctl = std::get_if<CccControl>(&m)) {
                record_message(m);
                ran_.energy_control(ctl->cell, ctl->control, ts);
                drain_indications(out);
            } else if (const auto* cmd = std::get_if<HandoverCommand>(&m)) {
                record_message(m);
                const auto outcome = ric_.submit_control(*cmd, ran_);
                for (const auto& a : ric_.take_new_audit())
                    if (!shadow_) log_.append(encode_audit(a));
                xapp_.on_control_outcome(*cmd, outcome);
                if (outcome.ok()) out.push_back({std::string(kNode), ue_info(cmd->ue, true, cmd->target, ts)});
            } else {
                deliver(env, &out);
            }
        } catch (const Error& e) {
            drain_indications(out);
            protocol_error(m, e, ts);
        }
    }

    void settle(std::vector<Envelope> batch, Timestamp ts) {
        for (int epoch = 0;; ++epoch) {
            if (batch.empty() && !rapp_.has_pending() && !xapp_.has_inflight()) return;
            if (epoch >= sc_.settle_budget)
                throw Error(ErrorCode::NonQuiescence,
                            "no quiescence within " + std::to_string(sc_.settle_budget) + " epochs at " +
                                std::to_string(ts));
            std::stable_sort(batch.begin(), batch.end(),
                             [](const Envelope& a, const Envelope& b) { return a.sender < b.sender; });
            std::vector<Envelope> next;
            for (const auto& env : batch) process(env, next, ts);

            ran_.tick(ts);
            drain_indications(next);
            for (const auto& id : ran_.take_dirty()) {
                const Cell& c = ran_.cell(id);
                next.push_back(
                    {std::string(kNode), KpmReport{ts, id, c.prb_utilization(), static_cast<int>(c.rrc_count())}});
            }
            for (auto& c : xapp_.epoch_tick(ts)) next.push_back({std::string(TsXapp::kAppId), c});
            if (es_enabled_)
                for (auto& m : rapp_.epoch_tick(ts)) next.push_back({std::string(EsRapp::kAppId), m});
            flush_rapp_events();
            batch = std::move(next);
        }
    }

    void log_rapp_event(const RappEvent& ev) {
        std::visit(
            [&](const auto& e) {
                using T = std::decay_t<decltype(e)>;
                if constexpr (std::is_same_v<T, EsModeChange>) {
                    record({{"type", "es_mode"},
                            {"ts", e.ts},
                            {"sector", {e.sector.site, e.sector.sector}},
                            {"awake_capacity_count", e.awake_capacity_count}});
                } else if constexpr (std::is_same_v<T, EsDecisionRecord>) {
                    record({{"type", "es_decision"},
                            {"ts", e.ts},
                            {"sector", {e.sector.site, e.sector.sector}},
                            {"load", e.load},
                            {"predicted", e.predicted ? json(*e.predicted) : json(nullptr)},
                            {"awake_capacity_count", e.awake_capacity_count}});
                } else {
                    record({{"type", "drain_timeout"}, {"ts", e.ts}, {"cell", detail::cell_json(e.cell)}});
                }
            },
            ev);
    }

    void flush_rapp_events() {
        for (const auto& ev : rapp_.take_events())
            if (!shadow_) log_rapp_event(ev);
    }

    void snapshot(std::size_t index, Timestamp ts) {
        std::vector<int> prb, rrc, state;
        for (const auto& c : ran_.cells()) {
            prb.push_back(c.prb_used);
            rrc.push_back(static_cast<int>(c.rrc_count()));
            state.push_back(static_cast<int>(c.energy_state));
        }
        if (shadow_) {
            prb_history_.push_back(std::move(prb));
            return;
        }
        record({{"type", "snapshot"}, {"ts", ts}, {"prb", prb}, {"rrc", rrc}, {"state", state}});
        // PRB usage of the same interval with energy saving disabled
        if (reference_) record({{"type", "shadow_snapshot"}, {"ts", ts}, {"prb", reference_->at(index)}});
    }

    const Scenario& sc_;
    bool shadow_;
    const std::vector<std::vector<int>>* reference_;
    bool es_enabled_;
    Ran ran_;
    NearRtRic ric_;
    TsXapp xapp_;
    EsRapp rapp_;
    std::mt19937_64 rng_;
    UeId next_ue_ = 1;
    Timestamp now_ = 0;
    std::map<CellId, std::deque<UeId>> offered_;
    EventLog log_;
    std::vector<std::vector<int>> prb_history_;
};

}  // namespace

RunResult run(const Scenario& scenario) {
    scenario.validate();

    Simulation shadow(scenario, true, nullptr);
    shadow.run();

    Simulation live(scenario, false, &shadow.prb_history());
    live.run();

    RunResult result;
    result.attachments = live.attachments();
    result.log = live.take_log();
    result.metrics = compute_metrics(result.log);
    return result;
}

MetricsReport replay(const EventLog& log) { return compute_metrics(log); }

}  // namespace ricsim
