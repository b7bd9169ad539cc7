#include "ricsim/es_rapp.hpp"

#include <algorithm>
#include <limits>

#include "json_util.hpp"

namespace ricsim {

constexpr Timestamp kDay = 86400;

void EsConfig::validate(Timestamp granularity_s) const {
    if (!(theta_off >= 0.0 && theta_off < theta_on && theta_on <= 1.0))
        throw Error(ErrorCode::ConfigError, "need 0 <= theta_off < theta_on <= 1");
    if (min_dwell_s < granularity_s) throw Error(ErrorCode::ConfigError, "min_dwell_s must be at least one interval");
    if (horizon_intervals < 1 || horizon_intervals * granularity_s > kDay)
        throw Error(ErrorCode::ConfigError, "horizon must be between one interval and one day");
    if (drain_timeout_epochs < 1) throw Error(ErrorCode::ConfigError, "drain_timeout_epochs must be positive");
    if (history_days < 7) throw Error(ErrorCode::ConfigError, "history must hold at least 7 days");
}

EsConfig parse_es_config(std::string_view json_text) {
    const auto root = detail::parse_or_throw(json_text, ErrorCode::ConfigError, "rApp config");
    detail::Reader r(root, "", ErrorCode::ConfigError);
    EsConfig cfg;
    if (r.has("theta_off")) cfg.theta_off = r.number("theta_off");
    if (r.has("theta_on")) cfg.theta_on = r.number("theta_on");
    if (r.has("min_dwell_s")) cfg.min_dwell_s = r.integer("min_dwell_s");
    if (r.has("horizon_intervals")) cfg.horizon_intervals = static_cast<int>(r.integer("horizon_intervals"));
    if (r.has("drain_timeout_epochs")) cfg.drain_timeout_epochs = static_cast<int>(r.integer("drain_timeout_epochs"));
    if (r.has("mode")) {
        auto m = notification_mode_from(r.string("mode"));
        if (!m) r.fail("mode", "expected a1|ccc");
        cfg.mode = *m;
    }
    if (r.has("auto")) cfg.auto_decide = r.boolean("auto");
    if (r.has("predictor")) cfg.predictor = r.string("predictor");
    if (r.has("history_days")) cfg.history_days = static_cast<int>(r.integer("history_days"));
    return cfg;
}

LoadHistory::LoadHistory(Timestamp granularity_s, std::size_t capacity_intervals)
    : granularity_s_(granularity_s), capacity_(capacity_intervals) {
    if (granularity_s <= 0) throw Error(ErrorCode::ConfigError, "granularity must be positive");
}

void LoadHistory::record(const CellId& cell, Timestamp ts, double utilization) {
    auto& s = series_[cell];
    if (!s.empty()) {
        if (ts == s.back().ts) {
            s.back().utilization = utilization;
            return;
        }
        if (ts != s.back().ts + granularity_s_)
            throw Error(ErrorCode::GridError, "history gap for " + to_string(cell) + " at " + std::to_string(ts));
    }
    s.push_back({ts, utilization});
    while (s.size() > capacity_) s.pop_front();
}

std::size_t LoadHistory::min_length() const noexcept {
    if (series_.empty()) return 0;
    std::size_t n = std::numeric_limits<std::size_t>::max();
    for (const auto& [cell, s] : series_) n = std::min(n, s.size());
    return n;
}

namespace {

// Mean of the samples exactly k days before `ts` (k >= 1) that the buffer holds.
std::optional<double> seasonal_mean(const std::deque<LoadHistory::Sample>& s, Timestamp granularity, Timestamp ts) {
    const Timestamp first = s.front().ts;
    double sum = 0.0;
    int n = 0;
    for (Timestamp t = ts - kDay; t >= first; t -= kDay) {
        if (t > s.back().ts) continue;
        const auto idx = static_cast<std::size_t>((t - first) / granularity);
        sum += s[idx].utilization;
        ++n;
    }
    if (n == 0) return std::nullopt;
    return sum / n;
}

}  // namespace

std::map<CellId, double> SeasonalEwmaPredictor::predict(const LoadHistory& history, int horizon_intervals) const {
    const Timestamp g = history.granularity_s();
    const auto per_day = static_cast<std::size_t>(kDay / g);
    if (history.series().empty() || history.min_length() < per_day)
        throw Error(ErrorCode::InsufficientHistory, "need at least one day of samples");
    if (horizon_intervals < 1 || horizon_intervals * g > kDay)
        throw Error(ErrorCode::ConfigError, "horizon must be between one interval and one day");

    std::map<CellId, double> out;
    for (const auto& [cell, s] : history.series()) {
        const Timestamp target = s.back().ts + horizon_intervals * g;
        const double seasonal = seasonal_mean(s, g, target).value_or(s.back().utilization);

        // level correction from how the last hour deviated from its own seasonal value
        std::optional<double> ewma;
        const std::size_t n = s.size();
        for (std::size_t i = n >= 4 ? n - 4 : 0; i < n; ++i) {
            auto base = seasonal_mean(s, g, s[i].ts);
            if (!base) continue;
            const double residual = s[i].utilization - *base;
            ewma = ewma ? 0.5 * residual + 0.5 * *ewma : residual;
        }
        const double blended = 0.5 * seasonal + 0.5 * (seasonal + ewma.value_or(0.0));
        out.emplace(cell, std::clamp(blended, 0.0, 1.0));
    }
    return out;
}

std::unique_ptr<Predictor> make_predictor(std::string_view name) {
    if (name == "seasonal_ewma" || name == "baseline") return std::make_unique<SeasonalEwmaPredictor>();
    throw Error(ErrorCode::ConfigError, "unknown predictor '" + std::string(name) + "'");
}

SectorLayout SectorLayout::from(const Topology& topology, const SectorId& sector) {
    SectorLayout layout;
    layout.sector = sector;
    bool have_coverage = false;
    for (const auto& id : topology.sector_cells(sector)) {  // ordered by band
        const auto& c = topology.cell(id);
        if (c.role == CellRole::Coverage) {
            layout.coverage = id;
            layout.coverage_prb = c.prb_capacity;
            have_coverage = true;
        } else {
            layout.capacity.push_back(id);
            layout.capacity_prb.push_back(c.prb_capacity);
        }
    }
    if (!have_coverage) throw Error(ErrorCode::ConfigError, "sector " + to_string(sector) + " has no coverage cell");
    return layout;
}

double SectorLayout::capacity_with(int awake) const {
    double total = coverage_prb;
    for (int i = 0; i < awake && i < static_cast<int>(capacity_prb.size()); ++i) total += capacity_prb[i];
    return total;
}

double projected_demand(const SectorLayout& layout, const std::map<CellId, double>& predictions) {
    auto get = [&](const CellId& id) {
        auto it = predictions.find(id);
        if (it == predictions.end()) throw Error(ErrorCode::ConfigError, "no prediction for " + to_string(id));
        return it->second;
    };
    double demand = get(layout.coverage) * layout.coverage_prb;
    for (std::size_t i = 0; i < layout.capacity.size(); ++i) demand += get(layout.capacity[i]) * layout.capacity_prb[i];
    return demand;
}

EsMode decide_mode(const SectorLayout& layout, const std::map<CellId, double>& predictions, const EsMode& current,
                   std::optional<Timestamp> last_change, Timestamp now, const EsConfig& config) {
    if (last_change && now - *last_change < config.min_dwell_s) return current;

    const double demand = projected_demand(layout, predictions);
    const int carriers = static_cast<int>(layout.capacity.size());
    int fit = carriers;
    for (int k = 0; k <= carriers; ++k) {
        if (demand / layout.capacity_with(k) <= config.theta_off) {
            fit = k;
            break;
        }
    }

    EsMode next = current;
    const double utilization = demand / layout.capacity_with(current.awake_capacity_count);
    if (utilization > config.theta_on) next.awake_capacity_count = std::max(fit, current.awake_capacity_count);
    else if (fit < current.awake_capacity_count) next.awake_capacity_count = fit;
    return next;
}

EsRapp::EsRapp(const Topology& topology, Timestamp granularity_s, EsConfig config, std::unique_ptr<Predictor> predictor)
    : topology_(&topology),
      config_(std::move(config)),
      predictor_(std::move(predictor)),
      history_(granularity_s, static_cast<std::size_t>(config_.history_days) * static_cast<std::size_t>(kDay / granularity_s)) {
    config_.validate(granularity_s);
    if (!predictor_) throw Error(ErrorCode::ConfigError, "rApp needs a predictor");
    for (const auto& c : topology.cells()) cells_[c.id];
    for (const auto& s : topology.sectors()) {
        SectorTrack t;
        t.layout = SectorLayout::from(topology, s);
        t.awake = static_cast<int>(t.layout.capacity.size());
        sectors_.emplace(s, std::move(t));
    }
}

Subscription EsRapp::subscription() const {
    return Subscription{AppId(kAppId), {MessageKind::KpmReport, MessageKind::CccIndication}, std::nullopt};
}

std::string EsRapp::policy_id_for(const CellId& cell) {
    return "es-forbid-" + std::to_string(cell.site) + "-" + std::to_string(cell.sector) + "-" +
           std::to_string(cell.band);
}

EsMode EsRapp::mode(const SectorId& sector) const {
    auto it = sectors_.find(sector);
    if (it == sectors_.end()) throw Error(ErrorCode::UnknownCell, "sector " + to_string(sector));
    return EsMode{sector, it->second.awake};
}

std::optional<int> EsRapp::last_rrc(const CellId& cell) const {
    auto it = cells_.find(cell);
    return it == cells_.end() ? std::nullopt : it->second.last_rrc;
}

std::vector<EsModeChange> EsRapp::initial_modes(Timestamp ts) const {
    std::vector<EsModeChange> out;
    for (const auto& [id, s] : sectors_) out.push_back({ts, id, s.awake});
    return out;
}

bool EsRapp::has_pending() const noexcept {
    return std::any_of(cells_.begin(), cells_.end(), [](const auto& kv) {
        const Phase p = kv.second.phase;
        return p == Phase::Draining || p == Phase::Finalizing || p == Phase::Waking;
    });
}

std::vector<Message> EsRapp::handle(const Message& message) {
    std::vector<Message> out;
    if (const auto* kpm = std::get_if<KpmReport>(&message)) {
        history_.record(kpm->cell, kpm->ts, kpm->prb_utilization);
        cells_[kpm->cell].last_rrc = kpm->rrc_count;
    } else if (const auto* ind = std::get_if<CccIndication>(&message)) {
        auto& track = cells_[ind->cell];
        track.state = ind->energy_state;
        if (ind->energy_state == EnergyState::IsEnergySaving &&
            (track.phase == Phase::Draining || track.phase == Phase::Finalizing)) {
            track.phase = Phase::Asleep;
        } else if (ind->energy_state == EnergyState::IsNotEnergySaving && track.phase == Phase::Waking) {
            // the FORBID goes away only once the cell is back in service
            if (config_.mode == NotificationMode::A1) out.push_back(A1PolicyDelete{ind->ts, policy_id_for(ind->cell)});
            track.phase = Phase::Awake;
        }
    }
    return out;
}

std::vector<Message> EsRapp::begin_sleep(const CellId& cell, Timestamp now) {
    auto& track = cells_.at(cell);
    track.phase = Phase::Draining;
    track.epochs = 0;
    if (config_.mode == NotificationMode::A1)
        return {A1PolicyPut{now, TspPolicy{policy_id_for(cell), Preference::Forbid, {cell}}}};
    return {CccControl{now, cell, EnergyControl::ToBeEnergySaving}};
}

std::vector<Message> EsRapp::begin_wake(const CellId& cell, Timestamp now) {
    auto& track = cells_.at(cell);
    track.phase = Phase::Waking;
    track.epochs = 0;
    if (config_.mode == NotificationMode::A1)
        return {O1Write{now, cell, O1Attribute::EnergySavingState, EnergyState::IsNotEnergySaving}};
    return {CccControl{now, cell, EnergyControl::ToBeNotEnergySaving}};
}

void EsRapp::note_mode(SectorTrack& sector, int awake, Timestamp now) {
    if (awake == sector.awake) return;
    sector.awake = awake;
    sector.previous_change = sector.last_change;
    sector.last_change = now;
    events_.push_back(EsModeChange{now, sector.layout.sector, awake});
}

std::vector<Message> EsRapp::step(Timestamp now) {
    std::optional<std::map<CellId, double>> predictions;
    if (config_.auto_decide) {
        try {
            std::map<CellId, double> peak;
            for (int h = 1; h <= config_.horizon_intervals; ++h)
                for (const auto& [cell, v] : predictor_->predict(history_, h)) {
                    auto [it, fresh] = peak.emplace(cell, v);
                    if (!fresh) it->second = std::max(it->second, v);
                }
            predictions = std::move(peak);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::InsufficientHistory) throw;
        }
    }

    std::vector<Message> out;
    for (auto& [sid, sector] : sectors_) {
        const auto& layout = sector.layout;
        auto current_util = [&](const CellId& id) {
            const auto& s = history_.series();
            auto it = s.find(id);
            return it == s.end() || it->second.empty() ? 0.0 : it->second.back().utilization;
        };
        double load = current_util(layout.coverage) * layout.coverage_prb;
        for (std::size_t i = 0; i < layout.capacity.size(); ++i)
            load += current_util(layout.capacity[i]) * layout.capacity_prb[i];

        EsDecisionRecord record{now, sid, load / layout.total_capacity(), std::nullopt, sector.awake};
        const bool busy = std::any_of(layout.capacity.begin(), layout.capacity.end(), [&](const CellId& c) {
            const Phase p = cells_.at(c).phase;
            return p != Phase::Awake && p != Phase::Asleep;
        });

        if (predictions && !busy) {
            record.predicted = projected_demand(layout, *predictions) / layout.total_capacity();
            const EsMode next =
                decide_mode(layout, *predictions, EsMode{sid, sector.awake}, sector.last_change, now, config_);
            if (next.awake_capacity_count != sector.awake) {
                const int k = next.awake_capacity_count;
                // sleep from the highest band down, wake from the lowest band up
                for (int i = static_cast<int>(layout.capacity.size()) - 1; i >= k; --i)
                    if (cells_.at(layout.capacity[i]).phase == Phase::Awake) {
                        auto a = begin_sleep(layout.capacity[i], now);
                        out.insert(out.end(), a.begin(), a.end());
                    }
                for (int i = 0; i < k; ++i)
                    if (cells_.at(layout.capacity[i]).phase == Phase::Asleep) {
                        auto a = begin_wake(layout.capacity[i], now);
                        out.insert(out.end(), a.begin(), a.end());
                    }
                note_mode(sector, k, now);
                record.awake_capacity_count = k;
            }
        }
        events_.push_back(record);
    }
    return out;
}

std::vector<Message> EsRapp::force(const CellId& cell, bool sleep, Timestamp now) {
    const auto* config = topology_->find(cell);
    if (!config) throw Error(ErrorCode::UnknownCell, to_string(cell));
    if (config->role == CellRole::Coverage)
        throw Error(ErrorCode::CoverageForbidden, "coverage cell " + to_string(cell) + " is never switched off");
    auto& track = cells_.at(cell);
    auto& sector = sectors_.at(sector_of(cell));
    if (sleep && track.phase == Phase::Awake) {
        note_mode(sector, sector.awake - 1, now);
        return begin_sleep(cell, now);
    }
    if (!sleep && track.phase == Phase::Asleep) {
        note_mode(sector, sector.awake + 1, now);
        return begin_wake(cell, now);
    }
    return {};
}

std::vector<Message> EsRapp::epoch_tick(Timestamp now) {
    std::vector<Message> out;
    for (auto& [cell, track] : cells_) {
        if (track.phase != Phase::Draining) continue;
        ++track.epochs;
        if (config_.mode == NotificationMode::A1 && track.last_rrc && *track.last_rrc == 0) {
            out.push_back(O1Write{now, cell, O1Attribute::EnergySavingState, EnergyState::IsEnergySaving});
            track.phase = Phase::Finalizing;
            continue;
        }
        if (track.epochs < config_.drain_timeout_epochs) continue;

        // give up: the cell goes back into service and the mode decision is undone
        events_.push_back(DrainTimeout{now, cell});
        auto& sector = sectors_.at(sector_of(cell));
        ++sector.awake;
        if (config_.mode == NotificationMode::A1) {
            out.push_back(A1PolicyDelete{now, policy_id_for(cell)});
            track.phase = Phase::Awake;
        } else {
            out.push_back(CccControl{now, cell, EnergyControl::ToBeNotEnergySaving});
            track.phase = Phase::Waking;
        }
        // an aborted change does not count against the dwell timer
        if (sector.last_change == now) sector.last_change = sector.previous_change;
        events_.push_back(EsModeChange{now, sector.layout.sector, sector.awake});
    }
    return out;
}

}  // namespace ricsim
