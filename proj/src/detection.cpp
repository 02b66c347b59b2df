#include "sicams/detection.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "sicams/errors.hpp"

namespace sicams::detect {

using stat::Vec;

namespace {

// Fills ma / ma_defined from the t2f column (trailing window).
void fill_moving_average(StatisticSeries& out) {
    const std::size_t n = out.t2f.size();
    const int l = out.window;
    out.ma.assign(n, 0.0);
    out.ma_defined.assign(n, false);
    double acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        acc += out.t2f[t];
        if (t >= static_cast<std::size_t>(l)) acc -= out.t2f[t - static_cast<std::size_t>(l)];
        if (t + 1 >= static_cast<std::size_t>(l)) {
            out.ma[t] = acc / static_cast<double>(l);
            out.ma_defined[t] = true;
        }
    }
}

StatisticSeries score_impl(const train::TrainedModel& model, const SensorPanel& panel,
                           int window, bool parallel) {
    if (window < 1) throw UsageError("score: window must be >= 1");
    // Bind by sensor name so column permutations in the panel do not matter.
    SensorPanel aligned = panel.reordered(model.sensor_ids);
    const int s = model.dim();
    const std::size_t n = aligned.steps();

    StatisticSeries out;
    out.timestamps = aligned.timestamps;
    out.window = window;
    out.clusters.assign(n, 0);
    out.t2.assign(n, 0.0);
    out.t2f.assign(n, 0.0);
    out.wh.assign(n, 0.0);

    // Validate clusters up front so the parallel loop is exception-free.
    for (std::size_t t = 0; t < n; ++t) {
        int k = train::assign_cluster(aligned.timestamps[t], model.scheme);
        if (k < 0 || k >= static_cast<int>(model.clusters.size()) ||
            !model.clusters[static_cast<std::size_t>(k)].usable)
            throw DataError("score: cluster " + std::to_string(k) + " at " +
                            format_iso8601(aligned.timestamps[t]) +
                            " is unusable or missing from the model");
        out.clusters[t] = k;
    }

#pragma omp parallel for schedule(static) if (parallel)
    for (long long ti = 0; ti < static_cast<long long>(n); ++ti) {
        auto t = static_cast<std::size_t>(ti);
        const auto& cm = model.clusters[static_cast<std::size_t>(out.clusters[t])];
        Vec x = aligned.row(t);
        double t2 = stat::mahalanobis_sq(x, cm.whitening);
        out.t2[t] = t2;
        out.t2f[t] = stat::t2_to_f(t2, s, cm.whitening.n);
        out.wh[t] = stat::wilson_hilferty(t2, s);
    }

    fill_moving_average(out);
    return out;
}

}  // namespace

StatisticSeries score(const train::TrainedModel& model, const SensorPanel& panel, int window) {
    return score_impl(model, panel, window, true);
}

StatisticSeries score_serial(const train::TrainedModel& model, const SensorPanel& panel,
                             int window) {
    return score_impl(model, panel, window, false);
}

StatusSeries hysteresis(const StatisticSeries& series, double theta1, double theta0,
                        int initial) {
    if (!(theta1 > theta0 && theta0 > 0.0))
        throw UsageError("hysteresis: requires theta1 > theta0 > 0");
    StatusSeries out;
    out.timestamps = series.timestamps;
    out.status.assign(series.size(), 0);
    int state = initial ? 1 : 0;
    for (std::size_t t = 0; t < series.size(); ++t) {
        if (series.ma_defined[t]) {
            if (state == 0 && series.ma[t] > theta1)
                state = 1;
            else if (state == 1 && series.ma[t] < theta0)
                state = 0;
        }
        out.status[t] = state;
    }
    return out;
}

StatusSeries hysteresis(const StatisticSeries& series,
                        const std::vector<train::Thresholds>& per_cluster, int initial) {
    StatusSeries out;
    out.timestamps = series.timestamps;
    out.status.assign(series.size(), 0);
    int state = initial ? 1 : 0;
    for (std::size_t t = 0; t < series.size(); ++t) {
        auto k = static_cast<std::size_t>(series.clusters[t]);
        if (k >= per_cluster.size())
            throw UsageError("hysteresis: no thresholds for cluster " + std::to_string(k));
        if (!(per_cluster[k].theta1 > per_cluster[k].theta0 && per_cluster[k].theta0 > 0.0))
            throw UsageError("hysteresis: cluster " + std::to_string(k) +
                             " requires theta1 > theta0 > 0");
        if (series.ma_defined[t]) {
            if (state == 0 && series.ma[t] > per_cluster[k].theta1)
                state = 1;
            else if (state == 1 && series.ma[t] < per_cluster[k].theta0)
                state = 0;
        }
        out.status[t] = state;
    }
    return out;
}

std::optional<long> detection_delay(const StatusSeries& status, Timestamp tau) {
    if (status.timestamps.empty() || tau < status.timestamps.front() ||
        tau > status.timestamps.back())
        throw std::out_of_range("detection_delay: tau outside the series range");
    for (std::size_t t = 0; t < status.timestamps.size(); ++t) {
        if (status.timestamps[t] >= tau && status.status[t] == 1) {
            Timestamp step = status.timestamps.size() > 1
                                 ? status.timestamps[1] - status.timestamps[0]
                                 : 1;
            return static_cast<long>((status.timestamps[t] - tau) / step);
        }
    }
    return std::nullopt;
}

LeakCountSeries leak_count_from_events(const std::vector<EventRecord>& events,
                                       const std::vector<Timestamp>& grid) {
    LeakCountSeries out;
    out.timestamps = grid;
    out.count.assign(grid.size(), 0);
    std::vector<int> raw(grid.size(), 0);
    for (const auto& ev : events) {
        if (ev.end && *ev.end < ev.start)
            log_warning("event '" + ev.id + "' ends before it starts; ignoring its end");
        for (std::size_t t = 0; t < grid.size(); ++t) {
            bool active = grid[t] >= ev.start &&
                          (!ev.end || *ev.end < ev.start || grid[t] <= *ev.end);
            if (active) raw[t] += 1;
        }
    }
    // One start/end decision per step: the count moves toward the raw active
    // count by at most one unit per step, never below zero.
    int state = 0;
    for (std::size_t t = 0; t < grid.size(); ++t) {
        if (raw[t] > state)
            state += 1;
        else if (raw[t] < state)
            state -= 1;
        if (state < 0) {
            log_warning("leak count clamped at zero");
            state = 0;
        }
        out.count[t] = state;
    }
    return out;
}

double leak_hours(const LeakCountSeries& true_counts, const LeakCountSeries& est_counts) {
    if (true_counts.timestamps != est_counts.timestamps)
        throw DataError("leak_hours: series are on different time grids");
    if (true_counts.timestamps.size() < 2) return 0.0;
    double total = 0.0;
    for (std::size_t t = 0; t + 1 < true_counts.timestamps.size(); ++t) {
        double dt_hours =
            static_cast<double>(true_counts.timestamps[t + 1] - true_counts.timestamps[t]) /
            3600.0;
        total += std::abs(true_counts.count[t] - est_counts.count[t]) * dt_hours;
    }
    return total;
}

ConfusionResult confusion_eval(const std::vector<Detection>& detections,
                               const std::vector<EventRecord>& truth, double radius,
                               const loc::NetworkGraph& graph) {
    std::vector<Detection> dets = detections;
    std::sort(dets.begin(), dets.end(),
              [](const Detection& a, const Detection& b) { return a.time < b.time; });

    std::vector<bool> matched(truth.size(), false);
    ConfusionResult res;
    for (const auto& det : dets) {
        int dn = graph.index_of(det.location);
        bool hit = false;
        for (std::size_t e = 0; e < truth.size(); ++e) {
            if (matched[e]) continue;
            const auto& ev = truth[e];
            if (det.time < ev.start || (ev.end && det.time > *ev.end)) continue;
            int en = graph.index_of(ev.id);
            if (graph.euclidean(dn, en) > radius) continue;
            matched[e] = true;
            res.tp += 1;
            res.delays_hours.push_back(static_cast<double>(det.time - ev.start) / 3600.0);
            hit = true;
            break;
        }
        if (!hit) res.fp += 1;
    }
    for (bool m : matched)
        if (!m) res.fn += 1;
    res.tp_rate = truth.empty() ? 0.0
                                : static_cast<double>(res.tp) / static_cast<double>(truth.size());
    return res;
}

double fa_combination(double p, int s) {
    if (!(p >= 0.0 && p <= 1.0) || s < 1)
        throw std::domain_error("fa_combination: invalid arguments");
    return 1.0 - std::pow(1.0 - p, s);
}

double fa_combination_inverse(double p_fa, int s) {
    if (!(p_fa >= 0.0 && p_fa <= 1.0) || s < 1)
        throw std::domain_error("fa_combination_inverse: invalid arguments");
    return 1.0 - std::pow(1.0 - p_fa, 1.0 / static_cast<double>(s));
}

double bonferroni(double p_fa, int s) {
    if (!(p_fa >= 0.0 && p_fa <= 1.0) || s < 1)
        throw std::domain_error("bonferroni: invalid arguments");
    return p_fa / static_cast<double>(s);
}

}  // namespace sicams::detect
