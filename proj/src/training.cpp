#include "sicams/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "sicams/errors.hpp"

namespace sicams::train {

using stat::Vec;

int ClusterScheme::cluster_count() const {
    switch (kind) {
        case SchemeKind::HourOfDay: return 24;
        case SchemeKind::TwoHourBlock: return 12;
        case SchemeKind::WeekdayWeekendHour: return 48;
        case SchemeKind::ExplicitMap: return explicit_count;
    }
    return 1;
}

int assign_cluster(Timestamp t, const ClusterScheme& scheme) {
    std::int64_t sec = ((t % 86400) + 86400) % 86400;
    int hour = static_cast<int>(sec / 3600);
    switch (scheme.kind) {
        case SchemeKind::HourOfDay:
            return hour;
        case SchemeKind::TwoHourBlock:
            return hour / 2;
        case SchemeKind::WeekdayWeekendHour: {
            // 1970-01-01 was a Thursday (weekday index 3, Monday = 0).
            std::int64_t days = t / 86400 - (t % 86400 < 0 ? 1 : 0);
            int dow = static_cast<int>((((days + 3) % 7) + 7) % 7);
            return (dow >= 5 ? 24 : 0) + hour;
        }
        case SchemeKind::ExplicitMap: {
            auto it = scheme.explicit_map.find(t);
            return it == scheme.explicit_map.end() ? 0 : it->second;
        }
    }
    return 0;
}

ClusterScheme parse_scheme(const std::string& name) {
    ClusterScheme s;
    if (name == "hour-of-day")
        s.kind = SchemeKind::HourOfDay;
    else if (name == "two-hour-block")
        s.kind = SchemeKind::TwoHourBlock;
    else if (name == "weekday-weekend-hour")
        s.kind = SchemeKind::WeekdayWeekendHour;
    else if (name == "explicit-map")
        s.kind = SchemeKind::ExplicitMap;
    else
        throw UsageError("unknown cluster scheme '" + name + "'");
    return s;
}

std::string scheme_name(const ClusterScheme& scheme) {
    switch (scheme.kind) {
        case SchemeKind::HourOfDay: return "hour-of-day";
        case SchemeKind::TwoHourBlock: return "two-hour-block";
        case SchemeKind::WeekdayWeekendHour: return "weekday-weekend-hour";
        case SchemeKind::ExplicitMap: return "explicit-map";
    }
    return "hour-of-day";
}

const ClusterModel& TrainedModel::cluster(int id) const {
    if (id < 0 || id >= static_cast<int>(clusters.size()))
        throw DataError("cluster id " + std::to_string(id) + " not present in model");
    return clusters[static_cast<std::size_t>(id)];
}

namespace {

// Rows retained after applying the training strategy, grouped per cluster.
std::vector<std::vector<std::size_t>> cluster_rows(const SensorPanel& panel,
                                                   const ClusterScheme& scheme,
                                                   const TrainingStrategy& strategy) {
    const int c = scheme.cluster_count();
    std::vector<std::vector<std::size_t>> rows(static_cast<std::size_t>(c));
    for (std::size_t t = 0; t < panel.steps(); ++t) {
        if (strategy.kind == StrategyKind::CleanWindows) {
            bool inside = false;
            for (const auto& [a, b] : strategy.windows)
                if (panel.timestamps[t] >= a && panel.timestamps[t] <= b) {
                    inside = true;
                    break;
                }
            if (!inside) continue;
        }
        int k = assign_cluster(panel.timestamps[t], scheme);
        rows[static_cast<std::size_t>(k)].push_back(t);
    }
    return rows;
}

// Drop the q fraction of rows with the lowest mean pressure-sensor z-score.
void apply_drop_lowest(const SensorPanel& panel, std::vector<std::size_t>& rows, double q) {
    if (q <= 0.0 || rows.size() < 2) return;
    std::vector<std::size_t> pressure_cols;
    for (std::size_t j = 0; j < panel.sensors.size(); ++j)
        if (panel.sensors[j].role == SensorRole::Pressure) pressure_cols.push_back(j);
    if (pressure_cols.empty()) return;

    // Per-column mean/sd over the cluster's rows.
    std::vector<double> mean(pressure_cols.size(), 0.0), sd(pressure_cols.size(), 0.0);
    for (std::size_t c = 0; c < pressure_cols.size(); ++c) {
        for (std::size_t t : rows) mean[c] += panel.values(t, pressure_cols[c]);
        mean[c] /= static_cast<double>(rows.size());
        for (std::size_t t : rows) {
            double d = panel.values(t, pressure_cols[c]) - mean[c];
            sd[c] += d * d;
        }
        sd[c] = std::sqrt(sd[c] / static_cast<double>(rows.size() - 1));
        if (sd[c] <= 0.0) sd[c] = 1.0;
    }

    std::vector<std::pair<double, std::size_t>> scored;
    scored.reserve(rows.size());
    for (std::size_t t : rows) {
        double z = 0.0;
        for (std::size_t c = 0; c < pressure_cols.size(); ++c)
            z += (panel.values(t, pressure_cols[c]) - mean[c]) / sd[c];
        scored.emplace_back(z / static_cast<double>(pressure_cols.size()), t);
    }
    std::sort(scored.begin(), scored.end());
    std::size_t drop = static_cast<std::size_t>(std::floor(q * static_cast<double>(rows.size())));
    rows.clear();
    for (std::size_t i = drop; i < scored.size(); ++i) rows.push_back(scored[i].second);
    std::sort(rows.begin(), rows.end());
}

}  // namespace

TrainedModel train(const SensorPanel& panel, const ClusterScheme& scheme,
                   const TrainingStrategy& strategy, const TrainOptions& opts) {
    if (strategy.kind == StrategyKind::Mcd)
        throw UsageError("MCD training strategy is reserved and not implemented");
    if (strategy.kind == StrategyKind::DropLowest &&
        (strategy.drop_fraction < 0.0 || strategy.drop_fraction > 0.5))
        throw UsageError("drop-lowest fraction must lie in [0, 0.5]");

    const int s = static_cast<int>(panel.dim());
    auto rows = cluster_rows(panel, scheme, strategy);
    if (strategy.kind == StrategyKind::DropLowest)
        for (auto& r : rows) apply_drop_lowest(panel, r, strategy.drop_fraction);

    TrainedModel model;
    model.scheme = scheme;
    for (const auto& info : panel.sensors) {
        model.sensor_ids.push_back(info.id);
        model.sensor_roles.push_back(info.role);
    }
    model.clusters.resize(rows.size());

    std::vector<std::string> errors(rows.size());
    std::vector<int> short_clusters;

#pragma omp parallel for schedule(dynamic)
    for (long long ki = 0; ki < static_cast<long long>(rows.size()); ++ki) {
        auto k = static_cast<std::size_t>(ki);
        ClusterModel& cm = model.clusters[k];
        if (rows[k].size() <= static_cast<std::size_t>(s + 2)) {
            cm.usable = false;
            continue;
        }
        std::vector<Vec> samples;
        samples.reserve(rows[k].size());
        for (std::size_t t : rows[k]) samples.push_back(panel.row(t));
        try {
            cm.moments = stat::estimate_moments(samples);
            cm.whitening = stat::build_whitening(cm.moments, opts.whitening);
        } catch (const std::exception& e) {
            errors[k] = e.what();
        }
    }

    for (std::size_t k = 0; k < rows.size(); ++k) {
        if (!errors[k].empty())
            throw NumericalError("cluster " + std::to_string(k) + ": " + errors[k]);
        if (!model.clusters[k].usable) short_clusters.push_back(static_cast<int>(k));
    }
    if (!short_clusters.empty() && !opts.allow_unusable_clusters) {
        std::ostringstream os;
        os << "insufficient data (n_k <= s+2 = " << (s + 2) << ") in clusters:";
        for (int k : short_clusters) os << " " << k;
        throw DataError(os.str());
    }
    return model;
}

std::vector<Thresholds> thresholds(const TrainedModel& model, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw UsageError("alpha must lie in (0, 1)");
    const int s = model.dim();
    std::vector<Thresholds> out(model.clusters.size());
    for (std::size_t k = 0; k < model.clusters.size(); ++k) {
        const ClusterModel& cm = model.clusters[k];
        if (!cm.usable) continue;
        const long nk = cm.moments.n;
        if (nk <= s + 2)
            throw std::domain_error("thresholds: cluster " + std::to_string(k) +
                                    " has n_k <= s+2");
        out[k].theta1 = stat::f_quantile(1.0 - alpha, s, static_cast<int>(nk - s));
        out[k].theta0 =
            static_cast<double>(nk - s) / static_cast<double>(nk - s - 2);
    }
    return out;
}

double ks_statistic_normal(std::vector<double> sample, double mean, double sd) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        double z = (sample[i] - mean) / sd;
        double cdf = 0.5 * std::erfc(-z / std::sqrt(2.0));
        d = std::max(d, std::fabs(cdf - static_cast<double>(i + 1) / n));
        d = std::max(d, std::fabs(cdf - static_cast<double>(i) / n));
    }
    return d;
}

double ks_critical(double level, std::size_t n) {
    // Asymptotic Kolmogorov critical value c(level) / sqrt(n).
    double c = std::sqrt(-0.5 * std::log(level / 2.0));
    return c / std::sqrt(static_cast<double>(n));
}

std::vector<NormalityEntry> normality_screen(const SensorPanel& panel,
                                             const TrainedModel& model,
                                             double level) {
    auto rows = cluster_rows(panel, model.scheme, TrainingStrategy{});
    std::vector<NormalityEntry> report;
    for (std::size_t k = 0; k < model.clusters.size(); ++k) {
        if (k >= rows.size()) break;
        const ClusterModel& cm = model.clusters[k];
        for (std::size_t j = 0; j < model.sensor_ids.size(); ++j) {
            NormalityEntry e;
            e.cluster = static_cast<int>(k);
            e.sensor_id = model.sensor_ids[j];
            if (rows[k].size() < 8 || !cm.usable) {
                e.insufficient = true;
                report.push_back(e);
                continue;
            }
            std::vector<double> sample;
            sample.reserve(rows[k].size());
            for (std::size_t t : rows[k]) sample.push_back(panel.values(t, j));
            double sd = std::sqrt(cm.moments.cov(static_cast<Eigen::Index>(j),
                                                 static_cast<Eigen::Index>(j)));
            if (sd <= 0.0) {
                e.insufficient = true;
                report.push_back(e);
                continue;
            }
            e.ks_stat = ks_statistic_normal(std::move(sample),
                                            cm.moments.mean(static_cast<Eigen::Index>(j)), sd);
            e.pass = e.ks_stat < ks_critical(level, rows[k].size());
            report.push_back(e);
        }
    }
    return report;
}

}  // namespace sicams::train
