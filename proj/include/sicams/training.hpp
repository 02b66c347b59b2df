#ifndef SICAMS_TRAINING_HPP
#define SICAMS_TRAINING_HPP

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sicams/panel.hpp"
#include "sicams/statcore.hpp"

namespace sicams::train {

// ---------------------------------------------------------------------------
// Temporal cluster assignment. Every timestamp maps to exactly one cluster;
// ids form a contiguous 0..C-1 range.
// ---------------------------------------------------------------------------

enum class SchemeKind { HourOfDay, TwoHourBlock, WeekdayWeekendHour, ExplicitMap };

struct ClusterScheme {
    SchemeKind kind = SchemeKind::HourOfDay;
    // ExplicitMap: timestamp -> cluster id; timestamps without an entry fall
    // to cluster 0.
    std::map<Timestamp, int> explicit_map;
    int explicit_count = 1;

    int cluster_count() const;
};

int assign_cluster(Timestamp t, const ClusterScheme& scheme);

ClusterScheme parse_scheme(const std::string& name);
std::string scheme_name(const ClusterScheme& scheme);

// ---------------------------------------------------------------------------
// Training strategies.
// ---------------------------------------------------------------------------

enum class StrategyKind {
    Unfiltered,
    DropLowest,     // drops the fraction q of lowest-pressure rows per cluster
    CleanWindows,   // restricts to explicit time intervals
    // Reserved for a robust-covariance (MCD) variant; not implemented.
    Mcd,
};

struct TrainingStrategy {
    StrategyKind kind = StrategyKind::Unfiltered;
    double drop_fraction = 0.0;  // DropLowest; q in [0, 0.5]
    std::vector<std::pair<Timestamp, Timestamp>> windows;  // CleanWindows, inclusive
};

// ---------------------------------------------------------------------------
// Trained model.
// ---------------------------------------------------------------------------

struct ClusterModel {
    stat::MomentEstimate moments;
    stat::WhiteningOperator whitening;
    bool usable = true;  // false when n_k <= s + 2
};

struct TrainedModel {
    ClusterScheme scheme;
    std::vector<std::string> sensor_ids;    // column order
    std::vector<SensorRole> sensor_roles;
    std::vector<ClusterModel> clusters;     // indexed by cluster id

    int dim() const { return static_cast<int>(sensor_ids.size()); }
    const ClusterModel& cluster(int id) const;
};

struct TrainOptions {
    stat::WhiteningOptions whitening;
    bool allow_unusable_clusters = false;  // otherwise insufficient-data error
};

/// Per-cluster moment estimation over the retained rows. DropLowest ranks
/// rows by the mean z-score of pressure-role sensors within each cluster and
/// removes the lowest q fraction before estimation.
TrainedModel train(const SensorPanel& panel, const ClusterScheme& scheme,
                   const TrainingStrategy& strategy, const TrainOptions& opts = {});

struct Thresholds {
    double theta1 = 0.0;  // F_{1-alpha}(s, n_k - s)
    double theta0 = 0.0;  // (n_k - s) / (n_k - s - 2)
};

/// Per-cluster detection thresholds; requires n_k > s + 2 in every usable cluster.
std::vector<Thresholds> thresholds(const TrainedModel& model, double alpha);

// ---------------------------------------------------------------------------
// Normality screening (advisory only).
// ---------------------------------------------------------------------------

struct NormalityEntry {
    int cluster = 0;
    std::string sensor_id;
    double ks_stat = 0.0;
    bool pass = false;
    bool insufficient = false;  // n_k < 8
};

std::vector<NormalityEntry> normality_screen(const SensorPanel& panel,
                                             const TrainedModel& model,
                                             double level = 0.01);

/// One-sample Kolmogorov-Smirnov statistic against N(mean, sd).
double ks_statistic_normal(std::vector<double> sample, double mean, double sd);

/// Approximate KS critical value at the given level for sample size n.
double ks_critical(double level, std::size_t n);

}  // namespace sicams::train

#endif
