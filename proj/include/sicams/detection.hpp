#ifndef SICAMS_DETECTION_HPP
#define SICAMS_DETECTION_HPP

#include <vector>

#include "sicams/events.hpp"
#include "sicams/graph.hpp"
#include "sicams/panel.hpp"
#include "sicams/training.hpp"

namespace sicams::detect {

struct StatisticSeries {
    std::vector<Timestamp> timestamps;
    std::vector<int> clusters;
    std::vector<double> t2;
    std::vector<double> t2f;
    std::vector<double> ma;        // trailing mean of t2f over window L
    std::vector<bool> ma_defined;  // false for the first L-1 steps
    std::vector<double> wh;        // Wilson-Hilferty of t2 with df s
    int window = 1;

    std::size_t size() const { return timestamps.size(); }
};

/// Per-step scoring: cluster lookup, whiten, T^2, T^2_F with that cluster's
/// n_k, trailing mean over the most recent L values. Panel columns are
/// matched to the model by sensor name, not position.
StatisticSeries score(const train::TrainedModel& model, const SensorPanel& panel, int window);

/// Single-threaded reference used to validate the parallel kernel.
StatisticSeries score_serial(const train::TrainedModel& model, const SensorPanel& panel,
                             int window);

struct StatusSeries {
    std::vector<Timestamp> timestamps;
    std::vector<int> status;  // 0 normal, 1 anomalous
};

/// Two-threshold hysteresis over the moving average: raise when ma > theta1,
/// clear when ma < theta0; steps with undefined ma keep the prior status.
StatusSeries hysteresis(const StatisticSeries& series, double theta1, double theta0,
                        int initial = 0);

/// Per-cluster variant: each step compares against its own cluster's thresholds.
StatusSeries hysteresis(const StatisticSeries& series,
                        const std::vector<train::Thresholds>& per_cluster, int initial = 0);

/// Steps from anomaly onset tau to the first flagged step at or after tau;
/// nullopt when never detected.
std::optional<long> detection_delay(const StatusSeries& status, Timestamp tau);

struct LeakCountSeries {
    std::vector<Timestamp> timestamps;
    std::vector<int> count;
};

/// Active-leak count on a time grid: +1 at each event start, -1 at each end,
/// clamped at zero with a warning.
LeakCountSeries leak_count_from_events(const std::vector<EventRecord>& events,
                                       const std::vector<Timestamp>& grid);

/// Integral of |N_t - Nhat_t| dt in hours (rectangle rule on the shared grid).
double leak_hours(const LeakCountSeries& true_counts, const LeakCountSeries& est_counts);

struct Detection {
    Timestamp time = 0;
    std::string location;  // node id resolvable through the graph
};

struct ConfusionResult {
    double tp_rate = 0.0;
    int tp = 0;
    int fp = 0;
    int fn = 0;
    std::vector<double> delays_hours;  // per matched truth event
};

/// A detection matches a truth event when its time falls inside the event's
/// active interval and its node lies within `radius` meters (Euclidean) of
/// the event location; greedy one-to-one matching in time order.
ConfusionResult confusion_eval(const std::vector<Detection>& detections,
                               const std::vector<EventRecord>& truth, double radius,
                               const loc::NetworkGraph& graph);

/// Probability of at least one false alarm among s independent tests.
double fa_combination(double p, int s);
/// Inverse: per-test level achieving a given combined false-alarm rate.
double fa_combination_inverse(double p_fa, int s);
/// Bonferroni-corrected per-test level p_fa / s.
double bonferroni(double p_fa, int s);

}  // namespace sicams::detect

#endif
