#ifndef SICAMS_CHANGEPOINT_HPP
#define SICAMS_CHANGEPOINT_HPP

#include <optional>
#include <string>
#include <vector>

#include "sicams/events.hpp"
#include "sicams/panel.hpp"

namespace sicams::cpd {

struct Segmentation {
    std::vector<std::size_t> scps;  // strictly increasing change indices in (0, T)
    double penalty = 0.0;
    double total_cost = 0.0;  // sum of segment costs + penalty * #SCPs
    std::size_t min_seg = 6;
};

/// Within-segment sum of squared deviations from the segment mean over
/// series[a, b).
double segment_cost(const std::vector<double>& prefix, const std::vector<double>& prefix_sq,
                    std::size_t a, std::size_t b);

/// Penalized exact segmentation (mean-shift Gaussian cost) with linear-time
/// pruning. Ties broken toward fewer change points, then earliest indices.
Segmentation pelt(const std::vector<double>& series, double penalty, std::size_t min_seg = 6);

/// Exhaustive O(T^2) dynamic program with the same cost and tie-break;
/// reference oracle for pelt.
Segmentation optimal_partition_dp(const std::vector<double>& series, double penalty,
                                  std::size_t min_seg = 6);

/// BIC-like default penalty 2 * sigma^2 * ln T with sigma from the scaled
/// median absolute deviation of first differences.
double default_penalty(const std::vector<double>& series);

enum class ScpLabel { AnomalyStart, AnomalyEnd };
enum class IntervalKind { Stable, Increasing };

struct LabeledSCP {
    std::size_t index = 0;
    ScpLabel label = ScpLabel::AnomalyStart;
    double p_value = 1.0;
};

struct IntervalLabel {
    std::size_t begin = 0;  // [begin, end)
    std::size_t end = 0;
    IntervalKind kind = IntervalKind::Stable;
    double slope = 0.0;        // statistic units per step
    double slope_se = 0.0;
};

enum class SlopeMode {
    TStatistic,  // slopes similar when their difference is not significant
    RawDelta,    // slopes similar when |m_a - m_b| < delta
};

struct ClassifyOptions {
    double alpha = 0.05;
    SlopeMode slope_mode = SlopeMode::TStatistic;
    double delta = 0.0;  // RawDelta threshold
};

struct Classification {
    std::vector<LabeledSCP> scps;          // significant SCPs, redundant ones removed
    std::vector<IntervalLabel> intervals;  // tiles the series between SCPs
    std::vector<std::size_t> removed;      // redundant SCP indices
};

/// Labels inter-SCP intervals stable/increasing (bisect + mean test),
/// classifies SCPs by mean-change direction, and removes an SCP separating
/// two increasing intervals whose regression slopes are similar, in one
/// left-to-right pass. Intervals shorter than 4 points skip testing.
Classification classify(const std::vector<double>& series, const Segmentation& seg,
                        const ClassifyOptions& opts = {});

/// Pairs anomaly-start labels with subsequent anomaly-end labels (FIFO);
/// unpaired starts yield open-ended events.
std::vector<EventRecord> events_from_labels(const std::vector<LabeledSCP>& labeled,
                                            const std::vector<Timestamp>& grid);

}  // namespace sicams::cpd

#endif
