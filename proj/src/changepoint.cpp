#include "sicams/changepoint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sicams/errors.hpp"
#include "sicams/statcore.hpp"

namespace sicams::cpd {

double segment_cost(const std::vector<double>& prefix, const std::vector<double>& prefix_sq,
                    std::size_t a, std::size_t b) {
    const double n = static_cast<double>(b - a);
    const double s = prefix[b] - prefix[a];
    const double s2 = prefix_sq[b] - prefix_sq[a];
    return s2 - s * s / n;
}

namespace {

struct Prefixes {
    std::vector<double> sum, sum_sq;
};

Prefixes make_prefixes(const std::vector<double>& series) {
    Prefixes p;
    p.sum.assign(series.size() + 1, 0.0);
    p.sum_sq.assign(series.size() + 1, 0.0);
    for (std::size_t i = 0; i < series.size(); ++i) {
        p.sum[i + 1] = p.sum[i] + series[i];
        p.sum_sq[i + 1] = p.sum_sq[i] + series[i] * series[i];
    }
    return p;
}

// Reconstructs the SCP list and recomputes the total cost from the segments,
// so pelt and the exhaustive DP report bit-identical costs.
Segmentation finish(const std::vector<std::size_t>& back, const Prefixes& p, double penalty,
                    std::size_t min_seg, std::size_t t_end) {
    Segmentation seg;
    seg.penalty = penalty;
    seg.min_seg = min_seg;
    std::size_t t = t_end;
    while (t > 0) {
        std::size_t tau = back[t];
        if (tau > 0) seg.scps.push_back(tau);
        t = tau;
    }
    std::reverse(seg.scps.begin(), seg.scps.end());
    std::size_t prev = 0;
    for (std::size_t scp : seg.scps) {
        seg.total_cost += segment_cost(p.sum, p.sum_sq, prev, scp) + penalty;
        prev = scp;
    }
    seg.total_cost += segment_cost(p.sum, p.sum_sq, prev, t_end);
    return seg;
}

template <bool Prune>
Segmentation run_dp(const std::vector<double>& series, double penalty, std::size_t min_seg) {
    const std::size_t n = series.size();
    if (min_seg < 1) throw UsageError("pelt: min_seg must be >= 1");
    if (n < 2 * min_seg)
        throw UsageError("pelt: series too short (need at least 2 * min_seg = " +
                         std::to_string(2 * min_seg) + " points, got " + std::to_string(n) + ")");
    if (!(penalty > 0.0)) throw UsageError("pelt: penalty must be positive");

    Prefixes p = make_prefixes(series);
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> f(n + 1, inf);
    std::vector<std::size_t> ncp(n + 1, 0);
    std::vector<std::size_t> back(n + 1, 0);
    f[0] = -penalty;

    std::vector<std::size_t> cands{0};
    for (std::size_t t = min_seg; t <= n; ++t) {
        double best = inf;
        std::size_t best_tau = 0, best_ncp = 0;
        for (std::size_t tau : cands) {
            if (t - tau < min_seg) continue;
            double c = f[tau] + segment_cost(p.sum, p.sum_sq, tau, t) + penalty;
            std::size_t k = ncp[tau] + (tau > 0 ? 1 : 0);
            // Ties: fewer change points, then earliest last change index.
            bool better = c < best || (c == best && (k < best_ncp ||
                                                     (k == best_ncp && tau < best_tau)));
            if (better) {
                best = c;
                best_tau = tau;
                best_ncp = k;
            }
        }
        f[t] = best;
        back[t] = best_tau;
        ncp[t] = best_ncp;

        if constexpr (Prune) {
            std::vector<std::size_t> kept;
            kept.reserve(cands.size() + 1);
            for (std::size_t tau : cands) {
                if (t - tau < min_seg ||
                    f[tau] + segment_cost(p.sum, p.sum_sq, tau, t) <= f[t])
                    kept.push_back(tau);
            }
            cands = std::move(kept);
        }
        // t becomes a candidate once a segment of min length can follow it.
        if (t + min_seg <= n) cands.push_back(t);
    }
    return finish(back, p, penalty, min_seg, n);
}

}  // namespace

Segmentation pelt(const std::vector<double>& series, double penalty, std::size_t min_seg) {
    return run_dp<true>(series, penalty, min_seg);
}

Segmentation optimal_partition_dp(const std::vector<double>& series, double penalty,
                                  std::size_t min_seg) {
    return run_dp<false>(series, penalty, min_seg);
}

double default_penalty(const std::vector<double>& series) {
    if (series.size() < 3) return 1.0;
    std::vector<double> d(series.size() - 1);
    for (std::size_t i = 0; i + 1 < series.size(); ++i) d[i] = series[i + 1] - series[i];
    std::vector<double> tmp = d;
    auto median = [](std::vector<double>& v) {
        std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
        return v[v.size() / 2];
    };
    double med = median(tmp);
    tmp.clear();
    for (double x : d) tmp.push_back(std::fabs(x - med));
    double mad = median(tmp);
    double sigma = 1.4826 * mad / std::sqrt(2.0);  // first differences double the variance
    sigma = std::max(sigma, 1e-12);
    return 2.0 * sigma * sigma * std::log(static_cast<double>(series.size()));
}

namespace {

// OLS slope and its standard error on series[a, b) against the step index.
std::pair<double, double> interval_slope(const std::vector<double>& series, std::size_t a,
                                         std::size_t b) {
    std::vector<double> x, y;
    x.reserve(b - a);
    y.reserve(b - a);
    for (std::size_t i = a; i < b; ++i) {
        x.push_back(static_cast<double>(i - a));
        y.push_back(series[i]);
    }
    if (x.size() < 3) return {0.0, 0.0};
    try {
        auto fit = stat::ols_fit(x, y);
        return {fit.coefficients(1), fit.std_errors(1)};
    } catch (const NumericalError&) {
        return {0.0, 0.0};
    }
}

std::vector<double> slice(const std::vector<double>& s, std::size_t a, std::size_t b) {
    return {s.begin() + static_cast<std::ptrdiff_t>(a),
            s.begin() + static_cast<std::ptrdiff_t>(b)};
}

}  // namespace

Classification classify(const std::vector<double>& series, const Segmentation& seg,
                        const ClassifyOptions& opts) {
    const std::size_t n = series.size();
    std::vector<std::size_t> bounds{0};
    for (std::size_t scp : seg.scps) {
        if (scp == 0 || scp >= n) throw DataError("classify: SCP index out of range");
        bounds.push_back(scp);
    }
    bounds.push_back(n);

    Classification out;
    // Interval labels first.
    for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
        IntervalLabel lab;
        lab.begin = bounds[i];
        lab.end = bounds[i + 1];
        std::tie(lab.slope, lab.slope_se) = interval_slope(series, lab.begin, lab.end);
        std::size_t len = lab.end - lab.begin;
        if (len < 4) {
            log_warning("classify: interval [" + std::to_string(lab.begin) + ", " +
                        std::to_string(lab.end) + ") too short to test; labeled stable");
            lab.kind = IntervalKind::Stable;
        } else {
            std::size_t mid = lab.begin + len / 2;
            auto h1 = slice(series, lab.begin, mid);
            auto h2 = slice(series, mid, lab.end);
            double p = stat::mean_diff_test(h1, h2);
            double m1 = std::accumulate(h1.begin(), h1.end(), 0.0) / h1.size();
            double m2 = std::accumulate(h2.begin(), h2.end(), 0.0) / h2.size();
            lab.kind = (p < opts.alpha && m2 > m1) ? IntervalKind::Increasing
                                                   : IntervalKind::Stable;
        }
        out.intervals.push_back(lab);
    }

    // SCP labeling and redundant-SCP removal, left to right.
    for (std::size_t i = 0; i < seg.scps.size(); ++i) {
        const IntervalLabel& ia = out.intervals[i];
        const IntervalLabel& ib = out.intervals[i + 1];
        std::size_t scp = seg.scps[i];

        if (ia.kind == IntervalKind::Increasing && ib.kind == IntervalKind::Increasing) {
            bool similar;
            if (opts.slope_mode == SlopeMode::RawDelta) {
                similar = std::fabs(ia.slope - ib.slope) < opts.delta;
            } else {
                double se = std::sqrt(ia.slope_se * ia.slope_se + ib.slope_se * ib.slope_se);
                if (se <= 0.0) {
                    similar = ia.slope == ib.slope;
                } else {
                    double t = (ia.slope - ib.slope) / se;
                    // Conservative normal reference for the slope contrast.
                    double p = 2.0 * (1.0 - stat::t_cdf(std::fabs(t), 1e6));
                    similar = p >= opts.alpha;
                }
            }
            if (similar) {
                out.removed.push_back(scp);
                continue;
            }
        }

        auto a = slice(series, ia.begin, ia.end);
        auto b = slice(series, ib.begin, ib.end);
        if (a.size() < 2 || b.size() < 2) continue;
        double p = stat::mean_diff_test(a, b);
        if (p < opts.alpha) {
            double ma = std::accumulate(a.begin(), a.end(), 0.0) / a.size();
            double mb = std::accumulate(b.begin(), b.end(), 0.0) / b.size();
            out.scps.push_back(
                {scp, mb > ma ? ScpLabel::AnomalyStart : ScpLabel::AnomalyEnd, p});
        }
    }
    return out;
}

std::vector<EventRecord> events_from_labels(const std::vector<LabeledSCP>& labeled,
                                            const std::vector<Timestamp>& grid) {
    std::vector<EventRecord> events;
    std::vector<std::size_t> open;  // indices into events with no end yet (FIFO)
    auto at = [&grid](std::size_t idx) -> Timestamp {
        return idx < grid.size() ? grid[idx] : (grid.empty() ? 0 : grid.back());
    };
    for (const auto& scp : labeled) {
        if (scp.label == ScpLabel::AnomalyStart) {
            EventRecord ev;
            ev.id = "scp" + std::to_string(scp.index);
            ev.start = at(scp.index);
            open.push_back(events.size());
            events.push_back(ev);
        } else {
            if (open.empty()) {
                log_warning("events_from_labels: anomaly-end at index " +
                            std::to_string(scp.index) + " without a matching start");
                continue;
            }
            events[open.front()].end = at(scp.index);
            open.erase(open.begin());
        }
    }
    return events;
}

}  // namespace sicams::cpd
