// Command-line front end: batch pipelines over sensor panels, network
// graphs, and trained models. Every invocation emits a JSON run report.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sicams/changepoint.hpp"
#include "sicams/detection.hpp"
#include "sicams/errors.hpp"
#include "sicams/graph.hpp"
#include "sicams/io.hpp"
#include "sicams/localization.hpp"
#include "sicams/lossreg.hpp"
#include "sicams/panel.hpp"
#include "sicams/statcore.hpp"
#include "sicams/synthgen.hpp"
#include "sicams/training.hpp"

namespace {

using nlohmann::json;
using namespace sicams;

constexpr const char* kVersion = "1.0.0";

void emit_report(json report, const std::string& command, const std::string& report_path) {
    report["tool"] = "sicams";
    report["version"] = kVersion;
    report["command"] = command;
    std::string text = report.dump(2) + "\n";
    if (report_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(report_path);
        if (!out) throw DataError("cannot write report '" + report_path + "'");
        out << text;
    }
}

struct PanelFlags {
    std::string panel, roles;
    bool forward_fill = false;
    int gap_limit = 3;

    void attach(CLI::App* cmd, bool required = true) {
        auto* p = cmd->add_option("--panel", panel, "wide CSV panel of sensor readings");
        if (required) p->required();
        cmd->add_option("--roles", roles, "sensor role sidecar CSV (sensor_id,role,node_id)");
        cmd->add_flag("--forward-fill", forward_fill, "fill short gaps instead of rejecting");
        cmd->add_option("--gap-limit", gap_limit, "max consecutive missing steps to fill");
    }

    SensorPanel load() const {
        return io::load_panel(panel, roles, {forward_fill, gap_limit});
    }
};

struct GraphFlags {
    std::string nodes, edges, bindings;

    void attach(CLI::App* cmd, bool required = true) {
        auto* n = cmd->add_option("--nodes", nodes, "node CSV (id,x,y)");
        auto* e = cmd->add_option("--edges", edges, "edge CSV (id,u,v,length_m)");
        if (required) {
            n->required();
            e->required();
        }
        cmd->add_option("--bindings", bindings, "sensor binding CSV (sensor_id,role,node_id)");
    }

    loc::NetworkGraph load() const { return io::load_graph(nodes, edges, bindings); }
};

train::TrainingStrategy parse_strategy(const std::string& name, double drop_fraction,
                                       const std::vector<std::string>& windows) {
    train::TrainingStrategy st;
    if (name == "unfiltered") {
        st.kind = train::StrategyKind::Unfiltered;
    } else if (name == "drop-lowest") {
        st.kind = train::StrategyKind::DropLowest;
        st.drop_fraction = drop_fraction;
    } else if (name == "clean-windows") {
        st.kind = train::StrategyKind::CleanWindows;
        if (windows.empty())
            throw UsageError("clean-windows strategy needs at least one --clean-window");
        for (const auto& w : windows) {
            auto comma = w.find(',');
            if (comma == std::string::npos)
                throw UsageError("--clean-window expects 'START,END', got '" + w + "'");
            st.windows.emplace_back(parse_iso8601(w.substr(0, comma)),
                                    parse_iso8601(w.substr(comma + 1)));
        }
    } else {
        throw UsageError("unknown training strategy '" + name + "'");
    }
    return st;
}

// Statistic column selector for changepoints / estimate-loss.
std::vector<double> pick_column(const detect::StatisticSeries& s, const std::string& column,
                                std::size_t& offset) {
    offset = 0;
    if (column == "t2") return s.t2;
    if (column == "t2f") return s.t2f;
    if (column == "wh") return s.wh;
    if (column == "ma") {
        while (offset < s.size() && !s.ma_defined[offset]) ++offset;
        return {s.ma.begin() + static_cast<long>(offset), s.ma.end()};
    }
    throw UsageError("unknown statistic column '" + column + "'");
}

int cmd_train(const PanelFlags& pf, const std::string& scheme_name,
              const std::string& strategy_name, double drop_fraction,
              const std::vector<std::string>& windows, bool allow_unusable,
              const std::string& out, const std::string& report_path) {
    SensorPanel panel = pf.load();
    auto scheme = train::parse_scheme(scheme_name);
    auto strategy = parse_strategy(strategy_name, drop_fraction, windows);
    train::TrainOptions opts;
    opts.allow_unusable_clusters = allow_unusable;
    auto model = train::train(panel, scheme, strategy, opts);
    io::save_model(model, out);

    json report;
    report["panel"] = pf.panel;
    report["model"] = out;
    report["scheme"] = scheme_name;
    report["strategy"] = strategy_name;
    report["sensors"] = model.sensor_ids.size();
    report["clusters"] = model.clusters.size();
    json sizes = json::array();
    int usable = 0;
    for (const auto& cm : model.clusters) {
        sizes.push_back(cm.usable ? cm.moments.n : 0);
        if (cm.usable) ++usable;
    }
    report["usable_clusters"] = usable;
    report["cluster_sizes"] = sizes;
    emit_report(report, "train", report_path);
    return 0;
}

int cmd_detect(const PanelFlags& pf, const std::string& model_path, double alpha, int window,
               bool serial, const std::string& out, const std::string& report_path) {
    SensorPanel panel = pf.load();
    auto model = io::load_model(model_path);
    auto series = serial ? detect::score_serial(model, panel, window)
                         : detect::score(model, panel, window);
    auto th = train::thresholds(model, alpha);
    auto status = detect::hysteresis(series, th);
    io::save_statistics(series, &status, out);

    json report;
    report["panel"] = pf.panel;
    report["model"] = model_path;
    report["statistics"] = out;
    report["alpha"] = alpha;
    report["window"] = window;
    json thj = json::array();
    for (std::size_t k = 0; k < th.size(); ++k)
        if (model.clusters[k].usable)
            thj.push_back({{"cluster", k}, {"theta1", th[k].theta1}, {"theta0", th[k].theta0}});
    report["thresholds"] = thj;
    long alarms = 0;
    for (int st : status.status) alarms += st;
    report["alarm_steps"] = alarms;
    report["alarm_fraction"] =
        series.size() ? static_cast<double>(alarms) / static_cast<double>(series.size()) : 0.0;
    emit_report(report, "detect", report_path);
    return 0;
}

int cmd_changepoints(const std::string& stats_path, const std::string& column, double penalty,
                     std::size_t min_seg, double alpha, const std::string& out,
                     const std::string& events_out, const std::string& report_path) {
    auto series = io::load_statistics(stats_path);
    std::size_t offset = 0;
    auto values = pick_column(series, column, offset);
    double pen = penalty > 0.0 ? penalty : cpd::default_penalty(values);
    auto seg = cpd::pelt(values, pen, min_seg);
    cpd::ClassifyOptions copts;
    copts.alpha = alpha;
    auto cls = cpd::classify(values, seg, copts);

    // Shift indices back onto the full series grid.
    for (auto& scp : cls.scps) scp.index += offset;
    for (auto& r : cls.removed) r += offset;
    io::save_scps(cls, series.timestamps, out);
    if (!events_out.empty())
        io::save_events(cpd::events_from_labels(cls.scps, series.timestamps), events_out);

    json report;
    report["statistics"] = stats_path;
    report["column"] = column;
    report["penalty"] = pen;
    report["min_seg"] = min_seg;
    report["scps"] = cls.scps.size();
    report["removed"] = cls.removed.size();
    report["segmentation_cost"] = seg.total_cost;
    report["out"] = out;
    emit_report(report, "changepoints", report_path);
    return 0;
}

int cmd_localize(const PanelFlags& pf, const std::string& model_path, const GraphFlags& gf,
                 const std::string& time_str, double radius, int suppress,
                 std::optional<double> truth_x, std::optional<double> truth_y,
                 const std::string& out, const std::string& report_path) {
    SensorPanel panel = pf.load();
    auto model = io::load_model(model_path);
    auto graph = gf.load();
    Timestamp t = parse_iso8601(time_str);
    std::size_t row = panel.steps();
    for (std::size_t i = 0; i < panel.steps(); ++i)
        if (panel.timestamps[i] == t) {
            row = i;
            break;
        }
    if (row == panel.steps())
        throw DataError("localize: timestamp " + time_str + " absent from panel '" + pf.panel +
                        "'");
    SensorPanel aligned = panel.reordered(model.sensor_ids);
    int cluster = train::assign_cluster(t, model.scheme);
    auto z = loc::z_field(aligned.row(row), model, cluster);

    std::map<std::string, double> fixed;
    for (std::size_t j = 0; j < z.sensor_ids.size(); ++j) fixed[z.sensor_ids[j]] = z.z2[j];
    auto field = loc::laplacian_interpolate(graph, fixed);
    io::save_field(field, graph, out);

    std::optional<std::pair<double, double>> truth;
    if (truth_x && truth_y) truth = {*truth_x, *truth_y};
    auto located = loc::locate(field, graph, truth, radius);

    json report;
    report["panel"] = pf.panel;
    report["model"] = model_path;
    report["time"] = time_str;
    report["cluster"] = cluster;
    report["field"] = out;
    report["top_node"] = graph.nodes[static_cast<std::size_t>(located.node)].id;
    report["top_value"] = field.value[static_cast<std::size_t>(located.node)];
    if (truth) {
        report["distance_m"] = located.distance;
        report["success"] = located.success;
    }
    if (suppress > 1) {
        auto cands = loc::iterative_suppress(graph, fixed, suppress, radius);
        json cj = json::array();
        for (const auto& c : cands) {
            json e;
            e["node"] = c.exhausted ? "" : graph.nodes[static_cast<std::size_t>(c.node)].id;
            e["peak"] = c.peak;
            e["exhausted"] = c.exhausted;
            cj.push_back(e);
        }
        report["candidates"] = cj;
    }
    emit_report(report, "localize", report_path);
    return 0;
}

int cmd_discriminate(const PanelFlags& pf, const std::string& model_path, const GraphFlags& gf,
                     const std::string& time_str, double band_alpha, double concentration,
                     double coherence, double neighbor_radius,
                     const std::string& report_path) {
    SensorPanel panel = pf.load();
    auto model = io::load_model(model_path);
    auto graph = gf.load();
    Timestamp t = parse_iso8601(time_str);
    std::size_t row = panel.steps();
    for (std::size_t i = 0; i < panel.steps(); ++i)
        if (panel.timestamps[i] == t) {
            row = i;
            break;
        }
    if (row == panel.steps())
        throw DataError("discriminate: timestamp " + time_str + " absent from panel '" +
                        pf.panel + "'");
    SensorPanel aligned = panel.reordered(model.sensor_ids);
    int cluster = train::assign_cluster(t, model.scheme);
    auto z = loc::z_field(aligned.row(row), model, cluster);

    // Two-sided z-score band at the requested level.
    double zc = std::sqrt(stat::chi2_quantile(1.0 - band_alpha, 1));
    std::map<std::string, std::pair<double, double>> bands;
    for (const auto& id : z.sensor_ids) bands[id] = {-zc, zc};

    loc::DiscriminateOptions dopts;
    dopts.concentration = concentration;
    dopts.coherence_fraction = coherence;
    dopts.neighbor_radius = neighbor_radius;
    auto verdict = loc::discriminate(z, bands, graph, dopts);

    json report;
    report["panel"] = pf.panel;
    report["time"] = time_str;
    report["cluster"] = cluster;
    report["band_alpha"] = band_alpha;
    report["band_halfwidth"] = zc;
    report["verdict"] = loc::verdict_name(verdict);
    auto shares = loc::share_profile(z);
    json sj = json::array();
    for (std::size_t j = 0; j < shares.size(); ++j)
        sj.push_back({{"sensor", z.sensor_ids[j]}, {"z", z.z[j]}, {"share", shares[j]}});
    report["shares"] = sj;
    emit_report(report, "discriminate", report_path);
    return 0;
}

// Loss-model JSON (form, coefficients, window) persisted between fit and predict.
void save_loss_model(const loss::LossModel& m, const std::string& path) {
    json j;
    j["form"] = m.fit.form == stat::RegressionForm::Linear ? "linear" : "loglinear";
    j["intercept"] = m.fit.coefficients(0);
    j["slope"] = m.fit.coefficients(1);
    j["intercept_se"] = m.fit.std_errors(0);
    j["slope_se"] = m.fit.std_errors(1);
    j["r_squared"] = m.fit.r_squared;
    j["window"] = m.window;
    std::ofstream out(path);
    if (!out) throw DataError("cannot write loss model '" + path + "'");
    out << j.dump(2) << "\n";
}

loss::LossModel load_loss_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open loss model '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError("loss model '" + path + "': " + e.what());
    }
    loss::LossModel m;
    m.fit.form = j.at("form").get<std::string>() == "loglinear" ? stat::RegressionForm::LogLinear
                                                                : stat::RegressionForm::Linear;
    m.fit.coefficients.resize(2);
    m.fit.coefficients << j.at("intercept").get<double>(), j.at("slope").get<double>();
    m.fit.std_errors = stat::Vec::Zero(2);
    m.fit.r_squared = j.value("r_squared", 0.0);
    m.window = j.value("window", 12);
    return m;
}

int cmd_estimate_loss(const std::string& stats_path, const std::string& column,
                      const std::string& actual_path, const std::string& form_name, int window,
                      const std::string& loss_model_path, const std::string& out,
                      const std::string& report_path) {
    auto series = io::load_statistics(stats_path);
    std::size_t offset = 0;
    auto f = pick_column(series, column, offset);
    std::vector<Timestamp> grid(series.timestamps.begin() + static_cast<long>(offset),
                                series.timestamps.end());

    json report;
    report["statistics"] = stats_path;
    report["column"] = column;

    loss::LossModel model;
    if (!actual_path.empty()) {
        // Fit mode: align actual volumes (timestamp,volume CSV) to the grid.
        std::map<Timestamp, double> by_time;
        std::ifstream in(actual_path);
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            auto c = io::split_csv_line(line);
            if (c.size() >= 2) by_time[parse_iso8601(c[0])] = std::stod(c[1]);
        }
        std::vector<double> ff, ll;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            auto it = by_time.find(grid[i]);
            if (it != by_time.end()) {
                ff.push_back(f[i]);
                ll.push_back(it->second);
            }
        }
        auto form = form_name == "loglinear" ? stat::RegressionForm::LogLinear
                                             : stat::RegressionForm::Linear;
        model = loss::fit_loss(ff, ll, form, window);
        if (!loss_model_path.empty()) save_loss_model(model, loss_model_path);
        report["fitted"] = true;
        report["observations"] = ff.size();
        report["form"] = form_name;
        report["intercept"] = model.fit.coefficients(0);
        report["slope"] = model.fit.coefficients(1);
        report["intercept_se"] = model.fit.std_errors(0);
        report["slope_se"] = model.fit.std_errors(1);
        report["r_squared"] = model.fit.r_squared;
    } else {
        if (loss_model_path.empty())
            throw UsageError("estimate-loss needs either --actual (fit) or --loss-model "
                             "(predict)");
        model = load_loss_model(loss_model_path);
        report["fitted"] = false;
    }

    if (!out.empty()) {
        std::vector<double> pred;
        pred.reserve(f.size());
        for (double v : f) pred.push_back(loss::predict_loss(model, v));
        io::save_loss(grid, f, pred, nullptr, out);
        double total = 0.0;
        for (double p : pred) total += p;
        report["out"] = out;
        report["total_predicted"] = total;
    }
    emit_report(report, "estimate-loss", report_path);
    return 0;
}

int cmd_simulate(const std::string& scenario_path, std::uint64_t seed, std::size_t horizon,
                 const std::string& prefix, const std::string& report_path) {
    auto scenario = synth::scenario_from_json_file(scenario_path);
    auto gen = synth::generate(scenario, seed, horizon);
    io::save_panel(gen.panel, prefix + "_panel.csv", prefix + "_roles.csv");
    io::save_graph(gen.graph, prefix + "_nodes.csv", prefix + "_edges.csv");
    io::save_events(gen.truth.events, prefix + "_events.csv");
    io::save_counts(gen.truth.counts, prefix + "_counts.csv");

    json report;
    report["scenario"] = scenario_path;
    report["seed"] = seed;
    report["horizon"] = horizon;
    report["sensors"] = gen.panel.dim();
    report["nodes"] = gen.graph.nodes.size();
    report["events"] = gen.truth.events.size();
    report["panel"] = prefix + "_panel.csv";
    emit_report(report, "simulate", report_path);
    return 0;
}

int cmd_evaluate(const std::string& detections_path, const std::string& truth_path,
                 const GraphFlags& gf, double radius, const std::string& true_counts_path,
                 const std::string& est_counts_path, const std::string& report_path) {
    auto graph = gf.load();
    auto truth = io::load_events(truth_path);

    std::vector<detect::Detection> dets;
    {
        std::ifstream in(detections_path);
        if (!in) throw DataError("cannot open '" + detections_path + "'");
        std::string line;
        std::getline(in, line);  // header: time,node
        int lineno = 1;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            auto c = io::split_csv_line(line);
            if (c.size() < 2)
                throw DataError(detections_path + ":" + std::to_string(lineno) +
                                ": expected time,node");
            dets.push_back({parse_iso8601(c[0]), c[1]});
        }
    }

    auto res = detect::confusion_eval(dets, truth, radius, graph);
    json report;
    report["detections"] = detections_path;
    report["truth"] = truth_path;
    report["radius_m"] = radius;
    report["tp"] = res.tp;
    report["fp"] = res.fp;
    report["fn"] = res.fn;
    report["tp_rate"] = res.tp_rate;
    report["delays_hours"] = res.delays_hours;
    if (!true_counts_path.empty() && !est_counts_path.empty()) {
        auto tc = io::load_counts(true_counts_path);
        auto ec = io::load_counts(est_counts_path);
        report["leak_hours"] = detect::leak_hours(tc, ec);
    }
    emit_report(report, "evaluate", report_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Networked-sensor anomaly detection, classification, and localization"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string report_path;
    app.add_option("--report", report_path, "write the JSON run report here (default: stdout)")
        ->configurable(false);

    // --- train ---
    auto* train_cmd = app.add_subcommand("train", "estimate per-cluster baseline models");
    PanelFlags train_pf;
    train_pf.attach(train_cmd);
    std::string train_scheme = "hour-of-day", train_strategy = "unfiltered", train_out;
    double train_drop = 0.1;
    std::vector<std::string> train_windows;
    bool train_allow_unusable = false;
    train_cmd->add_option("--scheme", train_scheme,
                          "hour-of-day | two-hour-block | weekday-weekend-hour");
    train_cmd->add_option("--strategy", train_strategy,
                          "unfiltered | drop-lowest | clean-windows");
    train_cmd->add_option("--drop-fraction", train_drop, "drop-lowest fraction in [0, 0.5]");
    train_cmd->add_option("--clean-window", train_windows, "inclusive 'START,END' interval");
    train_cmd->add_flag("--allow-unusable", train_allow_unusable,
                        "tolerate clusters with too little data");
    train_cmd->add_option("--out", train_out, "model JSON output path")->required();

    // --- detect ---
    auto* detect_cmd = app.add_subcommand("detect", "score a panel against a trained model");
    PanelFlags detect_pf;
    detect_pf.attach(detect_cmd);
    std::string detect_model, detect_out;
    double detect_alpha = 0.05;
    int detect_window = 12;
    bool detect_serial = false;
    detect_cmd->add_option("--model", detect_model, "trained model JSON")->required();
    detect_cmd->add_option("--alpha", detect_alpha, "significance level");
    detect_cmd->add_option("--window", detect_window, "moving-average window");
    detect_cmd->add_flag("--serial", detect_serial, "use the single-threaded kernel");
    detect_cmd->add_option("--out", detect_out, "statistics CSV output path")->required();

    // --- changepoints ---
    auto* cp_cmd = app.add_subcommand("changepoints", "segment and label a statistic series");
    std::string cp_stats, cp_column = "ma", cp_out, cp_events_out;
    double cp_penalty = 0.0, cp_alpha = 0.05;
    std::size_t cp_min_seg = 6;
    cp_cmd->add_option("--stats", cp_stats, "statistics CSV from detect")->required();
    cp_cmd->add_option("--column", cp_column, "t2 | t2f | ma | wh");
    cp_cmd->add_option("--penalty", cp_penalty, "segmentation penalty (<= 0: automatic)");
    cp_cmd->add_option("--min-seg", cp_min_seg, "minimum segment length");
    cp_cmd->add_option("--alpha", cp_alpha, "mean-test significance level");
    cp_cmd->add_option("--out", cp_out, "SCP CSV output path")->required();
    cp_cmd->add_option("--events-out", cp_events_out, "paired event CSV output path");

    // --- localize ---
    auto* loc_cmd = app.add_subcommand("localize", "interpolate deviations over the network");
    PanelFlags loc_pf;
    loc_pf.attach(loc_cmd);
    GraphFlags loc_gf;
    loc_gf.attach(loc_cmd);
    std::string loc_model, loc_time, loc_out;
    double loc_radius = 300.0;
    int loc_suppress = 1;
    std::optional<double> loc_tx, loc_ty;
    double loc_tx_val = 0.0, loc_ty_val = 0.0;
    loc_cmd->add_option("--model", loc_model, "trained model JSON")->required();
    loc_cmd->add_option("--time", loc_time, "ISO-8601 timestamp to localize")->required();
    loc_cmd->add_option("--radius", loc_radius, "matching / suppression radius, meters");
    loc_cmd->add_option("--suppress", loc_suppress, "iterative-suppression rounds");
    auto* txo = loc_cmd->add_option("--truth-x", loc_tx_val, "true event x, meters");
    auto* tyo = loc_cmd->add_option("--truth-y", loc_ty_val, "true event y, meters");
    loc_cmd->add_option("--out", loc_out, "node field CSV output path")->required();

    // --- discriminate ---
    auto* disc_cmd = app.add_subcommand("discriminate", "leak vs sensor-bias verdict");
    PanelFlags disc_pf;
    disc_pf.attach(disc_cmd);
    GraphFlags disc_gf;
    disc_gf.attach(disc_cmd);
    std::string disc_model, disc_time;
    double disc_band_alpha = 0.01, disc_conc = 0.9, disc_coh = 0.25, disc_nr = 300.0;
    disc_cmd->add_option("--model", disc_model, "trained model JSON")->required();
    disc_cmd->add_option("--time", disc_time, "ISO-8601 timestamp to examine")->required();
    disc_cmd->add_option("--band-alpha", disc_band_alpha, "per-sensor band level");
    disc_cmd->add_option("--concentration", disc_conc, "bias share threshold");
    disc_cmd->add_option("--coherence", disc_coh, "leak neighbor-share fraction");
    disc_cmd->add_option("--neighbor-radius", disc_nr, "graph meters defining neighbors");

    // --- estimate-loss ---
    auto* loss_cmd = app.add_subcommand("estimate-loss", "fit or apply the loss regression");
    std::string loss_stats, loss_column = "ma", loss_actual, loss_form = "linear",
                loss_model_path, loss_out;
    int loss_window = 12;
    loss_cmd->add_option("--stats", loss_stats, "statistics CSV from detect")->required();
    loss_cmd->add_option("--column", loss_column, "t2 | t2f | ma | wh");
    loss_cmd->add_option("--actual", loss_actual, "timestamp,volume CSV for fitting");
    loss_cmd->add_option("--form", loss_form, "linear | loglinear");
    loss_cmd->add_option("--window", loss_window, "moving-average window for bookkeeping");
    loss_cmd->add_option("--loss-model", loss_model_path,
                         "loss-model JSON (written when fitting, read when predicting)");
    loss_cmd->add_option("--out", loss_out, "prediction CSV output path");

    // --- simulate ---
    auto* sim_cmd = app.add_subcommand("simulate", "generate a synthetic scenario");
    std::string sim_scenario, sim_prefix;
    std::uint64_t sim_seed = 1;
    std::size_t sim_horizon = 24 * 28;
    sim_cmd->add_option("--scenario", sim_scenario, "scenario JSON")->required();
    sim_cmd->add_option("--seed", sim_seed, "RNG seed (sole source of randomness)");
    sim_cmd->add_option("--horizon", sim_horizon, "number of time steps");
    sim_cmd->add_option("--out-prefix", sim_prefix, "output path prefix")->required();

    // --- evaluate ---
    auto* eval_cmd = app.add_subcommand("evaluate", "score detections against ground truth");
    GraphFlags eval_gf;
    eval_gf.attach(eval_cmd);
    std::string eval_dets, eval_truth, eval_tc, eval_ec;
    double eval_radius = 300.0;
    eval_cmd->add_option("--detections", eval_dets, "detections CSV (time,node)")->required();
    eval_cmd->add_option("--truth", eval_truth, "ground-truth event CSV")->required();
    eval_cmd->add_option("--radius", eval_radius, "matching radius, meters");
    eval_cmd->add_option("--true-counts", eval_tc, "true leak-count CSV");
    eval_cmd->add_option("--est-counts", eval_ec, "estimated leak-count CSV");

    try {
        app.parse(argc, argv);
        if (txo->count()) loc_tx = loc_tx_val;
        if (tyo->count()) loc_ty = loc_ty_val;

        if (train_cmd->parsed())
            return cmd_train(train_pf, train_scheme, train_strategy, train_drop, train_windows,
                             train_allow_unusable, train_out, report_path);
        if (detect_cmd->parsed())
            return cmd_detect(detect_pf, detect_model, detect_alpha, detect_window,
                              detect_serial, detect_out, report_path);
        if (cp_cmd->parsed())
            return cmd_changepoints(cp_stats, cp_column, cp_penalty, cp_min_seg, cp_alpha,
                                    cp_out, cp_events_out, report_path);
        if (loc_cmd->parsed())
            return cmd_localize(loc_pf, loc_model, loc_gf, loc_time, loc_radius, loc_suppress,
                                loc_tx, loc_ty, loc_out, report_path);
        if (disc_cmd->parsed())
            return cmd_discriminate(disc_pf, disc_model, disc_gf, disc_time, disc_band_alpha,
                                    disc_conc, disc_coh, disc_nr, report_path);
        if (loss_cmd->parsed())
            return cmd_estimate_loss(loss_stats, loss_column, loss_actual, loss_form,
                                     loss_window, loss_model_path, loss_out, report_path);
        if (sim_cmd->parsed())
            return cmd_simulate(sim_scenario, sim_seed, sim_horizon, sim_prefix, report_path);
        if (eval_cmd->parsed())
            return cmd_evaluate(eval_dets, eval_truth, eval_gf, eval_radius, eval_tc, eval_ec,
                                report_path);
        return 1;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
