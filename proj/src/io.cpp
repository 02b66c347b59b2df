#include "sicams/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sicams/errors.hpp"

namespace sicams::io {

using nlohmann::json;

namespace {

constexpr int kModelVersion = 1;

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& s, const std::string& where) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw DataError(where + ": cannot parse number '" + s + "'");
    }
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    return out;
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

SensorPanel load_panel(const std::string& panel_path, const std::string& roles_path,
                       const PanelLoadOptions& opts) {
    auto in = open_in(panel_path);
    std::string line;
    if (!std::getline(in, line)) throw DataError(panel_path + ": empty file");
    auto header = split_csv_line(line);
    if (header.size() < 2 || header[0] != "timestamp")
        throw DataError(panel_path + ": header must start with 'timestamp'");

    SensorPanel panel;
    for (std::size_t j = 1; j < header.size(); ++j) {
        for (std::size_t k = 1; k < j; ++k)
            if (header[k] == header[j])
                throw DataError(panel_path + ": duplicate sensor id '" + header[j] + "'");
        panel.sensors.push_back({header[j], SensorRole::Pressure, ""});
    }

    std::vector<std::vector<double>> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw DataError(panel_path + ":" + std::to_string(lineno) + ": expected " +
                            std::to_string(header.size()) + " columns, got " +
                            std::to_string(cells.size()));
        panel.timestamps.push_back(parse_iso8601(cells[0]));
        std::vector<double> row;
        for (std::size_t j = 1; j < cells.size(); ++j) {
            if (cells[j].empty())
                row.push_back(std::numeric_limits<double>::quiet_NaN());
            else
                row.push_back(parse_double(cells[j], panel_path + ":" + std::to_string(lineno)));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DataError(panel_path + ": no data rows");

    // Fixed-step grid with gap policy.
    if (panel.timestamps.size() > 1) {
        Timestamp step = panel.timestamps[1] - panel.timestamps[0];
        if (step <= 0) throw DataError(panel_path + ": timestamps must strictly increase");
        std::vector<Timestamp> ts;
        std::vector<std::vector<double>> filled;
        ts.push_back(panel.timestamps[0]);
        filled.push_back(rows[0]);
        for (std::size_t i = 1; i < panel.timestamps.size(); ++i) {
            Timestamp gap = panel.timestamps[i] - panel.timestamps[i - 1];
            if (gap <= 0) throw DataError(panel_path + ": timestamps must strictly increase");
            if (gap % step != 0)
                throw DataError(panel_path + ": timestamp " +
                                format_iso8601(panel.timestamps[i]) + " is off the fixed grid");
            long missing = gap / step - 1;
            if (missing > 0) {
                if (!opts.forward_fill || missing > opts.gap_limit)
                    throw DataError(panel_path + ": gap of " + std::to_string(missing + 1) +
                                    " steps before " + format_iso8601(panel.timestamps[i]) +
                                    " exceeds the gap limit of " +
                                    std::to_string(opts.gap_limit));
                for (long m = 1; m <= missing; ++m) {
                    ts.push_back(ts.back() + step);
                    filled.push_back(filled.back());  // forward fill
                }
            }
            ts.push_back(panel.timestamps[i]);
            filled.push_back(rows[i]);
        }
        panel.timestamps = std::move(ts);
        rows = std::move(filled);
    }

    // Empty cells follow the same policy.
    for (std::size_t j = 0; j < panel.sensors.size(); ++j) {
        int run = 0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (std::isnan(rows[i][j])) {
                ++run;
                if (!opts.forward_fill || i == 0 || run > opts.gap_limit)
                    throw DataError(panel_path + ": missing value for sensor '" +
                                    panel.sensors[j].id + "' at " +
                                    format_iso8601(panel.timestamps[i]));
                rows[i][j] = rows[i - 1][j];
            } else {
                run = 0;
            }
        }
    }

    panel.values.resize(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(panel.sensors.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < panel.sensors.size(); ++j)
            panel.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                rows[i][j];

    if (!roles_path.empty()) {
        auto rin = open_in(roles_path);
        std::string rline;
        std::getline(rin, rline);  // header
        int rno = 1;
        while (std::getline(rin, rline)) {
            ++rno;
            if (rline.empty()) continue;
            auto cells = split_csv_line(rline);
            if (cells.size() < 3)
                throw DataError(roles_path + ":" + std::to_string(rno) +
                                ": expected sensor_id,role,node_id");
            int idx = panel.sensor_index(cells[0]);
            if (idx < 0) continue;  // sidecar may describe sensors beyond this panel
            panel.sensors[static_cast<std::size_t>(idx)].role = parse_role(cells[1]);
            panel.sensors[static_cast<std::size_t>(idx)].node_id = cells[2];
        }
    }
    return panel;
}

void save_panel(const SensorPanel& panel, const std::string& panel_path,
                const std::string& roles_path) {
    auto out = open_out(panel_path);
    out << "timestamp";
    for (const auto& s : panel.sensors) out << "," << s.id;
    out << "\n";
    for (std::size_t t = 0; t < panel.steps(); ++t) {
        out << format_iso8601(panel.timestamps[t]);
        for (std::size_t j = 0; j < panel.dim(); ++j)
            out << "," << fmt_double(panel.values(static_cast<Eigen::Index>(t),
                                                  static_cast<Eigen::Index>(j)));
        out << "\n";
    }
    if (!roles_path.empty()) {
        auto rout = open_out(roles_path);
        rout << "sensor_id,role,node_id\n";
        for (const auto& s : panel.sensors)
            rout << s.id << "," << role_name(s.role) << "," << s.node_id << "\n";
    }
}

loc::NetworkGraph load_graph(const std::string& nodes_path, const std::string& edges_path,
                             const std::string& bindings_path) {
    loc::NetworkGraph g;
    {
        auto in = open_in(nodes_path);
        std::string line;
        std::getline(in, line);  // header
        int lineno = 1;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            auto c = split_csv_line(line);
            if (c.size() < 3)
                throw DataError(nodes_path + ":" + std::to_string(lineno) +
                                ": expected id,x,y");
            g.add_node(c[0], parse_double(c[1], nodes_path), parse_double(c[2], nodes_path));
        }
    }
    {
        auto in = open_in(edges_path);
        std::string line;
        std::getline(in, line);
        int lineno = 1;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            auto c = split_csv_line(line);
            if (c.size() < 4)
                throw DataError(edges_path + ":" + std::to_string(lineno) +
                                ": expected id,u,v,length_m");
            g.add_edge(c[0], c[1], c[2], parse_double(c[3], edges_path));
        }
    }
    if (!bindings_path.empty()) {
        auto in = open_in(bindings_path);
        std::string line;
        std::getline(in, line);
        int lineno = 1;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            auto c = split_csv_line(line);
            if (c.size() < 3)
                throw DataError(bindings_path + ":" + std::to_string(lineno) +
                                ": expected sensor_id,role,node_id");
            if (!c[2].empty()) g.bind_sensor(c[0], c[2]);
        }
    }
    return g;
}

void save_graph(const loc::NetworkGraph& graph, const std::string& nodes_path,
                const std::string& edges_path) {
    auto nout = open_out(nodes_path);
    nout << "id,x,y\n";
    for (const auto& n : graph.nodes)
        nout << n.id << "," << fmt_double(n.x) << "," << fmt_double(n.y) << "\n";
    auto eout = open_out(edges_path);
    eout << "id,u,v,length_m\n";
    for (const auto& e : graph.edges)
        eout << e.id << "," << graph.nodes[static_cast<std::size_t>(e.u)].id << ","
             << graph.nodes[static_cast<std::size_t>(e.v)].id << "," << fmt_double(e.length)
             << "\n";
}

void save_model(const train::TrainedModel& model, const std::string& path) {
    json j;
    j["version"] = kModelVersion;
    j["scheme"] = train::scheme_name(model.scheme);
    if (model.scheme.kind == train::SchemeKind::ExplicitMap) {
        json m = json::object();
        for (const auto& [t, c] : model.scheme.explicit_map) m[format_iso8601(t)] = c;
        j["explicit_map"] = m;
        j["explicit_count"] = model.scheme.explicit_count;
    }
    j["sensors"] = model.sensor_ids;
    json roles = json::array();
    for (auto r : model.sensor_roles) roles.push_back(role_name(r));
    j["roles"] = roles;

    json clusters = json::array();
    for (const auto& cm : model.clusters) {
        json c;
        c["usable"] = cm.usable;
        if (cm.usable) {
            c["n"] = cm.moments.n;
            c["mean"] = std::vector<double>(cm.moments.mean.data(),
                                            cm.moments.mean.data() + cm.moments.mean.size());
            std::vector<double> cov;
            cov.reserve(static_cast<std::size_t>(cm.moments.cov.size()));
            for (Eigen::Index r = 0; r < cm.moments.cov.rows(); ++r)
                for (Eigen::Index cc = 0; cc < cm.moments.cov.cols(); ++cc)
                    cov.push_back(cm.moments.cov(r, cc));
            c["cov"] = cov;  // row-major
        }
        clusters.push_back(c);
    }
    j["clusters"] = clusters;
    auto out = open_out(path);
    out << j.dump(2) << "\n";
}

train::TrainedModel load_model(const std::string& path) {
    auto in = open_in(path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError("model file '" + path + "': " + e.what());
    }
    if (j.value("version", 0) != kModelVersion)
        throw DataError("model file '" + path + "': unsupported version");
    train::TrainedModel model;
    model.scheme = train::parse_scheme(j.at("scheme").get<std::string>());
    if (model.scheme.kind == train::SchemeKind::ExplicitMap) {
        for (const auto& [k, v] : j.at("explicit_map").items())
            model.scheme.explicit_map[parse_iso8601(k)] = v.get<int>();
        model.scheme.explicit_count = j.value("explicit_count", 1);
    }
    model.sensor_ids = j.at("sensors").get<std::vector<std::string>>();
    for (const auto& r : j.at("roles")) model.sensor_roles.push_back(parse_role(r));
    const auto s = static_cast<Eigen::Index>(model.sensor_ids.size());
    for (const auto& c : j.at("clusters")) {
        train::ClusterModel cm;
        cm.usable = c.value("usable", false);
        if (cm.usable) {
            cm.moments.n = c.at("n").get<long>();
            auto mean = c.at("mean").get<std::vector<double>>();
            auto cov = c.at("cov").get<std::vector<double>>();
            if (static_cast<Eigen::Index>(mean.size()) != s ||
                static_cast<Eigen::Index>(cov.size()) != s * s)
                throw DataError("model file '" + path + "': cluster dimension mismatch");
            cm.moments.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), s);
            cm.moments.cov.resize(s, s);
            for (Eigen::Index r = 0; r < s; ++r)
                for (Eigen::Index cc = 0; cc < s; ++cc)
                    cm.moments.cov(r, cc) = cov[static_cast<std::size_t>(r * s + cc)];
            cm.whitening = stat::build_whitening(cm.moments);
        }
        model.clusters.push_back(std::move(cm));
    }
    return model;
}

std::vector<EventRecord> load_events(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": empty file");
    auto header = split_csv_line(line);
    auto col = [&header](const std::string& name) {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        return -1;
    };
    int c_id = col("id"), c_area = col("area"), c_kind = col("kind"),
        c_size = col("max_size_m3h"), c_start = col("start"), c_end = col("end"),
        c_det = col("detection");
    if (c_id < 0 || c_start < 0)
        throw DataError(path + ": header must contain at least 'id' and 'start'");

    std::vector<EventRecord> events;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto c = split_csv_line(line);
        auto cell = [&](int idx) -> std::string {
            return (idx >= 0 && idx < static_cast<int>(c.size())) ? c[static_cast<std::size_t>(idx)]
                                                                  : "";
        };
        EventRecord ev;
        ev.id = cell(c_id);
        ev.area = cell(c_area);
        if (!cell(c_kind).empty()) ev.kind = parse_event_kind(cell(c_kind));
        if (!cell(c_size).empty()) {
            ev.magnitude = parse_double(cell(c_size), path + ":" + std::to_string(lineno));
            if (ev.kind != EventKind::SensorBias && !(ev.magnitude > 0.0))
                throw DataError(path + ":" + std::to_string(lineno) +
                                ": max size must be positive");
        }
        ev.start = parse_iso8601(cell(c_start));
        if (!cell(c_end).empty()) ev.end = parse_iso8601(cell(c_end));
        if (!cell(c_det).empty()) ev.detection = parse_iso8601(cell(c_det));
        events.push_back(std::move(ev));
    }
    return events;
}

void save_events(const std::vector<EventRecord>& events, const std::string& path) {
    auto out = open_out(path);
    out << "id,area,kind,max_size_m3h,start,end,detection\n";
    for (const auto& ev : events) {
        out << ev.id << "," << ev.area << "," << event_kind_name(ev.kind) << ","
            << fmt_double(ev.magnitude) << "," << format_iso8601(ev.start) << ","
            << (ev.end ? format_iso8601(*ev.end) : "") << ","
            << (ev.detection ? format_iso8601(*ev.detection) : "") << "\n";
    }
}

void save_statistics(const detect::StatisticSeries& series, const detect::StatusSeries* status,
                     const std::string& path) {
    auto out = open_out(path);
    out << "timestamp,cluster,t2,t2f,ma,wh,status\n";
    for (std::size_t t = 0; t < series.size(); ++t) {
        out << format_iso8601(series.timestamps[t]) << "," << series.clusters[t] << ","
            << fmt_double(series.t2[t]) << "," << fmt_double(series.t2f[t]) << ","
            << (series.ma_defined[t] ? fmt_double(series.ma[t]) : "") << ","
            << fmt_double(series.wh[t]) << ","
            << (status ? std::to_string(status->status[t]) : "") << "\n";
    }
}

detect::StatisticSeries load_statistics(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": empty file");
    detect::StatisticSeries s;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto c = split_csv_line(line);
        if (c.size() < 6)
            throw DataError(path + ":" + std::to_string(lineno) + ": expected 6+ columns");
        s.timestamps.push_back(parse_iso8601(c[0]));
        s.clusters.push_back(static_cast<int>(parse_double(c[1], path)));
        s.t2.push_back(parse_double(c[2], path));
        s.t2f.push_back(parse_double(c[3], path));
        if (c[4].empty()) {
            s.ma.push_back(0.0);
            s.ma_defined.push_back(false);
        } else {
            s.ma.push_back(parse_double(c[4], path));
            s.ma_defined.push_back(true);
        }
        s.wh.push_back(parse_double(c[5], path));
    }
    return s;
}

void save_scps(const cpd::Classification& cls, const std::vector<Timestamp>& grid,
               const std::string& path) {
    auto out = open_out(path);
    out << "index,timestamp,label,p_value\n";
    for (const auto& scp : cls.scps) {
        out << scp.index << ","
            << (scp.index < grid.size() ? format_iso8601(grid[scp.index]) : "") << ","
            << (scp.label == cpd::ScpLabel::AnomalyStart ? "anomaly-start" : "anomaly-end")
            << "," << fmt_double(scp.p_value) << "\n";
    }
    for (std::size_t idx : cls.removed) {
        out << idx << "," << (idx < grid.size() ? format_iso8601(grid[idx]) : "")
            << ",removed,\n";
    }
}

void save_field(const loc::NodeField& field, const loc::NetworkGraph& graph,
                const std::string& path) {
    auto out = open_out(path);
    out << "node_id,value,provenance\n";
    for (std::size_t v = 0; v < graph.nodes.size(); ++v)
        out << graph.nodes[v].id << "," << fmt_double(field.value[v]) << ","
            << (field.fixed[v] ? "fixed" : "interpolated") << "\n";
}

void save_counts(const detect::LeakCountSeries& counts, const std::string& path) {
    auto out = open_out(path);
    out << "timestamp,count\n";
    for (std::size_t t = 0; t < counts.timestamps.size(); ++t)
        out << format_iso8601(counts.timestamps[t]) << "," << counts.count[t] << "\n";
}

detect::LeakCountSeries load_counts(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": empty file");
    detect::LeakCountSeries s;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto c = split_csv_line(line);
        if (c.size() < 2) throw DataError(path + ": expected timestamp,count");
        s.timestamps.push_back(parse_iso8601(c[0]));
        s.count.push_back(static_cast<int>(parse_double(c[1], path)));
    }
    return s;
}

void save_loss(const std::vector<Timestamp>& ts, const std::vector<double>& f,
               const std::vector<double>& predicted, const std::vector<double>* actual,
               const std::string& path) {
    auto out = open_out(path);
    out << "timestamp,f,predicted_loss" << (actual ? ",actual_loss,residual" : "") << "\n";
    for (std::size_t i = 0; i < ts.size(); ++i) {
        out << format_iso8601(ts[i]) << "," << fmt_double(f[i]) << ","
            << fmt_double(predicted[i]);
        if (actual)
            out << "," << fmt_double((*actual)[i]) << ","
                << fmt_double((*actual)[i] - predicted[i]);
        out << "\n";
    }
}

}  // namespace sicams::io
