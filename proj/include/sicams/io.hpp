#ifndef SICAMS_IO_HPP
#define SICAMS_IO_HPP

#include <string>
#include <vector>

#include "sicams/changepoint.hpp"
#include "sicams/detection.hpp"
#include "sicams/events.hpp"
#include "sicams/graph.hpp"
#include "sicams/localization.hpp"
#include "sicams/panel.hpp"
#include "sicams/training.hpp"

namespace sicams::io {

struct PanelLoadOptions {
    bool forward_fill = false;  // otherwise gaps are rejected
    int gap_limit = 3;          // max consecutive steps to fill
};

/// Wide CSV: header "timestamp,<sensor_id>,...", ISO-8601 timestamps at a
/// fixed step. The roles sidecar (sensor_id,role,node_id) fills roles and
/// node bindings; sensors without an entry default to pressure.
SensorPanel load_panel(const std::string& panel_path, const std::string& roles_path = "",
                       const PanelLoadOptions& opts = {});
void save_panel(const SensorPanel& panel, const std::string& panel_path,
                const std::string& roles_path = "");

/// Graph from nodes CSV (id,x,y) and edges CSV (id,u,v,length_m); optional
/// bindings CSV reuses the roles sidecar (sensor_id,role,node_id).
loc::NetworkGraph load_graph(const std::string& nodes_path, const std::string& edges_path,
                             const std::string& bindings_path = "");
void save_graph(const loc::NetworkGraph& graph, const std::string& nodes_path,
                const std::string& edges_path);

/// Versioned JSON model document; matrices round-trip losslessly.
void save_model(const train::TrainedModel& model, const std::string& path);
train::TrainedModel load_model(const std::string& path);

/// Events CSV: id,area,kind,max_size_m3h,start[,end][,detection].
std::vector<EventRecord> load_events(const std::string& path);
void save_events(const std::vector<EventRecord>& events, const std::string& path);

/// StatisticSeries+StatusSeries CSV: timestamp,cluster,t2,t2f,ma,wh,status.
void save_statistics(const detect::StatisticSeries& series, const detect::StatusSeries* status,
                     const std::string& path);
detect::StatisticSeries load_statistics(const std::string& path);

/// SCP CSV: index,timestamp,label,p_value.
void save_scps(const cpd::Classification& cls, const std::vector<Timestamp>& grid,
               const std::string& path);

/// Node field CSV: node_id,value,provenance.
void save_field(const loc::NodeField& field, const loc::NetworkGraph& graph,
                const std::string& path);

/// Leak-count CSV: timestamp,count.
void save_counts(const detect::LeakCountSeries& counts, const std::string& path);
detect::LeakCountSeries load_counts(const std::string& path);

/// Loss CSV: timestamp,f,predicted_loss[,actual_loss,residual].
void save_loss(const std::vector<Timestamp>& ts, const std::vector<double>& f,
               const std::vector<double>& predicted, const std::vector<double>* actual,
               const std::string& path);

std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace sicams::io

#endif
