#ifndef SICAMS_PANEL_HPP
#define SICAMS_PANEL_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace sicams {

/// Unix epoch seconds (UTC).
using Timestamp = std::int64_t;

Timestamp parse_iso8601(const std::string& s);
std::string format_iso8601(Timestamp t);

enum class SensorRole { Pressure, Flow, Level };

SensorRole parse_role(const std::string& s);
std::string role_name(SensorRole r);

struct SensorInfo {
    std::string id;
    SensorRole role = SensorRole::Pressure;
    std::string node_id;  // network node the sensor is bound to
};

/// Time-indexed matrix of readings for named sensors. Rows are time steps,
/// columns follow the sensor order.
struct SensorPanel {
    std::vector<Timestamp> timestamps;  // strictly increasing, fixed step
    std::vector<SensorInfo> sensors;
    Eigen::MatrixXd values;  // timestamps.size() x sensors.size()

    std::size_t steps() const { return timestamps.size(); }
    std::size_t dim() const { return sensors.size(); }
    Timestamp step_seconds() const {
        return timestamps.size() > 1 ? timestamps[1] - timestamps[0] : 0;
    }
    Eigen::VectorXd row(std::size_t t) const { return values.row(static_cast<Eigen::Index>(t)); }
    int sensor_index(const std::string& id) const;  // -1 when absent

    /// Reorders columns to match the given sensor-id order; throws DataError
    /// naming the first missing sensor.
    SensorPanel reordered(const std::vector<std::string>& order) const;
};

}  // namespace sicams

#endif
