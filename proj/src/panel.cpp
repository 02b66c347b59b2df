#include "sicams/panel.hpp"

#include <cstdio>
#include <stdexcept>

#include "sicams/errors.hpp"

namespace sicams {

namespace {

// Days from civil date (proleptic Gregorian), epoch 1970-01-01.
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yy + (m <= 2));
}

}  // namespace

Timestamp parse_iso8601(const std::string& s) {
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
    int n = std::sscanf(s.c_str(), "%d-%d-%d%*[T ]%d:%d:%d", &y, &mo, &d, &h, &mi, &sec);
    if (n < 3 || mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 ||
        mi > 59 || sec < 0 || sec > 60)
        throw DataError("invalid timestamp '" + s + "' (expected YYYY-MM-DD[THH:MM[:SS]])");
    return days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + sec;
}

std::string format_iso8601(Timestamp t) {
    std::int64_t days = t / 86400;
    std::int64_t rem = t % 86400;
    if (rem < 0) {
        rem += 86400;
        days -= 1;
    }
    int y, m, d;
    civil_from_days(days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d", y, m, d,
                  static_cast<int>(rem / 3600), static_cast<int>((rem / 60) % 60),
                  static_cast<int>(rem % 60));
    return buf;
}

SensorRole parse_role(const std::string& s) {
    if (s == "pressure") return SensorRole::Pressure;
    if (s == "flow") return SensorRole::Flow;
    if (s == "level") return SensorRole::Level;
    throw DataError("unknown sensor role '" + s + "'");
}

std::string role_name(SensorRole r) {
    switch (r) {
        case SensorRole::Pressure: return "pressure";
        case SensorRole::Flow: return "flow";
        case SensorRole::Level: return "level";
    }
    return "pressure";
}

int SensorPanel::sensor_index(const std::string& id) const {
    for (std::size_t i = 0; i < sensors.size(); ++i)
        if (sensors[i].id == id) return static_cast<int>(i);
    return -1;
}

SensorPanel SensorPanel::reordered(const std::vector<std::string>& order) const {
    SensorPanel out;
    out.timestamps = timestamps;
    out.values.resize(values.rows(), static_cast<Eigen::Index>(order.size()));
    out.sensors.reserve(order.size());
    for (std::size_t j = 0; j < order.size(); ++j) {
        int idx = sensor_index(order[j]);
        if (idx < 0) throw DataError("panel is missing sensor '" + order[j] + "'");
        out.sensors.push_back(sensors[static_cast<std::size_t>(idx)]);
        out.values.col(static_cast<Eigen::Index>(j)) = values.col(idx);
    }
    return out;
}

}  // namespace sicams
