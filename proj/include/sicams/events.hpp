#ifndef SICAMS_EVENTS_HPP
#define SICAMS_EVENTS_HPP

#include <optional>
#include <string>

#include "sicams/panel.hpp"

namespace sicams {

enum class EventKind { Abrupt, Incipient, SensorBias };

EventKind parse_event_kind(const std::string& s);
std::string event_kind_name(EventKind k);

/// Ground-truth or detected anomaly interval.
struct EventRecord {
    std::string id;        // pipe/node id, or sensor id for bias events
    std::string area;
    EventKind kind = EventKind::Abrupt;
    double magnitude = 0.0;  // max size, m^3/h (bias: offset in native units)
    Timestamp start = 0;
    std::optional<Timestamp> end;           // open-ended when absent
    std::optional<Timestamp> detection;     // filled by detection pipelines
};

}  // namespace sicams

#endif
