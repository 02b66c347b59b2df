#include "sicams/events.hpp"

#include "sicams/errors.hpp"

namespace sicams {

EventKind parse_event_kind(const std::string& s) {
    if (s == "abrupt") return EventKind::Abrupt;
    if (s == "incipient") return EventKind::Incipient;
    if (s == "sensor-bias") return EventKind::SensorBias;
    throw DataError("unknown event kind '" + s + "'");
}

std::string event_kind_name(EventKind k) {
    switch (k) {
        case EventKind::Abrupt: return "abrupt";
        case EventKind::Incipient: return "incipient";
        case EventKind::SensorBias: return "sensor-bias";
    }
    return "abrupt";
}

}  // namespace sicams
