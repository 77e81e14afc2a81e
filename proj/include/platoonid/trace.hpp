#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace platoonid {

// One protocol or simulator event. Values must be free of tabs and
// newlines; the writers only pass identifiers, integers, and hex.
struct TraceEvent {
    int64_t time = 0;
    std::string kind;
    std::vector<std::pair<std::string, std::string>> fields;

    std::string to_line() const {
        std::string out = std::to_string(time) + "\t" + kind;
        for (const auto& [k, v] : fields) {
            out += "\t" + k + "=" + v;
        }
        return out;
    }
};

// Append-only, time-ordered event log; the simulator's externally
// assertable artifact.
class EventTrace {
public:
    void emit(int64_t time, std::string kind,
              std::vector<std::pair<std::string, std::string>> fields = {}) {
        events_.push_back(TraceEvent{time, std::move(kind), std::move(fields)});
    }

    const std::vector<TraceEvent>& events() const { return events_; }

    size_t count(std::string_view kind) const {
        size_t n = 0;
        for (const auto& e : events_) {
            if (e.kind == kind) ++n;
        }
        return n;
    }

    std::string to_text() const {
        std::string out;
        for (const auto& e : events_) {
            out += e.to_line();
            out += "\n";
        }
        return out;
    }

    void write(std::ostream& os) const { os << to_text(); }

private:
    std::vector<TraceEvent> events_;
};

}  // namespace platoonid
