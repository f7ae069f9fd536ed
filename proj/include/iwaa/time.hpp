#pragma once
// Time primitives: UTC timestamps at microsecond resolution and
// fractional-second durations.

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace iwaa {

// Absolute instant, microseconds since the Unix epoch, always UTC.
struct Timestamp {
    int64_t us = 0;

    auto operator<=>(const Timestamp&) const = default;

    static Timestamp from_seconds(double s) {
        return Timestamp{static_cast<int64_t>(s * 1e6)};
    }
    double to_seconds() const { return static_cast<double>(us) * 1e-6; }
};

// Non-negative span of time in seconds.
struct Duration {
    double seconds = 0.0;

    auto operator<=>(const Duration&) const = default;

    static Duration from_hours(double h) { return Duration{h * 3600.0}; }
    static Duration from_minutes(double m) { return Duration{m * 60.0}; }
    static Duration from_days(double d) { return Duration{d * 86400.0}; }
    double hours() const { return seconds / 3600.0; }

    Duration operator+(Duration o) const { return Duration{seconds + o.seconds}; }
    Duration& operator+=(Duration o) { seconds += o.seconds; return *this; }
};

inline Duration operator-(Timestamp a, Timestamp b) {
    if (a < b) throw std::invalid_argument("Timestamp subtraction: minuend < subtrahend");
    return Duration{static_cast<double>(a.us - b.us) * 1e-6};
}

inline Timestamp operator-(Timestamp t, Duration d) {
    return Timestamp{t.us - static_cast<int64_t>(d.seconds * 1e6)};
}
inline Timestamp operator+(Timestamp t, Duration d) {
    return Timestamp{t.us + static_cast<int64_t>(d.seconds * 1e6)};
}

// Parses an RFC3339 timestamp ("2020-07-01T12:34:56.123456+02:00" or a
// trailing "Z") and normalizes it to UTC. Throws std::invalid_argument on
// malformed input.
Timestamp parse_rfc3339(const std::string& text);

// Formats as "YYYY-MM-DDTHH:MM:SS.ffffffZ".
std::string format_rfc3339(Timestamp t);

}  // namespace iwaa
