#pragma once

#include <chrono>
#include <functional>
#include <string>
#include <string_view>

namespace synthlab {

using Timestamp = std::chrono::sys_time<std::chrono::microseconds>;

/// Source of event timestamps.
using Clock = std::function<Timestamp()>;

Clock system_clock();

/// Deterministic clock starting at `start` and advancing by `step` per call.
Clock stepping_clock(Timestamp start, std::chrono::microseconds step = std::chrono::milliseconds(1));

/// Canonical UTC form: YYYY-MM-DDTHH:MM:SS.ffffffZ (always six fraction digits).
std::string format_timestamp(Timestamp t);

/// Accepts RFC 3339 timestamps with optional fraction (truncated to
/// microseconds) and either `Z` or a `+hh:mm` / `-hh:mm` offset.
/// Throws std::invalid_argument on malformed input.
Timestamp parse_timestamp(std::string_view text);

}  // namespace synthlab
