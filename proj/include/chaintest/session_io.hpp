#pragma once

#include "chaintest/orchestrator.hpp"

#include <string>

namespace chaintest {

/// Stable JSON form of a SessionReport. Field order is fixed and no
/// timestamps are recorded, so identical sessions serialize byte-identically.
nlohmann::ordered_json report_json(const SessionReport& report);

/// report_json rendered with 2-space indentation plus a trailing newline.
std::string serialize_report(const SessionReport& report);

} // namespace chaintest
