#pragma once

#include <string>

#include "tiltsim/runtime.hpp"

namespace tiltsim {

/// One row per log record, fixed column order, '\n' line ends. Formatting is
/// locale independent so identical logs serialize byte for byte.
bool write_log_csv(const std::string& path, const std::vector<LogRecord>& log);

/// Flat key=value text file.
bool write_metrics(const std::string& path, const Metrics& m);

std::string csv_header();
std::string csv_row(const LogRecord& r);

}  // namespace tiltsim
