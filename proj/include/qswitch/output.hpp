#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "qswitch/lindblad.hpp"

namespace qswitch {

/// %.12g
std::string format_number(double value);

/// Column order: t_ns, the trajectory's series in order, trace, min_eig.
std::vector<std::string> csv_columns(const Trajectory& trajectory);

void write_csv(std::ostream& out, const Trajectory& trajectory);
std::string to_csv(const Trajectory& trajectory);

/// Write to a sibling temporary file, then rename over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// FNV-1a 64-bit, as 16 hex digits.
std::string content_hash(std::string_view text);

}  // namespace qswitch
