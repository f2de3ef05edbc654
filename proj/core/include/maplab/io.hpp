#pragma once

#include <filesystem>
#include <string>

#include "maplab/convexify.hpp"

namespace maplab {

// Shortest exact decimal form, up to 17 significant digits; round-trips to
// the same double.
std::string format_double(double x);

// Write via a sibling temp file and rename, so readers never observe a
// partial file. Creates parent directories as needed.
void write_atomic(const std::filesystem::path& path, const std::string& content);

// "x1,x2,value" rows over the grid, LF endings.
std::string levelset_csv(const LevelsetTables& tables, bool right);

}  // namespace maplab
