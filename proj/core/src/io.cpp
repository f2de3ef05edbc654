#include "maplab/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace maplab {

std::string format_double(double x) {
  char buf[64];
  // shortest %.g form that round-trips; 17 digits always suffice
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, x);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == x || (x != x && back != back)) break;
  }
  return buf;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path dir = path.parent_path();
  if (!dir.empty()) std::filesystem::create_directories(dir);
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string levelset_csv(const LevelsetTables& tables, bool right) {
  const std::size_t grid = tables.grid;
  const Vec& vals = right ? tables.right : tables.left;
  std::string out = "x1,x2,value\n";
  for (std::size_t i = 0; i < grid; ++i) {
    double x1 = tables.lo + (tables.hi - tables.lo) * static_cast<double>(i) /
                                static_cast<double>(grid - 1);
    for (std::size_t j = 0; j < grid; ++j) {
      double x2 = tables.lo + (tables.hi - tables.lo) * static_cast<double>(j) /
                                  static_cast<double>(grid - 1);
      out += format_double(x1);
      out += ',';
      out += format_double(x2);
      out += ',';
      out += format_double(vals[i * grid + j]);
      out += '\n';
    }
  }
  return out;
}

}  // namespace maplab
