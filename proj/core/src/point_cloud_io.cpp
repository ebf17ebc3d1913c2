#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "graspbridge/error.hpp"
#include "graspbridge/geometry.hpp"

namespace graspbridge::geometry {

OrientedCloud read_cloud_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInvalidInput, "cannot open " + path.string());
  in.imbue(std::locale::classic());
  OrientedCloud out;
  std::string line;
  std::size_t line_no = 0;
  int columns = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> values;
    std::stringstream row(line);
    row.imbue(std::locale::classic());
    std::string cell;
    while (std::getline(row, cell, ',')) {
      try {
        std::size_t used = 0;
        double v = std::stod(cell, &used);
        if (cell.find_first_not_of(" \t", used) != std::string::npos || !std::isfinite(v)) {
          throw std::invalid_argument(cell);
        }
        values.push_back(v);
      } catch (const std::exception&) {
        throw Error(ErrorCode::kFormat,
                    path.string() + ":" + std::to_string(line_no) + ": bad number '" + cell + "'");
      }
    }
    int n = static_cast<int>(values.size());
    if ((n != 3 && n != 6) || (columns != -1 && n != columns)) {
      throw Error(ErrorCode::kFormat, path.string() + ":" + std::to_string(line_no) +
                                          ": expected 3 or 6 columns consistently");
    }
    columns = n;
    out.cloud.points.emplace_back(values[0], values[1], values[2]);
    if (n == 6) out.normals.emplace_back(values[3], values[4], values[5]);
  }
  return out;
}

void write_cloud_csv(const std::filesystem::path& path, const OrientedCloud& cloud) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kInvalidInput, "cannot write " + path.string());
  out.imbue(std::locale::classic());
  out << std::setprecision(17);
  const bool with_normals = cloud.normals.size() == cloud.size() && !cloud.normals.empty();
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.cloud.points[i];
    out << p.x() << ',' << p.y() << ',' << p.z();
    if (with_normals) {
      const Vec3& n = cloud.normals[i];
      out << ',' << n.x() << ',' << n.y() << ',' << n.z();
    }
    out << '\n';
  }
}

}  // namespace graspbridge::geometry
