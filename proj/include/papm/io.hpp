#pragma once

#include <iosfwd>
#include <string>

#include "papm/grid_map.hpp"
#include "papm/point_set.hpp"

namespace papm {

/// Point file format: JSON object with integer "image_width", "image_height"
/// and "points": array of [x, y] pairs. Extra keys are ignored.
PointSet read_points(std::istream& in);
PointSet read_points_file(const std::string& path);
void write_points(const PointSet& ps, std::ostream& out);
void write_points_file(const PointSet& ps, const std::string& path);

enum class MapFormat { text, binary };

/// Text: "PAPM 1 <H> <W>\n" then H lines of W space-separated reals.
/// Binary: "PAPM" 0x01, H and W as u32 little-endian, then H*W f64
/// little-endian, row-major. read_map sniffs the format from the header.
void write_map(const GridMap& map, std::ostream& out, MapFormat format);
GridMap read_map(std::istream& in);
void write_map_file(const GridMap& map, const std::string& path, MapFormat format);
GridMap read_map_file(const std::string& path);

} // namespace papm
