#pragma once

#include <map>
#include <string>
#include <vector>

#include "wulffspread/pdesim.hpp"

namespace wulffspread {

// Field dump layout, little-endian:
//   0  char[8]  "WSFIELD1"
//   8  uint32   dim
//  12  uint32   periodic (0 or 1)
//  16  uint64   nx
//  24  uint64   ny (1 in 1D)
//  32  float64  spacing
//  40  float64  time
//  48  float64  origin (coordinate of node 0 on every axis)
//  56  8 bytes  zero
//  64  float64[nx * ny], row-major with x fastest
// plus a `<path>.meta` text file of key = value lines.
struct FieldDump {
  Field field;
  double time = 0.0;
};

void write_field(const std::string& path, const Field& u, double time,
                 const std::map<std::string, std::string>& metadata = {});
FieldDump read_field(const std::string& path);

void write_track_csv(const std::string& path, const InterfaceTrack& track);
/// One row per time, one radius column per curve (empty when absent).
void write_radius_csv(const std::string& path, const std::vector<RadiusCurve>& curves);

}  // namespace wulffspread
