#include "wulffspread/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace wulffspread {

static_assert(std::endian::native == std::endian::little, "field dumps assume a little-endian host");

namespace {

constexpr char kMagic[8] = {'W', 'S', 'F', 'I', 'E', 'L', 'D', '1'};

template <class T>
void put(char* header, std::size_t offset, T value) {
  std::memcpy(header + offset, &value, sizeof(T));
}

template <class T>
T get(const char* header, std::size_t offset) {
  T value;
  std::memcpy(&value, header + offset, sizeof(T));
  return value;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

}  // namespace

void write_field(const std::string& path, const Field& u, double time,
                 const std::map<std::string, std::string>& metadata) {
  char header[64] = {};
  std::memcpy(header, kMagic, 8);
  put<std::uint32_t>(header, 8, static_cast<std::uint32_t>(u.grid.dim));
  put<std::uint32_t>(header, 12, u.grid.periodic_box ? 1u : 0u);
  put<std::uint64_t>(header, 16, static_cast<std::uint64_t>(u.nx()));
  put<std::uint64_t>(header, 24, static_cast<std::uint64_t>(u.ny()));
  put<double>(header, 32, u.grid.spacing());
  put<double>(header, 40, time);
  put<double>(header, 48, -u.grid.domain_half_width);

  auto out = open_out(path, std::ios::binary);
  out.write(header, sizeof header);
  out.write(reinterpret_cast<const char*>(u.data.data()),
            static_cast<std::streamsize>(u.data.size() * sizeof(double)));
  if (!out) throw std::runtime_error("short write to " + path);

  auto meta = open_out(path + ".meta");
  meta.precision(17);
  meta << "format = WSFIELD1\n"
       << "dim = " << u.grid.dim << "\n"
       << "nx = " << u.nx() << "\n"
       << "ny = " << u.ny() << "\n"
       << "spacing = " << u.grid.spacing() << "\n"
       << "half_width = " << u.grid.domain_half_width << "\n"
       << "periodic = " << (u.grid.periodic_box ? "true" : "false") << "\n"
       << "time = " << time << "\n";
  for (const auto& [key, value] : metadata) meta << key << " = " << value << "\n";
}

FieldDump read_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  char header[64];
  in.read(header, sizeof header);
  if (!in || std::memcmp(header, kMagic, 8) != 0)
    throw std::runtime_error(path + " is not a field dump");
  FieldDump dump;
  GridSpec g;
  g.dim = static_cast<int>(get<std::uint32_t>(header, 8));
  g.periodic_box = get<std::uint32_t>(header, 12) != 0;
  auto nx = get<std::uint64_t>(header, 16);
  auto ny = get<std::uint64_t>(header, 24);
  g.points_per_axis = static_cast<int>(nx);
  g.domain_half_width = -get<double>(header, 48);
  dump.time = get<double>(header, 40);
  if ((g.dim == 1 && ny != 1) || (g.dim == 2 && ny != nx))
    throw std::runtime_error(path + ": inconsistent dimensions");
  dump.field = Field(g);
  in.read(reinterpret_cast<char*>(dump.field.data.data()),
          static_cast<std::streamsize>(dump.field.data.size() * sizeof(double)));
  if (!in) throw std::runtime_error(path + ": truncated data");
  return dump;
}

void write_track_csv(const std::string& path, const InterfaceTrack& track) {
  auto out = open_out(path);
  out.precision(12);
  out << "time,position\n";
  for (std::size_t k = 0; k < track.times.size(); ++k) {
    out << track.times[k] << ',';
    if (track.positions[k]) out << *track.positions[k];
    out << '\n';
  }
}

void write_radius_csv(const std::string& path, const std::vector<RadiusCurve>& curves) {
  auto out = open_out(path);
  out.precision(12);
  out << "time";
  for (const auto& c : curves) out << ",r(" << c.xi[0] << ' ' << c.xi[1] << ')';
  out << '\n';
  if (curves.empty()) return;
  for (std::size_t k = 0; k < curves.front().times.size(); ++k) {
    out << curves.front().times[k];
    for (const auto& c : curves) {
      out << ',';
      if (c.radii[k]) out << *c.radii[k];
    }
    out << '\n';
  }
}

}  // namespace wulffspread
