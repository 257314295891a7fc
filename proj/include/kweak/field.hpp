#pragma once

// Sensor fields: Poisson deployment, the battery ledger, depth statistics and
// the depth-based lifetime ceiling.

#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "kweak/geometry.hpp"
#include "kweak/rng.hpp"

namespace kweak {

/// Batteries at or below this level are treated as depleted.
inline constexpr double kDepleted = 1e-9;

struct Sensor {
  int id = 0;
  Point pos;
  double battery = 1.0;

  Disk disk() const { return {pos, kSensingRadius}; }
};

class SensorField {
 public:
  SensorField() = default;
  SensorField(double region_side, std::vector<Sensor> sensors, std::uint64_t rng_seed)
      : region_side_(region_side), sensors_(std::move(sensors)), rng_seed_(rng_seed) {
    if (region_side_ <= 0) throw std::invalid_argument("SensorField: region side must be positive");
    for (std::size_t i = 0; i < sensors_.size(); ++i) {
      const auto& s = sensors_[i];
      if (s.id != static_cast<int>(i)) throw std::invalid_argument("SensorField: ids must be dense 0..n-1");
      if (s.pos.x < -kGeomEps || s.pos.y < -kGeomEps || s.pos.x > region_side_ + kGeomEps ||
          s.pos.y > region_side_ + kGeomEps) {
        throw std::invalid_argument("SensorField: sensor outside region");
      }
      if (!(s.battery >= 0.0 && s.battery <= 1.0)) throw std::invalid_argument("SensorField: battery outside [0,1]");
    }
  }

  double region_side() const { return region_side_; }
  std::uint64_t rng_seed() const { return rng_seed_; }
  std::size_t size() const { return sensors_.size(); }
  bool empty() const { return sensors_.empty(); }
  const std::vector<Sensor>& sensors() const { return sensors_; }
  const Sensor& operator[](int id) const { return sensors_.at(static_cast<std::size_t>(id)); }

  double battery(int id) const { return (*this)[id].battery; }
  bool alive(int id) const { return battery(id) > kDepleted; }

  /// Consume `amount` from sensor `id`. Batteries never increase; a residue
  /// below kDepleted after draining is snapped to zero.
  void drain(int id, double amount) {
    if (amount < 0) throw std::invalid_argument("SensorField::drain: negative amount");
    auto& s = sensors_.at(static_cast<std::size_t>(id));
    const double next = s.battery - amount;
    if (next < -kDepleted) throw std::logic_error("SensorField::drain: battery would go negative");
    s.battery = next < kDepleted ? 0.0 : next;
  }

  std::vector<Disk> disks() const {
    std::vector<Disk> out;
    out.reserve(sensors_.size());
    for (const auto& s : sensors_) out.push_back(s.disk());
    return out;
  }

  std::vector<Point> positions() const {
    std::vector<Point> out;
    out.reserve(sensors_.size());
    for (const auto& s : sensors_) out.push_back(s.pos);
    return out;
  }

 private:
  double region_side_ = 1.0;
  std::vector<Sensor> sensors_;
  std::uint64_t rng_seed_ = 0;
};

/// Poisson deployment: the region is cut into unit cells (the last row and
/// column are clipped when L is fractional); each cell draws its count and
/// positions from its own seeded stream, in row-major order.
inline SensorField generate_field(double region_side, double intensity, std::uint64_t seed) {
  if (!(region_side > 0)) throw std::invalid_argument("generate_field: L must be positive");
  if (!(intensity > 0)) throw std::invalid_argument("generate_field: intensity must be positive");
  const auto cells = static_cast<std::int64_t>(std::ceil(region_side - 1e-12));
  std::vector<Sensor> sensors;
  for (std::int64_t row = 0; row < cells; ++row) {
    for (std::int64_t col = 0; col < cells; ++col) {
      const double x0 = static_cast<double>(col), y0 = static_cast<double>(row);
      const double w = std::min(1.0, region_side - x0), h = std::min(1.0, region_side - y0);
      Rng rng(hash_values(seed, {static_cast<std::uint64_t>(row), static_cast<std::uint64_t>(col)}));
      const int count = poisson_inversion(rng, intensity * w * h);
      for (int k = 0; k < count; ++k) {
        const double x = x0 + w * uniform01(rng);
        const double y = y0 + h * uniform01(rng);
        sensors.push_back({static_cast<int>(sensors.size()), {x, y}, 1.0});
      }
    }
  }
  return SensorField(region_side, std::move(sensors), seed);
}

struct DepthReport {
  int d_R = 0;
  double resolution = 0.1;
  std::map<int, std::size_t> depth_histogram;
};

inline constexpr double kDefaultDepthResolution = 0.1;

/// Depth of a single point: number of sensors whose disk contains it.
inline int point_depth(const SensorField& field, Point p) {
  int depth = 0;
  for (const auto& s : field.sensors()) depth += disk_contains(s.disk(), p) ? 1 : 0;
  return depth;
}

/// Sampled depth over the lattice {0, r, 2r, ...}² ∩ [0, L]².
inline DepthReport region_depth(const SensorField& field, double resolution = kDefaultDepthResolution) {
  if (!(resolution > 0)) throw std::invalid_argument("region_depth: resolution must be positive");
  DepthReport report;
  report.resolution = resolution;
  const auto points = field.positions();
  const SpatialHash index(points, 2.0);
  const auto steps = static_cast<std::int64_t>(std::floor(field.region_side() / resolution + 1e-9));
  for (std::int64_t i = 0; i <= steps; ++i) {
    for (std::int64_t j = 0; j <= steps; ++j) {
      const Point p{static_cast<double>(i) * resolution, static_cast<double>(j) * resolution};
      int depth = 0;
      index.for_each_within(p, kSensingRadius, [&](int) { ++depth; });
      ++report.depth_histogram[depth];
      report.d_R = std::max(report.d_R, depth);
    }
  }
  return report;
}

/// Ceiling κ·d_R on any schedule's lifetime.
inline double lifetime_upper_bound(const SensorField& field, double kappa,
                                   double resolution = kDefaultDepthResolution) {
  if (!(kappa > 1)) throw std::invalid_argument("lifetime_upper_bound: kappa must exceed 1");
  if (field.empty()) return 0.0;
  return kappa * region_depth(field, resolution).d_R;
}

// Field file: "kweak-field v1 L=<L> seed=<seed>" then "id x y battery" lines.

inline std::string format_g9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_field(std::ostream& os, const SensorField& field) {
  os << "kweak-field v1 L=" << format_g9(field.region_side()) << " seed=" << field.rng_seed() << '\n';
  for (const auto& s : field.sensors()) {
    os << s.id << ' ' << format_g9(s.pos.x) << ' ' << format_g9(s.pos.y) << ' ' << format_g9(s.battery) << '\n';
  }
}

inline std::string serialize_field(const SensorField& field) {
  std::ostringstream os;
  write_field(os, field);
  return os.str();
}

inline SensorField read_field(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw std::runtime_error("field file: missing header");
  std::istringstream hs(header);
  std::string magic, version, l_tok, seed_tok;
  hs >> magic >> version >> l_tok >> seed_tok;
  if (magic != "kweak-field" || version != "v1" || l_tok.rfind("L=", 0) != 0 || seed_tok.rfind("seed=", 0) != 0) {
    throw std::runtime_error("field file: malformed header '" + header + "'");
  }
  const double side = std::stod(l_tok.substr(2));
  const std::uint64_t seed = std::stoull(seed_tok.substr(5));
  std::vector<Sensor> sensors;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    Sensor s;
    if (!(ls >> s.id >> s.pos.x >> s.pos.y >> s.battery)) {
      throw std::runtime_error("field file: malformed sensor line '" + line + "'");
    }
    sensors.push_back(s);
  }
  return SensorField(side, std::move(sensors), seed);
}

}  // namespace kweak
