#pragma once

// Hexagonal multi-cell geometry, user drops and long-term fading.
//
// Cells are "pointy" hexagons with vertices at 0, 60, ..., 300 degrees and
// circumradius R. Only the serving cell (index 0, at the origin) and the first
// ring of co-channel cells are modelled, so there are always seven mutually
// interfering cells. With reuse factor 1 the co-channel neighbours are the
// adjacent cells at sqrt(3) R; with reuse factor 3 they are the nearest
// same-band cells of the reuse-3 lattice at 3 R.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mmimo/rng.hpp"

namespace mmimo {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

double distance(Point a, Point b);

struct Layout {
  int reuse_factor = 1;
  double cell_radius = 1600.0;
  std::vector<Point> bs_positions;  // [0] is the serving cell

  std::size_t cells() const noexcept { return bs_positions.size(); }
};

struct UserDrop {
  std::size_t cells = 0;
  std::size_t users = 0;
  std::vector<Point> positions;  // cell-major: positions[cell * users + user]

  const Point& at(std::size_t cell, std::size_t user) const { return positions[cell * users + user]; }
};

/// beta(bs, user, cell): long-term power gain from base station `bs` to user
/// `user` of cell `cell`.
class BetaTensor {
 public:
  BetaTensor() = default;
  BetaTensor(std::size_t cells, std::size_t users, double fill = 0.0);

  std::size_t cells() const noexcept { return cells_; }
  std::size_t users() const noexcept { return users_; }

  double& operator()(std::size_t bs, std::size_t user, std::size_t cell) {
    return data_[(bs * users_ + user) * cells_ + cell];
  }
  double operator()(std::size_t bs, std::size_t user, std::size_t cell) const {
    return data_[(bs * users_ + user) * cells_ + cell];
  }

  const std::vector<double>& data() const noexcept { return data_; }
  std::vector<double>& data() noexcept { return data_; }

  friend bool operator==(const BetaTensor&, const BetaTensor&) = default;

 private:
  std::size_t cells_ = 0;
  std::size_t users_ = 0;
  std::vector<double> data_;
};

struct FrameConfig {
  double bandwidth_hz = 20e6;
  int symbols_total = 11;
  int symbols_downlink = 4;
  double cp_fraction = 0.07;
  double carrier_hz = 1.9e9;
  double coherence_time_s = 500e-6;

  void validate() const;
};

struct PathLossModel {
  double exponent = 3.8;
  double shadow_sigma_db = 8.0;
  // Distance at which the deterministic path gain is 1. Defaults to the cell
  // radius so a transmit SNR of 10 dB is the (unshadowed) cell-edge SNR.
  double reference_distance_m = 1600.0;
};

struct ScenarioConfig {
  int reuse_factor = 1;
  double radius_m = 1600.0;
  std::size_t users_per_cell = 4;
  double lambda = 3.8;
  double shadow_sigma_db = 8.0;
  double reference_distance_m = 1600.0;
  double exclusion_radius_m = 100.0;
  std::uint64_t seed = 1;

  PathLossModel path_loss() const { return {lambda, shadow_sigma_db, reference_distance_m}; }
  void validate() const;

  /// key = value lines, '#' starts a comment. Unknown keys are rejected.
  static ScenarioConfig parse(std::istream& in);
  static ScenarioConfig load(const std::string& path);
};

/// (1 - cp) / cp without rounding.
double n_smooth_ratio(double cp_fraction);
/// floor((1 - cp) / cp).
std::size_t n_smooth(double cp_fraction);

Layout generate_layout(int reuse_factor, double radius);

bool inside_hexagon(Point relative, double radius);

inline constexpr double kExclusionRadius = 100.0;

/// K users per cell, uniform over each hexagon minus a disc around its BS.
UserDrop drop_users(const Layout& layout, std::size_t users_per_cell, Rng& rng,
                    double exclusion_radius = kExclusionRadius);

/// (d / d0)^(-lambda)
double path_gain(double distance_m, double exponent, double reference_distance_m);

/// beta = z * (d / d0)^(-lambda) with an independent log-normal z per link.
BetaTensor compute_beta(const Layout& layout, const UserDrop& drop, const PathLossModel& model,
                        Rng& rng);

void write_layout_csv(std::ostream& out, const Layout& layout);
void write_drop_csv(std::ostream& out, const UserDrop& drop);

}  // namespace mmimo
