#include "mmimo/scenario.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "mmimo/errors.hpp"

namespace mmimo {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size()) {
    throw DomainError(fmt::format("scenario config: '{}' is not a number for key '{}'", value, key));
  }
  return out;
}

}  // namespace

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

BetaTensor::BetaTensor(std::size_t cells, std::size_t users, double fill)
    : cells_(cells), users_(users), data_(cells * users * cells, fill) {}

void FrameConfig::validate() const {
  if (symbols_downlink <= 0 || symbols_total <= 0 || symbols_downlink >= symbols_total) {
    throw DomainError("frame config: need 0 < downlink symbols < total symbols");
  }
  if (!(cp_fraction > 0.0 && cp_fraction < 1.0)) {
    throw DomainError("frame config: cyclic prefix fraction must lie in (0, 1)");
  }
  if (!(bandwidth_hz > 0.0)) throw DomainError("frame config: bandwidth must be positive");
}

void ScenarioConfig::validate() const {
  if (reuse_factor != 1 && reuse_factor != 3) {
    throw DomainError(fmt::format("unsupported reuse factor {} (expected 1 or 3)", reuse_factor));
  }
  if (!(radius_m > 0.0)) throw DomainError("cell radius must be positive");
  if (users_per_cell < 1) throw DomainError("need at least one user per cell");
  if (!(lambda > 2.0)) throw DomainError("path-loss exponent must exceed 2");
  if (!(shadow_sigma_db >= 0.0)) throw DomainError("shadowing deviation must be >= 0");
  if (!(reference_distance_m > 0.0)) throw DomainError("reference distance must be positive");
  if (!(exclusion_radius_m >= 0.0 && exclusion_radius_m < radius_m * std::sqrt(3.0) / 2.0)) {
    throw DomainError("exclusion radius must lie inside the hexagon's inscribed circle");
  }
}

ScenarioConfig ScenarioConfig::parse(std::istream& in) {
  ScenarioConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw DomainError(fmt::format("scenario config line {}: expected key = value", line_no));
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "reuse_factor") {
      cfg.reuse_factor = static_cast<int>(parse_double(key, value));
    } else if (key == "radius_m") {
      cfg.radius_m = parse_double(key, value);
    } else if (key == "K") {
      cfg.users_per_cell = static_cast<std::size_t>(parse_double(key, value));
    } else if (key == "lambda") {
      cfg.lambda = parse_double(key, value);
    } else if (key == "shadow_sigma_db") {
      cfg.shadow_sigma_db = parse_double(key, value);
    } else if (key == "reference_distance_m") {
      cfg.reference_distance_m = parse_double(key, value);
    } else if (key == "exclusion_radius_m") {
      cfg.exclusion_radius_m = parse_double(key, value);
    } else if (key == "seed") {
      cfg.seed = std::stoull(value);
    } else {
      throw DomainError(fmt::format("scenario config line {}: unknown key '{}'", line_no, key));
    }
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig ScenarioConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open scenario config '{}'", path));
  return parse(in);
}

double n_smooth_ratio(double cp_fraction) {
  if (!(cp_fraction > 0.0 && cp_fraction < 1.0)) {
    throw DomainError(fmt::format("cyclic prefix fraction {} outside (0, 1)", cp_fraction));
  }
  return (1.0 - cp_fraction) / cp_fraction;
}

std::size_t n_smooth(double cp_fraction) {
  // The slack absorbs representation error for exact ratios such as 0.8 / 0.2.
  return static_cast<std::size_t>(std::floor(n_smooth_ratio(cp_fraction) + 1e-9));
}

Layout generate_layout(int reuse_factor, double radius) {
  if (reuse_factor != 1 && reuse_factor != 3) {
    throw DomainError(fmt::format("unsupported reuse factor {} (expected 1 or 3)", reuse_factor));
  }
  if (!(radius > 0.0)) throw DomainError("cell radius must be positive");

  // Co-channel distance sqrt(3 * RF) * R. For RF = 1 the neighbours sit across
  // the hexagon edges (30 + 60 i degrees); the reuse-3 co-channel sites of the
  // same lattice lie along the vertex directions (60 i degrees).
  const double reuse_distance = std::sqrt(3.0 * reuse_factor) * radius;
  const double offset_deg = reuse_factor == 1 ? 30.0 : 0.0;

  Layout layout;
  layout.reuse_factor = reuse_factor;
  layout.cell_radius = radius;
  layout.bs_positions.push_back({0.0, 0.0});
  for (int i = 0; i < 6; ++i) {
    const double angle = (offset_deg + 60.0 * i) * kPi / 180.0;
    layout.bs_positions.push_back({reuse_distance * std::cos(angle), reuse_distance * std::sin(angle)});
  }
  return layout;
}

bool inside_hexagon(Point relative, double radius) {
  const double apothem = radius * std::sqrt(3.0) / 2.0;
  static const std::array<double, 3> kNormals{30.0, 90.0, 150.0};
  for (double deg : kNormals) {
    const double a = deg * kPi / 180.0;
    if (std::abs(relative.x * std::cos(a) + relative.y * std::sin(a)) > apothem) return false;
  }
  return true;
}

UserDrop drop_users(const Layout& layout, std::size_t users_per_cell, Rng& rng,
                    double exclusion_radius) {
  if (users_per_cell < 1) throw DomainError("need at least one user per cell");
  const double radius = layout.cell_radius;
  if (!(exclusion_radius < radius * std::sqrt(3.0) / 2.0)) {
    throw DomainError("exclusion radius leaves no room inside the hexagon");
  }

  std::uniform_real_distribution<double> ux(-radius, radius);
  std::uniform_real_distribution<double> uy(-radius * std::sqrt(3.0) / 2.0, radius * std::sqrt(3.0) / 2.0);

  UserDrop drop;
  drop.cells = layout.cells();
  drop.users = users_per_cell;
  drop.positions.reserve(drop.cells * users_per_cell);
  for (const Point& bs : layout.bs_positions) {
    for (std::size_t k = 0; k < users_per_cell; ++k) {
      Point p;
      do {
        p = {ux(rng), uy(rng)};
      } while (!inside_hexagon(p, radius) || std::hypot(p.x, p.y) < exclusion_radius);
      drop.positions.push_back({bs.x + p.x, bs.y + p.y});
    }
  }
  return drop;
}

double path_gain(double distance_m, double exponent, double reference_distance_m) {
  if (!(distance_m > 0.0)) throw DomainError("path gain needs a strictly positive distance");
  return std::pow(distance_m / reference_distance_m, -exponent);
}

BetaTensor compute_beta(const Layout& layout, const UserDrop& drop, const PathLossModel& model,
                        Rng& rng) {
  if (!(model.exponent > 2.0)) throw DomainError("path-loss exponent must exceed 2");
  if (!(model.shadow_sigma_db >= 0.0)) throw DomainError("shadowing deviation must be >= 0");
  if (drop.cells != layout.cells()) throw ContractViolation("drop and layout disagree on cell count");

  const std::size_t cells = layout.cells();
  BetaTensor beta(cells, drop.users);
  for (std::size_t bs = 0; bs < cells; ++bs) {
    for (std::size_t k = 0; k < drop.users; ++k) {
      for (std::size_t j = 0; j < cells; ++j) {
        const double d = distance(layout.bs_positions[bs], drop.at(j, k));
        const double shadow_db = model.shadow_sigma_db * standard_normal(rng);
        beta(bs, k, j) = std::pow(10.0, shadow_db / 10.0) *
                         path_gain(d, model.exponent, model.reference_distance_m);
      }
    }
  }
  return beta;
}

void write_layout_csv(std::ostream& out, const Layout& layout) {
  out << "cell,x,y\n";
  for (std::size_t j = 0; j < layout.cells(); ++j) {
    fmt::print(out, "{},{:.6f},{:.6f}\n", j, layout.bs_positions[j].x, layout.bs_positions[j].y);
  }
}

void write_drop_csv(std::ostream& out, const UserDrop& drop) {
  out << "cell,user,x,y\n";
  for (std::size_t j = 0; j < drop.cells; ++j) {
    for (std::size_t k = 0; k < drop.users; ++k) {
      fmt::print(out, "{},{},{:.6f},{:.6f}\n", j, k, drop.at(j, k).x, drop.at(j, k).y);
    }
  }
}

}  // namespace mmimo
