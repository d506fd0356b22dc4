#pragma once

#include <cstddef>
#include <numeric>
#include <vector>

#include "mmimo/errors.hpp"

namespace mmimo {

using Permutation = std::vector<std::size_t>;

/// perm[cell][pilot] = index of the user of `cell` that transmits `pilot`.
class PilotAssignment {
 public:
  PilotAssignment() = default;

  static PilotAssignment identity(std::size_t cells, std::size_t users) {
    PilotAssignment a;
    a.perm_.assign(cells, Permutation(users));
    for (auto& p : a.perm_) std::iota(p.begin(), p.end(), std::size_t{0});
    return a;
  }

  std::size_t cells() const noexcept { return perm_.size(); }
  std::size_t users() const noexcept { return perm_.empty() ? 0 : perm_.front().size(); }

  std::size_t user(std::size_t cell, std::size_t pilot) const { return perm_[cell][pilot]; }

  /// Inverse lookup: which pilot the user holds.
  std::size_t pilot_of(std::size_t cell, std::size_t user) const {
    const auto& p = perm_[cell];
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (p[k] == user) return k;
    }
    throw ContractViolation("user holds no pilot");
  }

  const Permutation& cell(std::size_t cell) const { return perm_[cell]; }

  void set_cell(std::size_t cell, Permutation perm) {
    if (cell >= perm_.size()) throw ContractViolation("cell index out of range");
    if (!is_permutation(perm, users())) throw ContractViolation("not a permutation of 0..K-1");
    perm_[cell] = std::move(perm);
  }

  bool valid() const {
    for (const auto& p : perm_) {
      if (!is_permutation(p, users())) return false;
    }
    return true;
  }

  static bool is_permutation(const Permutation& p, std::size_t n) {
    if (p.size() != n) return false;
    std::vector<bool> seen(n, false);
    for (std::size_t v : p) {
      if (v >= n || seen[v]) return false;
      seen[v] = true;
    }
    return true;
  }

  friend bool operator==(const PilotAssignment&, const PilotAssignment&) = default;

 private:
  std::vector<Permutation> perm_;
};

}  // namespace mmimo
