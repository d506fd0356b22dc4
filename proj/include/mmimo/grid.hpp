#pragma once

#include <cstddef>
#include <vector>

#include "mmimo/errors.hpp"

namespace mmimo {

// Dense (cell, user) table. Row = cell, column = user within the cell.
template <class T>
class CellGrid {
 public:
  CellGrid() = default;
  CellGrid(std::size_t cells, std::size_t users, T fill = T{})
      : cells_(cells), users_(users), data_(cells * users, fill) {}

  std::size_t cells() const noexcept { return cells_; }
  std::size_t users() const noexcept { return users_; }
  std::size_t size() const noexcept { return data_.size(); }

  T& operator()(std::size_t cell, std::size_t user) { return data_[cell * users_ + user]; }
  const T& operator()(std::size_t cell, std::size_t user) const {
    return data_[cell * users_ + user];
  }

  T& at(std::size_t cell, std::size_t user) {
    check(cell, user);
    return (*this)(cell, user);
  }
  const T& at(std::size_t cell, std::size_t user) const {
    check(cell, user);
    return (*this)(cell, user);
  }

  std::vector<T>& data() noexcept { return data_; }
  const std::vector<T>& data() const noexcept { return data_; }

  bool same_shape(const CellGrid& other) const noexcept {
    return cells_ == other.cells_ && users_ == other.users_;
  }

  friend bool operator==(const CellGrid&, const CellGrid&) = default;

 private:
  void check(std::size_t cell, std::size_t user) const {
    if (cell >= cells_ || user >= users_) {
      throw ContractViolation("CellGrid index out of range");
    }
  }

  std::size_t cells_ = 0;
  std::size_t users_ = 0;
  std::vector<T> data_;
};

}  // namespace mmimo
