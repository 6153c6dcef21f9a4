#pragma once
#include <cstddef>
#include <vector>

namespace techmap {

// Dense square matrix, row-major.
template <typename T>
class Grid {
  public:
    Grid() = default;
    explicit Grid(std::size_t n, T init = T{}) : n_(n), cells_(n * n, init) {}

    std::size_t size() const { return n_; }
    T& at(std::size_t i, std::size_t j) { return cells_[i * n_ + j]; }
    const T& at(std::size_t i, std::size_t j) const { return cells_[i * n_ + j]; }

    void set_symmetric(std::size_t i, std::size_t j, T value) {
        at(i, j) = value;
        at(j, i) = value;
    }
    void add_symmetric(std::size_t i, std::size_t j, T value) {
        at(i, j) += value;
        if (i != j) at(j, i) += value;
    }

    const std::vector<T>& cells() const { return cells_; }
    bool operator==(const Grid&) const = default;

  private:
    std::size_t n_ = 0;
    std::vector<T> cells_;
};

}  // namespace techmap
