#pragma once

#include <span>
#include <vector>

namespace sortline::nn {

/// Dense row-major matrix; one row per sample.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c, double fill = 0.0)
      : rows(r), cols(c), data(static_cast<size_t>(r) * static_cast<size_t>(c), fill) {}

  double& operator()(int r, int c) { return data[static_cast<size_t>(r) * static_cast<size_t>(cols) + static_cast<size_t>(c)]; }
  double operator()(int r, int c) const { return data[static_cast<size_t>(r) * static_cast<size_t>(cols) + static_cast<size_t>(c)]; }

  std::span<double> row(int r) { return {data.data() + static_cast<size_t>(r) * static_cast<size_t>(cols), static_cast<size_t>(cols)}; }
  std::span<const double> row(int r) const { return {data.data() + static_cast<size_t>(r) * static_cast<size_t>(cols), static_cast<size_t>(cols)}; }

  void resize(int r, int c) {
    rows = r;
    cols = c;
    data.assign(static_cast<size_t>(r) * static_cast<size_t>(c), 0.0);
  }

  static Matrix from_row(std::span<const double> v) {
    Matrix m(1, static_cast<int>(v.size()));
    m.data.assign(v.begin(), v.end());
    return m;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

}  // namespace sortline::nn
