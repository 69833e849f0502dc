#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace hyperfree
{
/// Compressed sparse row matrix with a fixed pattern.
class SparseMatrix
{
public:
  SparseMatrix() = default;

  /// `pattern[i]` must be sorted and unique. Square unless n_columns is given.
  explicit SparseMatrix(const std::vector<std::vector<std::uint32_t>> &pattern,
                        std::size_t                                     n_columns = 0);

  std::size_t n_rows() const { return row_start_.empty() ? 0 : row_start_.size() - 1; }
  std::size_t n_columns() const { return n_columns_; }
  std::size_t n_nonzeros() const { return columns_.size(); }

  /// Adds to an existing entry; throws std::out_of_range if (i, j) is not in
  /// the pattern.
  void add(std::size_t i, std::size_t j, double value);
  void set(std::size_t i, std::size_t j, double value);

  /// Entry (i, j), zero if outside the pattern.
  double el(std::size_t i, std::size_t j) const;

  void vmult(std::span<double> dst, std::span<const double> src) const;

  /// dst = A^T src
  void Tvmult(std::span<double> dst, std::span<const double> src) const;

  std::vector<double> diagonal() const;

  std::size_t memory_bytes() const
  {
    return row_start_.size() * sizeof(std::size_t) + columns_.size() * sizeof(std::uint32_t) +
           values_.size() * sizeof(double);
  }

  std::span<const std::size_t>   row_start() const { return row_start_; }
  std::span<const std::uint32_t> columns() const { return columns_; }
  std::span<const double>        values() const { return values_; }

private:
  std::size_t index_of(std::size_t i, std::size_t j) const;

  std::size_t                n_columns_ = 0;
  std::vector<std::size_t>   row_start_;
  std::vector<std::uint32_t> columns_;
  std::vector<double>        values_;
};

} // namespace hyperfree
