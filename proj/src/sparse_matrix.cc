#include <hyperfree/flops.h>
#include <hyperfree/sparse_matrix.h>

#include <algorithm>
#include <stdexcept>
#include <string>

namespace hyperfree
{
SparseMatrix::SparseMatrix(const std::vector<std::vector<std::uint32_t>> &pattern,
                           const std::size_t                                n_columns)
  : n_columns_(n_columns == 0 ? pattern.size() : n_columns)
{
  row_start_.resize(pattern.size() + 1, 0);
  for (std::size_t i = 0; i < pattern.size(); ++i)
    row_start_[i + 1] = row_start_[i] + pattern[i].size();
  columns_.reserve(row_start_.back());
  for (const auto &row : pattern)
    columns_.insert(columns_.end(), row.begin(), row.end());
  for (const auto j : columns_)
    if (j >= n_columns_)
      throw std::invalid_argument("SparseMatrix: column index out of range");
  values_.assign(columns_.size(), 0.0);
}

std::size_t
SparseMatrix::index_of(const std::size_t i, const std::size_t j) const
{
  const auto begin = columns_.begin() + row_start_[i];
  const auto end   = columns_.begin() + row_start_[i + 1];
  const auto it    = std::lower_bound(begin, end, static_cast<std::uint32_t>(j));
  if (it == end || *it != j)
    return static_cast<std::size_t>(-1);
  return static_cast<std::size_t>(it - columns_.begin());
}

void
SparseMatrix::add(const std::size_t i, const std::size_t j, const double value)
{
  const auto k = index_of(i, j);
  if (k == static_cast<std::size_t>(-1))
    throw std::out_of_range("entry (" + std::to_string(i) + ", " + std::to_string(j) +
                            ") not in sparsity pattern");
  values_[k] += value;
}

void
SparseMatrix::set(const std::size_t i, const std::size_t j, const double value)
{
  const auto k = index_of(i, j);
  if (k == static_cast<std::size_t>(-1))
    throw std::out_of_range("entry (" + std::to_string(i) + ", " + std::to_string(j) +
                            ") not in sparsity pattern");
  values_[k] = value;
}

double
SparseMatrix::el(const std::size_t i, const std::size_t j) const
{
  const auto k = index_of(i, j);
  return k == static_cast<std::size_t>(-1) ? 0.0 : values_[k];
}

void
SparseMatrix::vmult(std::span<double> dst, std::span<const double> src) const
{
  const std::size_t n = n_rows();
  for (std::size_t i = 0; i < n; ++i)
    {
      double s = 0.0;
      for (std::size_t k = row_start_[i]; k < row_start_[i + 1]; ++k)
        s += values_[k] * src[columns_[k]];
      dst[i] = s;
    }
  flops::add(2ull * values_.size());
}

void
SparseMatrix::Tvmult(std::span<double> dst, std::span<const double> src) const
{
  std::fill(dst.begin(), dst.end(), 0.0);
  for (std::size_t i = 0; i < n_rows(); ++i)
    for (std::size_t k = row_start_[i]; k < row_start_[i + 1]; ++k)
      dst[columns_[k]] += values_[k] * src[i];
  flops::add(2ull * values_.size());
}

std::vector<double>
SparseMatrix::diagonal() const
{
  std::vector<double> d(n_rows());
  for (std::size_t i = 0; i < d.size(); ++i)
    d[i] = el(i, i);
  return d;
}

} // namespace hyperfree
