#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace convlab {

enum class NormKind { Sup, L1, L2 };

std::string norm_kind_name(NormKind kind);
NormKind norm_kind_from_name(const std::string& name);

/// Finitely supported sequence: ordered (index, value) entries with strictly
/// increasing positive indices and nonzero values.
class SparseVector {
 public:
  using Entry = std::pair<std::int64_t, double>;

  SparseVector() = default;

  /// Normalizes: sorts by index, merges duplicates, drops zeros.
  static SparseVector from_entries(std::vector<Entry> entries);
  static SparseVector from_dense(std::span<const double> values);  // indices 1..n
  static SparseVector unit(std::int64_t index);                    // e_index

  std::span<const Entry> entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t support_size() const { return entries_.size(); }
  std::int64_t max_index() const { return entries_.empty() ? 0 : entries_.back().first; }

  double operator[](std::int64_t index) const;

  SparseVector operator+(const SparseVector& other) const;
  SparseVector operator-() const;
  SparseVector scaled(double t) const;
  SparseVector positive_part() const;
  SparseVector negative_part() const;  // so that x = positive_part() - negative_part()

  double sum() const;
  double norm(NormKind kind) const;
  double max_value() const;  // largest entry value (0 for empty)
  bool is_nonnegative() const;

  /// t*x + (1-t)*y.
  static SparseVector combine(const SparseVector& x, const SparseVector& y, double t);

  bool operator==(const SparseVector& other) const = default;

 private:
  std::vector<Entry> entries_;
};

}  // namespace convlab
