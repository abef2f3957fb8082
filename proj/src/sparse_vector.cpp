#include "convlab/sparse_vector.hpp"

#include <algorithm>
#include <cmath>

#include "convlab/errors.hpp"

namespace convlab {

std::string norm_kind_name(NormKind kind) {
  switch (kind) {
    case NormKind::Sup: return "sup";
    case NormKind::L1: return "l1";
    case NormKind::L2: return "l2";
  }
  throw ParameterError("unknown norm kind");
}

NormKind norm_kind_from_name(const std::string& name) {
  if (name == "sup") return NormKind::Sup;
  if (name == "l1") return NormKind::L1;
  if (name == "l2") return NormKind::L2;
  throw ParameterError("unknown norm '" + name + "'");
}

SparseVector SparseVector::from_entries(std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.first < b.first; });
  SparseVector v;
  for (const auto& [idx, val] : entries) {
    if (idx < 1) throw ParameterError("sparse index must be positive");
    if (!v.entries_.empty() && v.entries_.back().first == idx) {
      v.entries_.back().second += val;
      if (v.entries_.back().second == 0) v.entries_.pop_back();
    } else if (val != 0) {
      v.entries_.emplace_back(idx, val);
    }
  }
  return v;
}

SparseVector SparseVector::from_dense(std::span<const double> values) {
  SparseVector v;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] != 0) v.entries_.emplace_back(static_cast<std::int64_t>(i) + 1, values[i]);
  }
  return v;
}

SparseVector SparseVector::unit(std::int64_t index) {
  return from_entries({{index, 1.0}});
}

double SparseVector::operator[](std::int64_t index) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), index,
                             [](const Entry& e, std::int64_t i) { return e.first < i; });
  return (it != entries_.end() && it->first == index) ? it->second : 0.0;
}

SparseVector SparseVector::operator+(const SparseVector& other) const {
  SparseVector out;
  std::size_t a = 0, b = 0;
  while (a < entries_.size() || b < other.entries_.size()) {
    if (b == other.entries_.size() ||
        (a < entries_.size() && entries_[a].first < other.entries_[b].first)) {
      out.entries_.push_back(entries_[a++]);
    } else if (a == entries_.size() || other.entries_[b].first < entries_[a].first) {
      out.entries_.push_back(other.entries_[b++]);
    } else {
      const double v = entries_[a].second + other.entries_[b].second;
      if (v != 0) out.entries_.emplace_back(entries_[a].first, v);
      ++a;
      ++b;
    }
  }
  return out;
}

SparseVector SparseVector::operator-() const {
  SparseVector out = *this;
  for (auto& [idx, val] : out.entries_) val = -val;
  return out;
}

SparseVector SparseVector::scaled(double t) const {
  if (t == 0) return {};
  SparseVector out = *this;
  for (auto& [idx, val] : out.entries_) val *= t;
  return out;
}

SparseVector SparseVector::positive_part() const {
  SparseVector out;
  for (const auto& [idx, val] : entries_) {
    if (val > 0) out.entries_.emplace_back(idx, val);
  }
  return out;
}

SparseVector SparseVector::negative_part() const {
  SparseVector out;
  for (const auto& [idx, val] : entries_) {
    if (val < 0) out.entries_.emplace_back(idx, -val);
  }
  return out;
}

double SparseVector::sum() const {
  double s = 0;
  for (const auto& [idx, val] : entries_) s += val;
  return s;
}

double SparseVector::norm(NormKind kind) const {
  double s = 0;
  switch (kind) {
    case NormKind::Sup:
      for (const auto& [idx, val] : entries_) s = std::max(s, std::fabs(val));
      return s;
    case NormKind::L1:
      for (const auto& [idx, val] : entries_) s += std::fabs(val);
      return s;
    case NormKind::L2:
      for (const auto& [idx, val] : entries_) s += val * val;
      return std::sqrt(s);
  }
  return s;
}

double SparseVector::max_value() const {
  double s = 0;
  for (const auto& [idx, val] : entries_) s = std::max(s, val);
  return s;
}

bool SparseVector::is_nonnegative() const {
  for (const auto& [idx, val] : entries_) {
    if (val < 0) return false;
  }
  return true;
}

SparseVector SparseVector::combine(const SparseVector& x, const SparseVector& y, double t) {
  return x.scaled(t) + y.scaled(1.0 - t);
}

}  // namespace convlab
