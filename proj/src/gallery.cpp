#include "convlab/gallery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "convlab/errors.hpp"
#include "convlab/format.hpp"

namespace convlab {

double ribe(const SparseVector& x) {
  if (x.empty()) return 0.0;
  // Normalizing by the largest magnitude M makes both log arguments invariant
  // under scaling by powers of two, so R(2^j x) = 2^j R(x) bit-exactly. The
  // two log2(M) parts cancel algebraically because the weights sum to S.
  double max_abs = 0;
  for (const auto& [idx, val] : x.entries()) max_abs = std::max(max_abs, std::fabs(val));
  double sum = 0;
  double value = 0;
  for (const auto& [idx, val] : x.entries()) {
    sum += val;
    value += val * std::log2(std::fabs(val) / max_abs);
  }
  if (sum != 0) value -= sum * std::log2(std::fabs(sum) / max_abs);
  return value;
}

namespace {

double kalton_nonneg(std::vector<double> values) {
  std::sort(values.begin(), values.end(), std::greater<double>());
  double out = 0;
  for (std::size_t rank = 0; rank < values.size(); ++rank) {
    out += values[rank] * std::log2(static_cast<double>(rank + 1));
  }
  return out;
}

}  // namespace

double kalton_map(const SparseVector& x) {
  std::vector<double> pos, neg;
  for (const auto& [idx, val] : x.entries()) {
    (val > 0 ? pos : neg).push_back(std::fabs(val));
  }
  return kalton_nonneg(std::move(pos)) - kalton_nonneg(std::move(neg));
}

double entropy_simplex(std::span<const double> x) {
  double out = 0;
  for (double v : x) {
    if (v < 0) throw EvaluationError("entropy evaluated at a negative coordinate");
    if (v > 0) out -= v * std::log2(v);
  }
  return out;
}

int cholewa_kominek_omega(const SparseVector& x) {
  if (x.empty()) throw EvaluationError("omega is undefined at 0");
  if (!x.is_nonnegative()) throw EvaluationError("omega requires a nonnegative vector");
  const double m = x.max_value();
  int n = 0;
  while (m < std::ldexp(1.0, -n)) ++n;
  return n;
}

double neg_log_norm(const SparseVector& x, NormKind norm) {
  if (x.empty()) throw EvaluationError("-log2||x|| is singular at 0");
  return -std::log2(x.norm(norm));
}

double simplex_max_counterexample(std::span<const double> x) {
  double m = 0;
  for (double v : x) m = std::max(m, v);
  if (m <= 0) throw EvaluationError("simplex point must have a positive coordinate");
  return -std::log2(m);
}

FStarConfig FStarConfig::nested() { return FStarConfig{}; }

FStarConfig FStarConfig::blocks(std::vector<int> sizes) {
  FStarConfig cfg;
  cfg.variant = Variant::Blocks;
  cfg.block_sizes = std::move(sizes);
  for (int s : cfg.block_sizes) {
    if (s < 1) throw ParameterError("block sizes must be positive");
  }
  return cfg;
}

double f_star(std::span<const double> x, const FStarConfig& config, int n_max) {
  for (double v : x) {
    if (v < 0 || v > 1) throw EvaluationError("f_star input must have coordinates in [0,1]");
  }
  int last_nonzero = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] != 0) last_nonzero = static_cast<int>(i) + 1;
  }

  double best = 0.0;  // F_n vanishes beyond the support, so the sup is >= 0
  if (config.variant == FStarConfig::Variant::Nested) {
    if (n_max >= 0 && n_max < last_nonzero) {
      throw PreconditionError("n_max must reach the support so the finite max equals the sup");
    }
    const int limit = n_max < 0 ? last_nonzero : std::min<int>(n_max, static_cast<int>(x.size()));
    double prefix_min = std::numeric_limits<double>::infinity();
    for (int n = 1; n <= limit; ++n) {
      prefix_min = std::min(prefix_min, x[n - 1]);
      best = std::max(best, -std::log2(1.0 - config.theta(n) * prefix_min));
    }
  } else {
    const int total_blocks = static_cast<int>(config.block_sizes.size());
    // Last block intersecting the support.
    int needed = 0, start = 0;
    for (int b = 0; b < total_blocks; ++b) {
      if (start < last_nonzero) needed = b + 1;
      start += config.block_sizes[b];
    }
    if (n_max >= 0 && n_max < needed) {
      throw PreconditionError("n_max must reach the last block intersecting the support");
    }
    const int limit = n_max < 0 ? total_blocks : std::min(n_max, total_blocks);
    start = 0;
    for (int b = 0; b < limit; ++b) {
      const int size = config.block_sizes[b];
      double block_min = std::numeric_limits<double>::infinity();
      for (int i = start; i < start + size; ++i) {
        block_min = std::min(block_min, i < static_cast<int>(x.size()) ? x[i] : 0.0);
      }
      best = std::max(best, -std::log2(1.0 - config.theta(size) * block_min));
      start += size;
    }
  }
  return best;
}

GrowthFamily growth_family_from_name(const std::string& name) {
  if (name == "omega") return GrowthFamily::Omega;
  if (name == "entropy") return GrowthFamily::Entropy;
  if (name == "simplex_max") return GrowthFamily::SimplexMax;
  if (name == "fstar") return GrowthFamily::FStar;
  throw ParameterError("unknown growth family '" + name + "' (omega, entropy, simplex_max, fstar)");
}

GrowthReport growth_report(GrowthFamily family, std::span<const int> n_range) {
  GrowthReport report;
  for (int n : n_range) {
    if (n < 1) throw ParameterError("growth table indices must be positive");
    GrowthRow row;
    row.n = n;
    switch (family) {
      case GrowthFamily::Omega: {
        report.family = "omega";
        if (n > 24) throw SizeLimitError("omega flat point would need 2^" + std::to_string(n) + " coordinates");
        const std::int64_t count = std::int64_t{1} << n;
        std::vector<SparseVector::Entry> flat;
        flat.reserve(count);
        for (std::int64_t i = 1; i <= count; ++i) flat.emplace_back(i, std::ldexp(1.0, -n));
        row.flat_value = cholewa_kominek_omega(SparseVector::from_entries(std::move(flat)));
        row.extreme_max = 0;
        for (std::int64_t i = 1; i <= count; ++i) {
          row.extreme_max = std::max(
              row.extreme_max, static_cast<double>(cholewa_kominek_omega(SparseVector::unit(i))));
        }
        row.lower_bound = n;
        break;
      }
      case GrowthFamily::Entropy:
      case GrowthFamily::SimplexMax: {
        const bool entropy = family == GrowthFamily::Entropy;
        report.family = entropy ? "entropy" : "simplex_max";
        std::vector<double> uniform(n, 1.0 / n);
        row.flat_value = entropy ? entropy_simplex(uniform) : simplex_max_counterexample(uniform);
        row.extreme_max = 0;
        std::vector<double> vertex(n, 0.0);
        for (int i = 0; i < n; ++i) {
          vertex[i] = 1.0;
          row.extreme_max = std::max(
              row.extreme_max, entropy ? entropy_simplex(vertex) : simplex_max_counterexample(vertex));
          vertex[i] = 0.0;
        }
        row.lower_bound = std::log2(static_cast<double>(n));
        break;
      }
      case GrowthFamily::FStar: {
        report.family = "fstar";
        const FStarConfig cfg = FStarConfig::blocks({n});
        std::vector<double> flat(n, (n - 1.0) / n);  // average of the q_i
        row.flat_value = f_star(flat, cfg);
        row.extreme_max = 0;
        std::vector<double> q(n, 1.0);
        for (int i = 0; i < n; ++i) {
          q[i] = 0.0;
          row.extreme_max = std::max(row.extreme_max, f_star(q, cfg));
          q[i] = 1.0;
        }
        row.lower_bound = std::log2(static_cast<double>(n)) - 1.0;
        break;
      }
    }
    report.rows.push_back(row);
  }
  return report;
}

std::string GrowthReport::to_csv() const {
  std::ostringstream os;
  os << "n,flat_value,extreme_max,lower_bound\n";
  for (const auto& row : rows) {
    os << row.n << ',' << fmt_g17(row.flat_value) << ',' << fmt_g17(row.extreme_max) << ','
       << fmt_g17(row.lower_bound) << '\n';
  }
  return os.str();
}

std::string GrowthReport::to_dat() const {
  std::ostringstream os;
  os << "# n flat_value extreme_max lower_bound\n";
  for (const auto& row : rows) {
    os << row.n << ' ' << fmt_g17(row.flat_value) << ' ' << fmt_g17(row.extreme_max) << ' '
       << fmt_g17(row.lower_bound) << '\n';
  }
  return os.str();
}

}  // namespace convlab
