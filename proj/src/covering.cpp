#include "convlab/covering.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "convlab/errors.hpp"
#include "convlab/format.hpp"

namespace convlab {

namespace {

std::size_t binomial_or_throw(int n, int k, std::size_t cap) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::size_t r = 1;
  for (int i = 1; i <= k; ++i) {
    const double projected = static_cast<double>(r) * (n - k + i) / i;
    if (projected > static_cast<double>(cap) * 64) {
      throw SizeLimitError("binomial blows past the enumeration cap");
    }
    r = r * static_cast<std::size_t>(n - k + i) / static_cast<std::size_t>(i);
  }
  return r;
}

}  // namespace

CoveringSystem::CoveringSystem(const Rational& eps, int n, std::size_t max_omega) : eps_(eps), n_(n) {
  if (n < 1) throw ParameterError("n must be positive");
  if (eps <= 0) throw ParameterError("eps must be positive");
  const Rational m_rat = (Rational(1) + eps) * n;
  if (denominator(m_rat) != 1) {
    throw ParameterError("(1+eps)*n = " + rational_to_string(m_rat) + " is not an integer");
  }
  const BigInt m_big = numerator(m_rat);
  if (m_big > 62) throw SizeLimitError("ground set larger than 62 elements");
  m_ = m_big.convert_to<int>();
  const std::size_t count = binomial_or_throw(m_, n_, max_omega);
  if (count > max_omega) {
    throw SizeLimitError("|Omega| = " + std::to_string(count) + " exceeds cap " + std::to_string(max_omega));
  }

  // n-subsets of {1..m} in lexicographic order of their sorted element lists.
  std::vector<int> pick(n_);
  for (int i = 0; i < n_; ++i) pick[i] = i + 1;
  for (;;) {
    std::uint64_t mask = 0;
    for (int v : pick) mask |= std::uint64_t{1} << (v - 1);
    omega_.push_back(mask);
    int i = n_ - 1;
    while (i >= 0 && pick[i] == m_ - n_ + 1 + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int j = i + 1; j < n_; ++j) pick[j] = pick[j - 1] + 1;
  }
  if (omega_.size() != count) throw SolverError("internal: subset enumeration count mismatch");

  // Construction-time identities: every omega has n elements and every
  // element sits in the same number C(m-1, n-1) of sets.
  std::vector<std::size_t> a_count(m_, 0);
  for (std::uint64_t mask : omega_) {
    if (std::popcount(mask) != n_) throw SolverError("internal: omega of wrong cardinality");
    for (int i = 1; i <= m_; ++i) {
      if ((mask >> (i - 1)) & 1) ++a_count[i - 1];
    }
  }
  const std::size_t expected = binomial_or_throw(m_ - 1, n_ - 1, max_omega);
  for (int i = 0; i < m_; ++i) {
    if (a_count[i] != expected) throw SolverError("internal: |A_i| mismatch");
  }
}

std::vector<int> CoveringSystem::omega_elements(std::size_t w) const {
  std::vector<int> out;
  for (int i = 1; i <= m_; ++i) {
    if (in_A(i, w)) out.push_back(i);
  }
  return out;
}

std::size_t CoveringSystem::a_size() const { return binomial_or_throw(m_ - 1, n_ - 1, 1'000'000); }

std::string CoveringSystem::to_json() const {
  nlohmann::json j;
  j["eps"] = rational_to_string(eps_);
  j["n"] = n_;
  return j.dump();
}

CoveringSystem CoveringSystem::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  return CoveringSystem(rational_from_string(j.at("eps").get<std::string>()), j.at("n").get<int>());
}

SmallUnionReport verify_small_union(const CoveringSystem& cs, std::size_t max_sets) {
  const int m = cs.m();
  const BigInt eps_n_big = numerator(Rational(cs.eps() * cs.n()));  // integral because (1+eps)n is
  const int eps_n = eps_n_big.convert_to<int>();
  SmallUnionReport report;
  report.passed = true;

  // All J with |J| <= eps*n, smallest first.
  std::vector<std::uint64_t> js;
  js.push_back(0);
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << m); ++mask) {
    if (std::popcount(mask) <= eps_n) js.push_back(mask);
    if (js.size() > max_sets) throw SizeLimitError("small-union scan exceeds cap");
  }
  std::sort(js.begin(), js.end(), [](std::uint64_t a, std::uint64_t b) {
    return std::pair(std::popcount(a), a) < std::pair(std::popcount(b), b);
  });

  for (std::uint64_t j_mask : js) {
    // The witness from the proof: any omega disjoint from J. It exists
    // because |S \ J| >= m - eps n = n.
    std::size_t witness = cs.omega_size();
    for (std::size_t w = 0; w < cs.omega_size(); ++w) {
      if ((cs.omega_mask(w) & j_mask) == 0) {
        witness = w;
        break;
      }
    }
    if (witness == cs.omega_size()) {
      report.passed = false;  // J covers Omega: the lemma failed
      continue;
    }
    SmallUnionEntry entry;
    entry.witness_omega = witness;
    for (int i = 1; i <= m; ++i) {
      if ((j_mask >> (i - 1)) & 1) entry.J.push_back(i);
    }
    report.entries.push_back(std::move(entry));
  }
  report.sets_checked = js.size();
  return report;
}

PartitionSumReport verify_partition_sum(const CoveringSystem& cs) {
  PartitionSumReport report;
  report.expected = cs.n();
  report.passed = true;
  for (std::size_t w = 0; w < cs.omega_size(); ++w) {
    int sum = 0;
    for (int i = 1; i <= cs.m(); ++i) sum += cs.in_A(i, w) ? 1 : 0;
    if (sum != cs.n()) report.passed = false;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Exact vertex enumeration via double description on the homogenized cone
//   { (c, s) >= 0 : sum_{i in omega} c_i >= f_omega s }.
// Rays are integer vectors; tight sets are tracked as bitsets so degenerate
// vertices survive. Vertices of the polyhedron are the rays with s > 0.
// ---------------------------------------------------------------------------

namespace {

struct Ray {
  std::vector<BigInt> z;               // length m+1, gcd-normalized
  std::vector<std::uint64_t> tight;    // bit per constraint row
};

struct ConeRows {
  // Row r, applied to z: sum_j coeff[r][j] * z_j >= 0.
  std::vector<std::vector<BigInt>> coeff;
};

bool tight_subset(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
  for (std::size_t w = 0; w < a.size(); ++w) {
    if ((a[w] & b[w]) != a[w]) return false;
  }
  return true;
}

int tight_popcount(const std::vector<std::uint64_t>& a) {
  int c = 0;
  for (auto w : a) c += std::popcount(w);
  return c;
}

void normalize_ray(Ray& ray) {
  BigInt g = 0;
  for (const auto& v : ray.z) g = boost::multiprecision::gcd(g, v);
  if (g > 1) {
    for (auto& v : ray.z) v /= g;
  }
}

BigInt row_dot(const std::vector<BigInt>& row, const std::vector<BigInt>& z) {
  BigInt out = 0;
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (row[j] != 0) out += row[j] * z[j];
  }
  return out;
}

}  // namespace

std::vector<std::vector<Rational>> covering_polyhedron_vertices(const CoveringSystem& cs,
                                                                std::span<const Rational> f) {
  if (f.size() != cs.omega_size()) throw ParameterError("f must have one value per omega");
  const int m = cs.m();
  const int dim = m + 1;
  const std::size_t orthant_rows = static_cast<std::size_t>(dim);
  const std::size_t total_rows = orthant_rows + cs.omega_size();
  const std::size_t words = (total_rows + 63) / 64;
  constexpr std::size_t kRayCap = 200'000;

  ConeRows rows;
  rows.coeff.resize(total_rows, std::vector<BigInt>(dim, 0));
  for (int j = 0; j < dim; ++j) rows.coeff[j][j] = 1;
  for (std::size_t w = 0; w < cs.omega_size(); ++w) {
    const Rational mag = abs(f[w]);
    const BigInt den = denominator(mag);
    const BigInt num = numerator(mag);
    auto& row = rows.coeff[orthant_rows + w];
    for (int i = 1; i <= m; ++i) {
      if (cs.in_A(i, w)) row[i - 1] = den;
    }
    row[m] = -num;
  }

  auto compute_tight = [&](Ray& ray, std::size_t processed) {
    ray.tight.assign(words, 0);
    for (std::size_t r = 0; r < processed; ++r) {
      if (row_dot(rows.coeff[r], ray.z) == 0) ray.tight[r / 64] |= std::uint64_t{1} << (r % 64);
    }
  };

  // Start from the nonnegative orthant, whose extreme rays are the axes.
  std::vector<Ray> rays(dim);
  for (int j = 0; j < dim; ++j) {
    rays[j].z.assign(dim, 0);
    rays[j].z[j] = 1;
    compute_tight(rays[j], orthant_rows);
  }

  for (std::size_t w = 0; w < cs.omega_size(); ++w) {
    const std::size_t r = orthant_rows + w;
    std::vector<BigInt> vals(rays.size());
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < rays.size(); ++i) {
      vals[i] = row_dot(rows.coeff[r], rays[i].z);
      if (vals[i] > 0) {
        pos.push_back(i);
      } else if (vals[i] < 0) {
        neg.push_back(i);
      } else {
        rays[i].tight[r / 64] |= std::uint64_t{1} << (r % 64);
      }
    }
    if (neg.empty()) continue;

    // New rays from adjacent (+,-) pairs land on the hyperplane.
    std::vector<Ray> created;
    std::vector<std::uint64_t> meet(words);
    for (std::size_t pi : pos) {
      for (std::size_t ni : neg) {
        for (std::size_t wd = 0; wd < words; ++wd) meet[wd] = rays[pi].tight[wd] & rays[ni].tight[wd];
        if (tight_popcount(meet) < dim - 2) continue;  // cannot span an edge
        bool adjacent = true;
        for (std::size_t q = 0; q < rays.size() && adjacent; ++q) {
          if (q == pi || q == ni) continue;
          if (tight_subset(meet, rays[q].tight)) adjacent = false;
        }
        if (!adjacent) continue;
        Ray fresh;
        fresh.z.resize(dim);
        for (int j = 0; j < dim; ++j) {
          fresh.z[j] = vals[pi] * rays[ni].z[j] - vals[ni] * rays[pi].z[j];
        }
        normalize_ray(fresh);
        compute_tight(fresh, r + 1);
        created.push_back(std::move(fresh));
        if (rays.size() + created.size() > kRayCap) {
          throw SizeLimitError("double description ray cap exceeded");
        }
      }
    }
    std::vector<Ray> next;
    next.reserve(rays.size() + created.size());
    for (std::size_t i = 0; i < rays.size(); ++i) {
      if (vals[i] >= 0) next.push_back(std::move(rays[i]));
    }
    for (auto& fresh : created) next.push_back(std::move(fresh));
    rays = std::move(next);
  }

  std::vector<std::vector<Rational>> vertices;
  std::size_t recession = 0;
  for (const auto& ray : rays) {
    if (ray.z[m] == 0) {
      ++recession;
      continue;
    }
    std::vector<Rational> c(m);
    for (int j = 0; j < m; ++j) c[j] = Rational(ray.z[j], ray.z[m]);
    vertices.push_back(std::move(c));
  }
  // The recession cone is exactly the nonnegative orthant in c-space.
  if (recession != static_cast<std::size_t>(m)) {
    throw SolverError("internal: unexpected recession rays in vertex enumeration");
  }
  return vertices;
}

namespace {

double objective_value(std::span<const Rational> c, double p) {
  double sum = 0;
  for (const auto& v : c) {
    if (v != 0) sum += std::pow(to_double(v), p);
  }
  return sum == 0 ? 0.0 : std::pow(sum, 1.0 / p);
}

bool lex_less(std::span<const Rational> a, std::span<const Rational> b) {
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return a.size() < b.size();
}

QuasiNormCertificate make_certificate(const CoveringSystem& cs, std::span<const Rational> f,
                                      const Rational& p, std::vector<Rational> c, double objective,
                                      std::size_t vertex_count) {
  QuasiNormCertificate cert;
  cert.p = p;
  cert.objective = objective;
  cert.vertex_count = vertex_count;
  for (std::size_t w = 0; w < cs.omega_size(); ++w) {
    Rational sum = 0;
    for (int i = 1; i <= cs.m(); ++i) {
      if (cs.in_A(i, w)) sum += c[i - 1];
    }
    if (sum == abs(f[w])) cert.active_omegas.push_back(w);
  }
  cert.c = std::move(c);
  return cert;
}

void check_p(const Rational& p) {
  if (p <= 0 || p > 1) throw ParameterError("p must lie in (0, 1]");
}

}  // namespace

bool certificate_feasible(const CoveringSystem& cs, const QuasiNormCertificate& cert,
                          std::span<const Rational> f) {
  if (cert.c.size() != static_cast<std::size_t>(cs.m())) return false;
  for (const auto& v : cert.c) {
    if (v < 0) return false;
  }
  for (std::size_t w = 0; w < cs.omega_size(); ++w) {
    Rational sum = 0;
    for (int i = 1; i <= cs.m(); ++i) {
      if (cs.in_A(i, w)) sum += cert.c[i - 1];
    }
    if (sum < abs(f[w])) return false;
  }
  return true;
}

QuasiNormCertificate quasi_norm(const CoveringSystem& cs, std::span<const Rational> f, const Rational& p) {
  check_p(p);
  if (f.size() != cs.omega_size()) throw ParameterError("f must have one value per omega");
  const bool all_zero = std::all_of(f.begin(), f.end(), [](const Rational& v) { return v == 0; });
  if (all_zero) {
    return make_certificate(cs, f, p, std::vector<Rational>(cs.m(), 0), 0.0, 1);
  }
  const auto vertices = covering_polyhedron_vertices(cs, f);
  if (vertices.empty()) throw SolverError("internal: covering polyhedron has no vertex");
  const double pd = to_double(p);
  double best = 0;
  const std::vector<Rational>* best_c = nullptr;
  for (const auto& v : vertices) {
    const double obj = objective_value(v, pd);
    if (!best_c) {
      best = obj;
      best_c = &v;
      continue;
    }
    const double tol = 1e-12 * std::max(1.0, std::fabs(best));
    if (obj < best - tol) {
      best = obj;
      best_c = &v;
    } else if (obj <= best + tol && lex_less(v, *best_c)) {
      best_c = &v;
    }
  }
  return make_certificate(cs, f, p, *best_c, best, vertices.size());
}

// ---------------------------------------------------------------------------
// Support-pattern brute force (oracle for small m).
// ---------------------------------------------------------------------------

namespace {

/// Solves the square rational system M x = rhs by Gauss elimination.
/// Returns false when singular.
bool solve_square(std::vector<std::vector<Rational>> mat, std::vector<Rational> rhs,
                  std::vector<Rational>& out) {
  const std::size_t n = mat.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && mat[pivot][col] == 0) ++pivot;
    if (pivot == n) return false;
    std::swap(mat[col], mat[pivot]);
    std::swap(rhs[col], rhs[pivot]);
    const Rational inv = mat[col][col];
    for (std::size_t j = col; j < n; ++j) mat[col][j] /= inv;
    rhs[col] /= inv;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == col || mat[i][col] == 0) continue;
      const Rational factor = mat[i][col];
      for (std::size_t j = col; j < n; ++j) mat[i][j] -= factor * mat[col][j];
      rhs[i] -= factor * rhs[col];
    }
  }
  out = std::move(rhs);
  return true;
}

}  // namespace

BruteForceResult brute_force_quasi_norm(const CoveringSystem& cs, std::span<const Rational> f,
                                        const Rational& p) {
  check_p(p);
  const int m = cs.m();
  if (m > 10) throw ParameterError("support-pattern brute force is intended for small systems");
  const std::size_t omega = cs.omega_size();
  const double pd = to_double(p);

  std::map<std::vector<Rational>, bool> seen;
  auto feasible = [&](const std::vector<Rational>& c) {
    for (std::size_t w = 0; w < omega; ++w) {
      Rational sum = 0;
      for (int i = 1; i <= m; ++i) {
        if (cs.in_A(i, w)) sum += c[i - 1];
      }
      if (sum < abs(f[w])) return false;
    }
    return true;
  };

  const std::vector<Rational> zero(m, 0);
  if (feasible(zero)) seen.emplace(zero, true);

  for (std::uint64_t t_mask = 1; t_mask < (std::uint64_t{1} << m); ++t_mask) {
    std::vector<int> support;
    for (int i = 0; i < m; ++i) {
      if ((t_mask >> i) & 1) support.push_back(i);
    }
    const std::size_t t = support.size();
    if (t > omega) continue;
    std::vector<std::size_t> pick(t);
    for (std::size_t i = 0; i < t; ++i) pick[i] = i;
    for (;;) {
      std::vector<std::vector<Rational>> mat(t, std::vector<Rational>(t));
      std::vector<Rational> rhs(t);
      for (std::size_t row = 0; row < t; ++row) {
        const std::size_t w = pick[row];
        for (std::size_t colv = 0; colv < t; ++colv) {
          mat[row][colv] = cs.in_A(support[colv] + 1, w) ? 1 : 0;
        }
        rhs[row] = abs(f[w]);
      }
      std::vector<Rational> solved;
      if (solve_square(std::move(mat), std::move(rhs), solved)) {
        bool nonneg = true;
        for (const auto& v : solved) {
          if (v < 0) {
            nonneg = false;
            break;
          }
        }
        if (nonneg) {
          std::vector<Rational> c(m, 0);
          for (std::size_t i = 0; i < t; ++i) c[support[i]] = solved[i];
          if (feasible(c)) seen.emplace(std::move(c), true);
        }
      }
      // next |t|-subset of rows
      std::size_t i = t;
      while (i > 0 && pick[i - 1] == omega - t + (i - 1)) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < t; ++j) pick[j] = pick[j - 1] + 1;
    }
  }

  BruteForceResult result;
  double best = 0;
  const std::vector<Rational>* best_c = nullptr;
  for (const auto& [c, ignored] : seen) {
    result.vertices.push_back(c);
  }
  for (const auto& v : result.vertices) {
    const double obj = objective_value(v, pd);
    if (!best_c) {
      best = obj;
      best_c = &v;
      continue;
    }
    const double tol = 1e-12 * std::max(1.0, std::fabs(best));
    if (obj < best - tol) {
      best = obj;
      best_c = &v;
    } else if (obj <= best + tol && lex_less(v, *best_c)) {
      best_c = &v;
    }
  }
  if (!best_c) throw SolverError("brute force found no feasible basic solution");
  result.best = make_certificate(cs, f, p, *best_c, best, result.vertices.size());
  return result;
}

double quasi_norm_lower_bound(const CoveringSystem& cs, const Rational& p) {
  check_p(p);
  const double pd = to_double(p);
  const double n = cs.n();
  const double eps = to_double(cs.eps());
  return std::pow(n, 1.0 / pd - 1.0) * std::pow(eps, 1.0 / pd) / (1.0 + eps);
}

bool counting_bound_holds(const CoveringSystem& cs, std::span<const Rational> c) {
  const Rational threshold(1, cs.m());
  int count = 0;
  for (const auto& v : c) {
    if (v >= threshold) ++count;
  }
  const BigInt eps_n = numerator(Rational(cs.eps() * cs.n()));
  return BigInt(count) > eps_n;
}

Rational dual_norm(const CoveringSystem& cs, std::span<const Rational> g) {
  if (g.size() != cs.omega_size()) throw ParameterError("g must have one value per omega");
  Rational best = 0;
  for (int i = 1; i <= cs.m(); ++i) {
    Rational sum = 0;
    for (std::size_t w = 0; w < cs.omega_size(); ++w) {
      if (cs.in_A(i, w)) sum += abs(g[w]);
    }
    best = std::max(best, sum);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Exact rational simplex for the envelope LP (slack basis is feasible).
// ---------------------------------------------------------------------------

namespace {

Rational rational_simplex_max(const std::vector<std::vector<Rational>>& A, const std::vector<Rational>& b,
                              const std::vector<Rational>& c) {
  const std::size_t m = A.size();
  const std::size_t nv = c.size();
  const std::size_t total = nv + m;
  std::vector<std::vector<Rational>> tab(m + 1, std::vector<Rational>(total + 1, 0));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (b[i] < 0) throw ParameterError("rational simplex needs b >= 0");
    for (std::size_t j = 0; j < nv; ++j) tab[i][j] = A[i][j];
    tab[i][nv + i] = 1;
    tab[i][total] = b[i];
    basis[i] = nv + i;
  }
  for (std::size_t j = 0; j < nv; ++j) tab[m][j] = -c[j];

  for (long guard = 0; guard < 1'000'000; ++guard) {
    // Bland: smallest improving column.
    std::size_t s = total;
    for (std::size_t j = 0; j < total; ++j) {
      if (tab[m][j] < 0) {
        s = j;
        break;
      }
    }
    if (s == total) return tab[m][total];
    std::size_t r = m;
    Rational best_ratio = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (tab[i][s] <= 0) continue;
      const Rational ratio = tab[i][total] / tab[i][s];
      if (r == m || ratio < best_ratio || (ratio == best_ratio && basis[i] < basis[r])) {
        r = i;
        best_ratio = ratio;
      }
    }
    if (r == m) throw SolverError("envelope LP is unbounded (dual ball degenerate)");
    const Rational inv = tab[r][s];
    for (auto& v : tab[r]) v /= inv;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == r || tab[i][s] == 0) continue;
      const Rational factor = tab[i][s];
      for (std::size_t j = 0; j <= total; ++j) tab[i][j] -= factor * tab[r][j];
    }
    basis[r] = s;
  }
  throw SolverError("rational simplex iteration guard tripped");
}

}  // namespace

Rational envelope_norm(const CoveringSystem& cs, std::span<const Rational> f) {
  if (f.size() != cs.omega_size()) throw ParameterError("f must have one value per omega");
  const std::size_t omega = cs.omega_size();
  const std::size_t m = static_cast<std::size_t>(cs.m());
  // max f'(u - v) subject to, per i: sum_{omega in A_i} (u + v) <= 1; u, v >= 0.
  std::vector<std::vector<Rational>> A(m, std::vector<Rational>(2 * omega, 0));
  std::vector<Rational> b(m, 1);
  std::vector<Rational> c(2 * omega);
  for (std::size_t w = 0; w < omega; ++w) {
    c[w] = f[w];
    c[omega + w] = -f[w];
    for (std::size_t i = 1; i <= m; ++i) {
      if (cs.in_A(static_cast<int>(i), w)) {
        A[i - 1][w] = 1;
        A[i - 1][omega + w] = 1;
      }
    }
  }
  return rational_simplex_max(A, b, c);
}

EnvelopeGapReport envelope_gap_report(const Rational& eps, std::span<const int> n_list, const Rational& p) {
  check_p(p);
  EnvelopeGapReport report;
  report.eps = eps;
  report.p = p;
  report.passed = true;
  const double pd = to_double(p);
  const double epsd = to_double(eps);
  for (int n : n_list) {
    const CoveringSystem cs(eps, n);
    const std::vector<Rational> ones(cs.omega_size(), 1);
    const auto cert = quasi_norm(cs, ones, p);
    const Rational env = envelope_norm(cs, ones);
    EnvelopeGapRow row;
    row.n = n;
    row.quasi_norm_value = cert.objective;
    row.lower_bound = quasi_norm_lower_bound(cs, p);
    row.envelope_value = to_double(env);
    row.ratio = row.quasi_norm_value / row.envelope_value;
    row.ratio_bound = std::pow(n, 1.0 / pd - 1.0) * std::pow(epsd, 1.0 / pd) / ((1.0 + epsd) * (1.0 + epsd));
    if (row.quasi_norm_value < row.lower_bound - 1e-9) report.passed = false;
    if (row.ratio < row.ratio_bound - 1e-9) report.passed = false;
    if (env != Rational(1) + eps) report.passed = false;  // exact sandwich value for 1_Omega
    report.rows.push_back(row);
  }
  return report;
}

std::string EnvelopeGapReport::to_csv() const {
  std::ostringstream os;
  os << "n,quasi_norm,lower_bound,envelope_norm,ratio,ratio_bound\n";
  for (const auto& row : rows) {
    os << row.n << ',' << fmt_g17(row.quasi_norm_value) << ',' << fmt_g17(row.lower_bound) << ','
       << fmt_g17(row.envelope_value) << ',' << fmt_g17(row.ratio) << ',' << fmt_g17(row.ratio_bound)
       << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// (p, theta, kappa) containment and the iterative preimage scheme.
// ---------------------------------------------------------------------------

namespace {

double sup_norm(std::span<const double> v) {
  double s = 0;
  for (double x : v) s = std::max(s, std::fabs(x));
  return s;
}

}  // namespace

PThetaKappaReport pthetakappa_check(std::span<const std::vector<double>> generators, const Rational& p,
                                    double theta, double kappa, std::size_t samples, std::uint64_t seed,
                                    RoundingOracle oracle) {
  if (generators.empty()) throw ParameterError("need at least one generator");
  const std::size_t dim = generators[0].size();
  for (const auto& g : generators) {
    if (g.size() != dim) throw ParameterError("generator arity mismatch");
  }
  const double pd = to_double(p);
  check_p(p);
  if (oracle == RoundingOracle::SignVector && kappa < 0.5) {
    throw ParameterError("sign rounding needs kappa >= 1/2 for p-hull membership");
  }

  double outer = 0;
  for (const auto& g : generators) outer = std::max(outer, sup_norm(g));

  PThetaKappaReport report;
  report.allowed = theta * outer;
  report.passed = true;

  Rng rng(seed);
  std::vector<double> y(dim), residual_point(dim);
  for (std::size_t s = 0; s < samples; ++s) {
    // Random point of B: convex combination of generators.
    std::vector<double> lambda(generators.size());
    double sum = 0;
    for (auto& l : lambda) {
      l = rng.next_double();
      sum += l;
    }
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t gidx = 0; gidx < generators.size(); ++gidx) {
      for (std::size_t d = 0; d < dim; ++d) y[d] += lambda[gidx] / sum * generators[gidx][d];
    }

    double residual;
    if (oracle == RoundingOracle::SignVector) {
      // u = sgn(y); kappa * a = u/2 with a in the p-hull.
      double cost = 0;
      bool has_zero = false;
      for (std::size_t d = 0; d < dim; ++d) {
        residual_point[d] = y[d] - 0.5 * (y[d] > 0 ? 1.0 : y[d] < 0 ? -1.0 : 0.0);
        if (y[d] == 0) has_zero = true;
      }
      // Representation cost in the p-hull: u/(2 kappa) as one generator, or an
      // average of two when sgn(y) has zero entries.
      cost = has_zero ? 2.0 * std::pow(4.0 * kappa, -pd) : std::pow(2.0 * kappa, -pd);
      if (cost > 1.0 + 1e-12) {
        report.passed = false;
      }
      residual = sup_norm(residual_point);
    } else {
      residual = std::numeric_limits<double>::infinity();
      for (const auto& g : generators) {
        for (double mag = 1.0; mag >= 1.0 / 1024.0; mag /= 2) {
          for (double sign : {1.0, -1.0}) {
            const double t = sign * mag;  // |t|^p <= 1 for |t| <= 1
            double r = 0;
            for (std::size_t d = 0; d < dim; ++d) r = std::max(r, std::fabs(y[d] - kappa * t * g[d]));
            residual = std::min(residual, r);
          }
        }
      }
      double r0 = sup_norm(y);  // a = 0
      residual = std::min(residual, r0);
    }
    if (residual > report.worst_residual) {
      report.worst_residual = residual;
      report.worst_point = y;
    }
    if (residual > report.allowed + 1e-12) report.passed = false;
  }
  return report;
}

std::string PThetaKappaReport::to_json() const {
  nlohmann::json j;
  j["passed"] = passed;
  j["worst_residual"] = worst_residual;
  j["allowed"] = allowed;
  j["worst_point"] = worst_point;
  return j.dump();
}

HalfOracle sign_vector_oracle() {
  return [](const std::vector<double>& y) {
    double mag = 0;
    for (double v : y) mag = std::max(mag, std::fabs(v));
    std::vector<double> x(y.size(), 0.0);
    for (std::size_t i = 0; i < y.size(); ++i) {
      x[i] = y[i] > 0 ? mag : y[i] < 0 ? -mag : 0.0;
    }
    return x;
  };
}

PreimageResult iterative_preimage(const HalfOracle& oracle, std::vector<double> y, double eps, int k_max,
                                  const Rational& p) {
  check_p(p);
  if (k_max < 0) throw ParameterError("k_max must be nonnegative");
  const double factor = 0.5 + eps;
  if (!(factor > 0) || !(factor < 1)) throw ParameterError("need 0 <= eps < 1/2");
  if (sup_norm(y) > 1 + 1e-12) throw ParameterError("target must lie in the unit ball");

  PreimageResult result;
  const double pd = to_double(p);
  double coeff = 1.0;
  for (int step = 1; step <= k_max; ++step) {
    const double before = sup_norm(y);
    const std::vector<double> x = oracle(y);
    if (x.size() != y.size()) throw OracleError("oracle returned wrong arity at step " + std::to_string(step));
    for (std::size_t i = 0; i < y.size(); ++i) y[i] -= 0.5 * x[i];
    const double after = sup_norm(y);
    if (after > factor * before + 1e-12) {
      throw OracleError("oracle failed to contract the residual at step " + std::to_string(step));
    }
    // Normalized vector (1/2+eps)^{-(i-1)} x_i must stay in the unit ball.
    std::vector<double> unit(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) unit[i] = coeff == 0 ? 0.0 : x[i] / coeff;
    if (sup_norm(unit) > 1 + 1e-9) {
      throw OracleError("oracle escaped the unit ball at step " + std::to_string(step));
    }
    result.coefficients.push_back(coeff);
    result.vectors.push_back(std::move(unit));
    result.residual_trace.push_back(after);
    result.p_sum += std::pow(coeff, pd);
    coeff *= factor;
  }
  result.p_sum_bound = 1.0 / (1.0 - std::pow(factor, pd));
  return result;
}

std::string PreimageResult::to_csv() const {
  std::ostringstream os;
  os << "step,coefficient,residual\n";
  for (std::size_t i = 0; i < residual_trace.size(); ++i) {
    os << (i + 1) << ',' << fmt_g17(coefficients[i]) << ',' << fmt_g17(residual_trace[i]) << '\n';
  }
  return os.str();
}

std::string QuasiNormCertificate::to_json() const {
  nlohmann::json j;
  j["p"] = rational_to_string(p);
  auto arr = nlohmann::json::array();
  for (const auto& v : c) arr.push_back(rational_to_string(v));
  j["c"] = arr;
  j["objective"] = objective;
  j["active_omegas"] = active_omegas;
  j["vertex_count"] = vertex_count;
  return j.dump();
}

}  // namespace convlab
