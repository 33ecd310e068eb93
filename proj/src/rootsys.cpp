#include "klext/rootsys.hpp"

#include "klext/error.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cstdlib>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace klext {

namespace {

using Rational = boost::multiprecision::cpp_rational;

IntMatrix chain(int n) {
  IntMatrix c(n, std::vector<std::int64_t>(n, 0));
  for (int i = 0; i < n; ++i) {
    c[i][i] = 2;
    if (i + 1 < n) c[i][i + 1] = c[i + 1][i] = -1;
  }
  return c;
}

void link(IntMatrix& c, int i, int j) { c[i][j] = c[j][i] = -1; }

// Bourbaki numbering. Entry [i][j] is (alpha_i, alpha_j^vee).
IntMatrix cartan_for(char type, int n) {
  switch (type) {
    case 'A':
      return chain(n);
    case 'B': {
      auto c = chain(n);
      c[n - 2][n - 1] = -2;  // alpha_n short
      c[n - 1][n - 2] = -1;
      return c;
    }
    case 'C': {
      auto c = chain(n);
      c[n - 2][n - 1] = -1;  // alpha_n long
      c[n - 1][n - 2] = -2;
      return c;
    }
    case 'D': {
      IntMatrix c(n, std::vector<std::int64_t>(n, 0));
      for (int i = 0; i < n; ++i) c[i][i] = 2;
      for (int i = 0; i + 2 < n; ++i) link(c, i, i + 1);  // alpha_1 - ... - alpha_{n-1}
      link(c, n - 3, n - 1);                              // alpha_n hangs off alpha_{n-2}
      return c;
    }
    case 'E': {
      IntMatrix c(n, std::vector<std::int64_t>(n, 0));
      for (int i = 0; i < n; ++i) c[i][i] = 2;
      link(c, 0, 2);
      link(c, 1, 3);
      for (int i = 2; i + 1 < n; ++i) link(c, i, i + 1);
      return c;
    }
    case 'F': {
      auto c = chain(4);
      c[1][2] = -2;  // alpha_2 long, alpha_3 short
      c[2][1] = -1;
      return c;
    }
    case 'G': {
      auto c = chain(2);
      c[0][1] = -1;  // alpha_1 short
      c[1][0] = -3;
      return c;
    }
    default:
      throw InvalidArgument(std::string("unknown root system type '") + type + "'");
  }
}

std::int64_t det_bareiss(IntMatrix m) {
  const std::size_t n = m.size();
  std::int64_t sign = 1, prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      std::size_t r = k + 1;
      while (r < n && m[r][k] == 0) ++r;
      if (r == n) return 0;
      std::swap(m[k], m[r]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j)
        m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

std::vector<std::vector<Rational>> inverse(const IntMatrix& m) {
  const std::size_t n = m.size();
  std::vector<std::vector<Rational>> a(n, std::vector<Rational>(2 * n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = m[i][j];
    a[i][n + i] = 1;
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (a[piv][col] == 0) ++piv;
    std::swap(a[piv], a[col]);
    Rational inv = 1 / a[col][col];
    for (auto& v : a[col]) v *= inv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0) continue;
      Rational f = a[r][col];
      for (std::size_t j = 0; j < 2 * n; ++j) a[r][j] -= f * a[col][j];
    }
  }
  std::vector<std::vector<Rational>> out(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i][j] = a[i][n + j];
  return out;
}

std::vector<std::int64_t> half_norms(const IntMatrix& c) {
  const std::size_t n = c.size();
  std::vector<Rational> d(n, 0);
  d[0] = 1;
  std::vector<std::size_t> stack{0};
  std::vector<bool> seen(n, false);
  seen[0] = true;
  while (!stack.empty()) {
    auto i = stack.back();
    stack.pop_back();
    for (std::size_t j = 0; j < n; ++j) {
      if (seen[j] || c[i][j] == 0) continue;
      // C[i][j] d_j = C[j][i] d_i
      d[j] = Rational(c[j][i]) * d[i] / Rational(c[i][j]);
      seen[j] = true;
      stack.push_back(j);
    }
  }
  Rational lo = *std::min_element(d.begin(), d.end());
  std::vector<std::int64_t> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rational v = d[i] / lo;
    if (denominator(v) != 1) throw InvariantViolation("non-integral root length ratio");
    out[i] = static_cast<std::int64_t>(numerator(v));
  }
  return out;
}

std::int64_t height(const RootVec& r) { return std::accumulate(r.begin(), r.end(), std::int64_t{0}); }

}  // namespace

bool is_valid_type(char type, int rank, std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (rank < 1) return fail("rank must be positive");
  switch (type) {
    case 'A':
      return true;
    case 'B':
    case 'C':
      return rank >= 2 ? true : fail(std::string("type ") + type + " requires rank >= 2");
    case 'D':
      return rank >= 3 ? true : fail("type D requires rank >= 3");
    case 'E':
      return (rank >= 6 && rank <= 8) ? true : fail("type E requires rank in {6,7,8}");
    case 'F':
      return rank == 4 ? true : fail("type F requires rank 4");
    case 'G':
      return rank == 2 ? true : fail("type G requires rank 2");
    default:
      return fail(std::string("unknown type '") + type + "' (expected one of A-G)");
  }
}

Weight RootSystem::simple_root(std::size_t i) const { return Weight(cartan[i]); }

std::vector<std::int64_t> smith_invariants(IntMatrix m) {
  const std::size_t rows = m.size(), cols = rows ? m[0].size() : 0;
  std::vector<std::int64_t> out;
  for (std::size_t t = 0; t < std::min(rows, cols); ++t) {
    // find smallest nonzero |entry| in the trailing block
    for (;;) {
      std::size_t pr = rows, pc = cols;
      std::int64_t best = 0;
      for (std::size_t i = t; i < rows; ++i)
        for (std::size_t j = t; j < cols; ++j)
          if (m[i][j] != 0 && (best == 0 || std::llabs(m[i][j]) < best)) {
            best = std::llabs(m[i][j]);
            pr = i;
            pc = j;
          }
      if (best == 0) return out;
      std::swap(m[t], m[pr]);
      for (auto& row : m) std::swap(row[t], row[pc]);
      bool clean = true;
      for (std::size_t i = t + 1; i < rows; ++i) {
        std::int64_t q = m[i][t] / m[t][t];
        for (std::size_t j = t; j < cols; ++j) m[i][j] -= q * m[t][j];
        if (m[i][t] != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < cols; ++j) {
        std::int64_t q = m[t][j] / m[t][t];
        for (std::size_t i = t; i < rows; ++i) m[i][j] -= q * m[i][t];
        if (m[t][j] != 0) clean = false;
      }
      if (!clean) continue;
      // divisibility: pivot must divide the whole trailing block
      bool divides = true;
      for (std::size_t i = t + 1; i < rows && divides; ++i)
        for (std::size_t j = t + 1; j < cols; ++j)
          if (m[i][j] % m[t][t] != 0) {
            for (std::size_t k = t; k < cols; ++k) m[t][k] += m[i][k];
            divides = false;
            break;
          }
      if (divides) break;
    }
    out.push_back(std::llabs(m[t][t]));
  }
  return out;
}

RootSystem build_root_system(char type, int rank) {
  std::string why;
  if (!is_valid_type(type, rank, &why)) throw InvalidArgument(why);

  RootSystem rs;
  rs.type = type;
  rs.rank = rank;
  rs.cartan = cartan_for(type, rank);
  rs.half_norm = half_norms(rs.cartan);
  const auto n = static_cast<std::size_t>(rank);

  // Positive roots by closure: beta + alpha_i is a root iff q = p - (beta, alpha_i^vee) > 0,
  // p the length of the alpha_i-string below beta.
  std::set<RootVec> known;
  std::vector<RootVec> layer;
  for (std::size_t i = 0; i < n; ++i) {
    RootVec r(n, 0);
    r[i] = 1;
    layer.push_back(r);
    known.insert(r);
  }
  std::vector<RootVec> all = layer;
  while (!layer.empty()) {
    std::set<RootVec> next;
    for (const auto& beta : layer) {
      for (std::size_t i = 0; i < n; ++i) {
        std::int64_t pair = 0;
        for (std::size_t j = 0; j < n; ++j) pair += beta[j] * rs.cartan[j][i];
        std::int64_t p = 0;
        RootVec down = beta;
        for (;;) {
          down[i] -= 1;
          if (!known.count(down)) break;
          ++p;
        }
        if (p - pair > 0) {
          RootVec up = beta;
          up[i] += 1;
          if (!known.count(up)) next.insert(up);
        }
      }
    }
    layer.assign(next.begin(), next.end());
    for (auto& r : layer) {
      known.insert(r);
      all.push_back(r);
    }
  }
  std::stable_sort(all.begin(), all.end(), [](const RootVec& a, const RootVec& b) {
    auto ha = height(a), hb = height(b);
    if (ha != hb) return ha < hb;
    return a > b;
  });
  rs.positive_roots = all;

  for (const auto& r : rs.positive_roots) {
    rs.positive_root_weights.push_back(root_to_weight(rs, r));
    // (alpha, alpha)/2 = sum_ij c_i c_j C[i][j] d_j / 2
    std::int64_t twice = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) twice += r[i] * r[j] * rs.cartan[i][j] * rs.half_norm[j];
    const std::int64_t d_alpha = twice / 2;
    RootVec co(n);
    for (std::size_t j = 0; j < n; ++j) {
      const std::int64_t num = r[j] * rs.half_norm[j];
      if (num % d_alpha != 0) throw InvariantViolation("coroot not integral");
      co[j] = num / d_alpha;
    }
    rs.positive_coroots.push_back(co);
  }

  std::int64_t short_norm = *std::min_element(rs.half_norm.begin(), rs.half_norm.end());
  rs.max_root = rs.positive_roots.size() - 1;
  for (std::size_t k = 0; k < rs.positive_roots.size(); ++k) {
    // a root is short iff its coroot is as long as possible: d_alpha == short_norm
    const auto& r = rs.positive_roots[k];
    std::int64_t twice = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) twice += r[i] * r[j] * rs.cartan[i][j] * rs.half_norm[j];
    if (twice / 2 == short_norm) rs.max_short_root = k;  // sorted by height: last wins
  }

  rs.rho = Weight(std::vector<std::int64_t>(n, 1));
  rs.coxeter_number = static_cast<int>(pairing(rs, rs.rho, rs.alpha0()) + 1);

  rs.cartan_det = det_bareiss(rs.cartan);
  auto inv = inverse(rs.cartan);
  rs.cartan_adj.assign(n, std::vector<std::int64_t>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Rational v = inv[i][j] * rs.cartan_det;
      rs.cartan_adj[i][j] = static_cast<std::int64_t>(numerator(v));
    }

  auto inv_factors = smith_invariants(rs.cartan);
  rs.torsion_exponent = inv_factors.empty() ? 1 : inv_factors.back();

  std::uint64_t order = static_cast<std::uint64_t>(rs.cartan_det);
  for (int i = 2; i <= rank; ++i) order *= static_cast<std::uint64_t>(i);
  for (auto c : rs.alpha_max()) order *= static_cast<std::uint64_t>(c);
  rs.weyl_order = order;
  return rs;
}

Weight root_to_weight(const RootSystem& rs, const RootVec& root) {
  Weight w(static_cast<std::size_t>(rs.rank));
  for (int j = 0; j < rs.rank; ++j)
    for (int i = 0; i < rs.rank; ++i) w[i] += root[j] * rs.cartan[j][i];
  return w;
}

std::vector<std::int64_t> root_coords_scaled(const RootSystem& rs, const Weight& lambda) {
  if (lambda.rank() != static_cast<std::size_t>(rs.rank)) throw InvalidArgument("weight rank mismatch");
  std::vector<std::int64_t> out(rs.rank, 0);
  for (int j = 0; j < rs.rank; ++j)
    for (int i = 0; i < rs.rank; ++i) out[j] += lambda[i] * rs.cartan_adj[i][j];
  return out;
}

std::optional<RootVec> root_coords(const RootSystem& rs, const Weight& lambda) {
  auto s = root_coords_scaled(rs, lambda);
  RootVec out(s.size());
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (s[j] % rs.cartan_det != 0) return std::nullopt;
    out[j] = s[j] / rs.cartan_det;
  }
  return out;
}

std::int64_t pairing(const RootSystem& rs, const Weight& lambda, const RootVec& alpha) {
  if (lambda.rank() != static_cast<std::size_t>(rs.rank) || alpha.size() != lambda.rank())
    throw InvalidArgument("pairing: dimension mismatch");
  // alpha^vee = sum_j c_j d_j / d_alpha * alpha_j^vee
  const auto n = lambda.rank();
  std::int64_t twice = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) twice += alpha[i] * alpha[j] * rs.cartan[i][j] * rs.half_norm[j];
  if (twice == 0) throw InvalidArgument("pairing: zero vector is not a root");
  const std::int64_t d_alpha = twice / 2;
  std::int64_t num = 0;
  for (std::size_t j = 0; j < n; ++j) num += alpha[j] * rs.half_norm[j] * lambda[j];
  return num / d_alpha;
}

std::int64_t pairing_positive(const RootSystem& rs, const Weight& lambda, std::size_t k) {
  const auto& co = rs.positive_coroots[k];
  std::int64_t v = 0;
  for (std::size_t j = 0; j < co.size(); ++j) v += co[j] * lambda[j];
  return v;
}

std::int64_t inner_product_scaled(const RootSystem& rs, const Weight& lambda, const Weight& nu) {
  // (varpi_i, varpi_j) = (C^{-1})_{ij} d_j
  std::int64_t s = 0;
  for (int i = 0; i < rs.rank; ++i) {
    if (lambda[i] == 0) continue;
    for (int j = 0; j < rs.rank; ++j) s += lambda[i] * nu[j] * rs.cartan_adj[i][j] * rs.half_norm[j];
  }
  return s;
}

bool dominance_leq(const RootSystem& rs, const Weight& lambda, const Weight& nu, Dominance variant) {
  auto s = root_coords_scaled(rs, nu - lambda);
  for (auto v : s) {
    if (v < 0) return false;
    if (variant == Dominance::integral && v % rs.cartan_det != 0) return false;
  }
  return true;
}

BigInt kostant_partition(const RootSystem& rs, const RootVec& nu, std::size_t max_cells) {
  const std::size_t n = nu.size();
  if (n != static_cast<std::size_t>(rs.rank)) throw InvalidArgument("kostant_partition: rank mismatch");
  std::size_t cells = 1;
  for (auto v : nu) {
    if (v < 0) return 0;
    cells *= static_cast<std::size_t>(v + 1);
    if (cells > max_cells) throw ResourceLimit("kostant_partition: DP box exceeds " + std::to_string(max_cells) + " cells");
  }
  // Unbounded multi-dimensional coin change over the box [0, nu]; row-major
  // order visits p - alpha before p for every positive root alpha.
  std::vector<std::size_t> stride(n, 1);
  for (std::size_t i = n; i-- > 1;) stride[i - 1] = stride[i] * static_cast<std::size_t>(nu[i] + 1);
  std::vector<BigInt> table(cells, 0);
  table[0] = 1;
  std::vector<std::int64_t> p(n);
  for (const auto& alpha : rs.positive_roots) {
    std::size_t offset = 0;
    bool fits = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (alpha[i] > nu[i]) fits = false;
      offset += static_cast<std::size_t>(alpha[i]) * stride[i];
    }
    if (!fits) continue;
    std::fill(p.begin(), p.end(), 0);
    for (std::size_t idx = 0; idx < cells; ++idx) {
      bool ok = true;
      for (std::size_t i = 0; i < n; ++i)
        if (p[i] < alpha[i]) {
          ok = false;
          break;
        }
      if (ok) table[idx] += table[idx - offset];
      for (std::size_t i = n; i-- > 0;) {
        if (++p[i] <= nu[i]) break;
        p[i] = 0;
      }
    }
  }
  return table[cells - 1];
}

BigInt kostant_partition(const RootSystem& rs, const Weight& nu, std::size_t max_cells) {
  auto rc = root_coords(rs, nu);
  if (!rc) return 0;
  return kostant_partition(rs, *rc, max_cells);
}

PAdicExpansion p_adic_expansion(const Weight& lambda, std::int64_t p) {
  if (p < 2) throw InvalidArgument("p_adic_expansion: p must be >= 2");
  if (!lambda.is_dominant()) throw InvalidArgument("p_adic_expansion: weight " + lambda.str() + " is not dominant");
  PAdicExpansion out;
  Weight rest = lambda;
  do {
    Weight digit(rest.rank());
    for (std::size_t i = 0; i < rest.rank(); ++i) {
      digit[i] = rest[i] % p;
      rest[i] /= p;
    }
    out.digits.push_back(digit);
  } while (!rest.is_zero());
  out.dagger = Weight(lambda.rank());
  for (std::size_t i = 0; i < lambda.rank(); ++i) out.dagger[i] = lambda[i] / p;
  out.e_p = 0;
  for (std::size_t i = 0; i < out.digits.size(); ++i)
    if (!out.digits[i].is_zero()) out.e_p = static_cast<int>(i);
  return out;
}

WeightClass classify_weight(const RootSystem& rs, const Weight& lambda, std::int64_t l, int e,
                            std::optional<std::int64_t> p) {
  if (l < 1) throw InvalidArgument("classify_weight: l must be >= 1");
  if (e < 1) throw InvalidArgument("classify_weight: e must be >= 1");
  WeightClass f;
  f.restricted_1l = lambda.is_dominant();
  for (std::size_t i = 0; i < lambda.rank(); ++i)
    if (lambda[i] >= l) f.restricted_1l = false;
  std::int64_t le = 1;
  for (int k = 0; k < e; ++k) le *= l;
  f.restricted_el = lambda.is_dominant();
  for (std::size_t i = 0; i < lambda.rank(); ++i)
    if (lambda[i] + 1 >= le) f.restricted_el = false;
  const Weight shifted = lambda + rs.rho;
  f.regular_l = lambda.is_dominant();
  for (std::size_t k = 0; k < rs.num_positive_roots() && f.regular_l; ++k)
    if (pairing_positive(rs, shifted, k) % l == 0) f.regular_l = false;
  const std::int64_t pp = p.value_or(l);
  f.in_jantzen_region = lambda.is_dominant() &&
                        pairing_positive(rs, shifted, rs.max_short_root) <= pp * (pp - rs.coxeter_number + 2);
  return f;
}

Weight special_isogeny_image(const RootSystem& c_type, const Weight& lambda) {
  if (c_type.type != 'C' || c_type.rank < 2)
    throw InvalidArgument("special_isogeny_image: source must be of type C_r, r >= 2");
  if (!lambda.is_dominant()) throw InvalidArgument("special_isogeny_image: weight must be dominant");
  const auto r = lambda.rank();
  // lambda_sigma^(1) for p = 2 is floor(a_i / 2) on the first r-1 coordinates;
  // phi(varpi'_i) = 2 varpi_i (i < r) and phi(varpi'_r) = varpi_r.
  Weight out(r);
  for (std::size_t i = 0; i + 1 < r; ++i) out[i] = lambda[i] / 2;
  out[r - 1] = lambda[r - 1];
  return out;
}

std::int64_t largest_integer_e(std::int64_t m, std::int64_t p) {
  if (p < 2) throw InvalidArgument("e(m): p must be >= 2");
  if (m <= 0) return 0;
  return (m - 1) / (p - 1);
}

std::int64_t generic_shift(const RootSystem& rs, std::int64_t p, std::int64_t n) {
  if (n < 0) throw InvalidArgument("generic_shift: n must be >= 0");
  std::int64_t c = *std::max_element(rs.alpha_max().begin(), rs.alpha_max().end());
  return largest_integer_e(c * rs.torsion_exponent * n, p) + 1;
}

}  // namespace klext
