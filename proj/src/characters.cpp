#include "klext/characters.hpp"

#include "klext/error.hpp"

#include <algorithm>
#include <exception>
#include <set>

#include <omp.h>

namespace klext {

namespace {

void add_to(WeightMap& m, const Weight& w, const BigInt& c) {
  if (c == 0) return;
  auto [it, inserted] = m.emplace(w, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) m.erase(it);
  }
}

// Sum of the simple-root coordinates of mu, scaled by det; a linear
// extension of the dominance order.
std::int64_t scaled_height(const RootSystem& rs, const Weight& mu) {
  std::int64_t h = 0;
  for (auto v : root_coords_scaled(rs, mu)) h += v;
  return h;
}

}  // namespace

Weight dominant_conjugate(const RootSystem& rs, Weight mu) {
  for (;;) {
    int i = 0;
    while (i < rs.rank && mu[i] >= 0) ++i;
    if (i == rs.rank) return mu;
    const auto c = mu[i];
    for (int k = 0; k < rs.rank; ++k) mu[k] -= c * rs.cartan[i][k];
  }
}

std::vector<Weight> weyl_orbit(const RootSystem& rs, const Weight& mu) {
  std::set<Weight> seen{mu};
  std::vector<Weight> todo{mu};
  while (!todo.empty()) {
    Weight x = std::move(todo.back());
    todo.pop_back();
    for (int i = 0; i < rs.rank; ++i) {
      if (x[i] == 0) continue;
      Weight y = x;
      for (int k = 0; k < rs.rank; ++k) y[k] -= x[i] * rs.cartan[i][k];
      if (seen.insert(y).second) todo.push_back(std::move(y));
    }
  }
  return {seen.begin(), seen.end()};
}

BigInt Character::multiplicity(const RootSystem& rs, const Weight& mu) const {
  auto it = dominant.find(dominant_conjugate(rs, mu));
  return it == dominant.end() ? BigInt(0) : it->second;
}

BigInt Character::dimension(const RootSystem& rs) const {
  BigInt d = 0;
  for (const auto& [mu, m] : dominant) d += m * BigInt(weyl_orbit(rs, mu).size());
  return d;
}

WeightMap Character::expand(const RootSystem& rs) const {
  WeightMap out;
  for (const auto& [mu, m] : dominant)
    for (const auto& w : weyl_orbit(rs, mu)) out.emplace(w, m);
  return out;
}

Character weyl_character(const RootSystem& rs, const Weight& lambda) {
  if (lambda.rank() != static_cast<std::size_t>(rs.rank)) throw InvalidArgument("weyl_character: rank mismatch");
  if (!lambda.is_dominant()) throw InvalidArgument("weyl_character: " + lambda.str() + " is not dominant");
  auto weights = dominant_weights_below(rs, lambda);
  std::sort(weights.begin(), weights.end(), [&](const Weight& a, const Weight& b) {
    auto ha = scaled_height(rs, a), hb = scaled_height(rs, b);
    if (ha != hb) return ha > hb;
    return a < b;
  });
  const Weight lr = lambda + rs.rho;
  const std::int64_t top = inner_product_scaled(rs, lr, lr);
  Character ch;
  for (const auto& mu : weights) {
    if (mu == lambda) {
      ch.dominant.emplace(mu, 1);
      continue;
    }
    BigInt num = 0;
    for (const auto& alpha : rs.positive_root_weights) {
      for (std::int64_t k = 1;; ++k) {
        const Weight nu = mu + k * alpha;
        auto it = ch.dominant.find(dominant_conjugate(rs, nu));
        if (it == ch.dominant.end()) break;
        num += BigInt(inner_product_scaled(rs, nu, alpha)) * it->second;
      }
    }
    num *= 2;
    const Weight mr = mu + rs.rho;
    const std::int64_t den = top - inner_product_scaled(rs, mr, mr);
    if (den <= 0) throw InvariantViolation("Freudenthal: nonpositive denominator");
    if (num % den != 0) throw InvariantViolation("Freudenthal: non-integral multiplicity");
    BigInt m = num / den;
    if (m != 0) ch.dominant.emplace(mu, std::move(m));
  }
  return ch;
}

BigInt weyl_dimension(const RootSystem& rs, const Weight& lambda) {
  BigInt num = 1, den = 1;
  const Weight lr = lambda + rs.rho;
  for (std::size_t k = 0; k < rs.num_positive_roots(); ++k) {
    num *= pairing_positive(rs, lr, k);
    den *= pairing_positive(rs, rs.rho, k);
  }
  return num / den;
}

const Character& CharacterCache::get(const Weight& lambda) {
  auto it = memo_.find(lambda);
  if (it != memo_.end()) return it->second;
  return memo_.emplace(lambda, weyl_character(rs_, lambda)).first->second;
}

Character combine_characters(const RootSystem& rs, const WeightMap& coeffs, CharacterCache* cache) {
  CharacterCache local(rs);
  if (!cache) cache = &local;
  Character out;
  for (const auto& [nu, c] : coeffs)
    for (const auto& [mu, m] : cache->get(nu).dominant) add_to(out.dominant, mu, c * m);
  return out;
}

WeightMap weyl_decompose(const RootSystem& rs, Character ch, CharacterCache* cache) {
  CharacterCache local(rs);
  if (!cache) cache = &local;
  WeightMap out;
  while (!ch.dominant.empty()) {
    auto best = ch.dominant.begin();
    std::int64_t best_h = scaled_height(rs, best->first);
    for (auto it = std::next(ch.dominant.begin()); it != ch.dominant.end(); ++it) {
      const auto h = scaled_height(rs, it->first);
      if (h > best_h) {
        best = it;
        best_h = h;
      }
    }
    const Weight tau = best->first;
    const BigInt c = best->second;
    out.emplace(tau, c);
    for (const auto& [mu, m] : cache->get(tau).dominant) add_to(ch.dominant, mu, -c * m);
  }
  return out;
}

WeightMap chi_kl(const KLTable& table, const Weight& lambda, std::int64_t l) {
  const auto& sl = table.slice();
  const auto& g = sl.group();
  if (!lambda.is_dominant()) throw InvalidArgument("chi_kl: " + lambda.str() + " is not dominant");
  auto f = factorize_weight(g, lambda, l);
  if (!f.regular) throw InvalidArgument("chi_kl: " + lambda.str() + " is not " + std::to_string(l) + "-regular");
  auto w = sl.index_of(f.element);
  if (!w) throw CoverageError("chi_kl: element of " + lambda.str() + " lies outside the slice; enlarge the cutoff");
  WeightMap out;
  const auto lw = sl.length(*w);
  for (const auto& e : table.row(*w)) {
    if (!sl.dominant(e.x)) continue;
    BigInt c = e.p.eval_at_one();
    if ((lw - sl.length(e.x)) % 2) c = -c;
    add_to(out, g.dot(sl.element(e.x), f.lambda_minus, l), c);
  }
  return out;
}

std::optional<std::size_t> DecompositionMatrix::position(const Weight& nu) const {
  auto it = std::find(weights.begin(), weights.end(), nu);
  if (it == weights.end()) return std::nullopt;
  return static_cast<std::size_t>(it - weights.begin());
}

DecompositionMatrix decomposition_matrix(const KLTable& table, const Weight& lambda_minus, std::int64_t l,
                                         const Weight& cutoff) {
  const auto& sl = table.slice();
  const auto& g = sl.group();
  const auto& rs = g.roots();
  DecompositionMatrix m;
  m.l = l;
  m.lambda_minus = lambda_minus;
  m.cutoff = cutoff;
  std::vector<std::pair<std::size_t, Weight>> found;
  for (const auto& nu : dominant_weights_below(rs, cutoff)) {
    auto f = factorize_weight(g, nu, l);
    if (f.lambda_minus != lambda_minus) continue;
    if (!f.regular) throw InvalidArgument("decomposition_matrix: the linkage class of " + lambda_minus.str() + " is singular");
    auto idx = sl.index_of(f.element);
    if (!idx)
      throw CoverageError("decomposition_matrix: " + nu.str() + " needs an element of length " +
                          std::to_string(g.length(f.element)) + " beyond the cutoff " + std::to_string(sl.cutoff()));
    found.emplace_back(*idx, nu);
  }
  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  const std::size_t n = found.size();
  for (auto& [i, nu] : found) {
    m.elements.push_back(i);
    m.weights.push_back(nu);
  }
  m.signed_kl.assign(n, std::vector<BigInt>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      BigInt v = table.P(m.elements[j], m.elements[i]).eval_at_one();
      if ((sl.length(m.elements[i]) - sl.length(m.elements[j])) % 2) v = -v;
      m.signed_kl[i][j] = v;
    }
  // forward substitution for the unitriangular inverse
  m.decomp.assign(n, std::vector<BigInt>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    if (m.signed_kl[i][i] != 1) throw InvariantViolation("decomposition_matrix: diagonal entry is not 1");
    m.decomp[i][i] = 1;
    for (std::size_t j = 0; j < i; ++j) {
      BigInt s = 0;
      for (std::size_t k = j; k < i; ++k)
        if (m.signed_kl[i][k] != 0 && m.decomp[k][j] != 0) s += m.signed_kl[i][k] * m.decomp[k][j];
      m.decomp[i][j] = -s;
    }
  }
  return m;
}

DecompositionCheck check_decomposition(const RootSystem& rs, const DecompositionMatrix& m, bool expand_characters) {
  DecompositionCheck out;
  const std::size_t n = m.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      BigInt s = 0;
      for (std::size_t k = 0; k < n; ++k) s += m.signed_kl[i][k] * m.decomp[k][j];
      if (s != (i == j ? 1 : 0)) {
        out.inverse_ok = false;
        out.problems.push_back("A*D differs from I at (" + std::to_string(i) + "," + std::to_string(j) + ")");
      }
      if (m.decomp[i][j] < 0) {
        out.nonnegative = false;
        out.problems.push_back("negative decomposition number at " + m.weights[i].str() + ", " + m.weights[j].str());
      }
    }
  if (!expand_characters) return out;
  CharacterCache cache(rs);
  std::vector<Character> simple(n);
  for (std::size_t j = 0; j < n; ++j) {
    WeightMap c;
    for (std::size_t k = 0; k < n; ++k)
      if (m.signed_kl[j][k] != 0) c.emplace(m.weights[k], m.signed_kl[j][k]);
    simple[j] = combine_characters(rs, c, &cache);
  }
  for (std::size_t i = 0; i < n; ++i) {
    Character sum;
    for (std::size_t j = 0; j < n; ++j)
      if (m.decomp[i][j] != 0)
        for (const auto& [mu, v] : simple[j].dominant) add_to(sum.dominant, mu, m.decomp[i][j] * v);
    if (sum.dominant != cache.get(m.weights[i]).dominant) {
      out.resubstitution_ok = false;
      out.problems.push_back("chi(" + m.weights[i].str() + ") is not recovered from simple characters");
    }
  }
  return out;
}

WeightMap tensor_decompose(const RootSystem& rs, const Weight& lambda, const Weight& nu, int workers,
                           CharacterCache* cache) {
  CharacterCache local(rs);
  if (!cache) cache = &local;
  const auto full = cache->get(lambda).expand(rs);
  const auto other = cache->get(nu).expand(rs);
  std::vector<std::pair<Weight, BigInt>> terms(full.begin(), full.end());
  if (workers <= 0) workers = omp_get_max_threads();
  const auto nterms = static_cast<std::int64_t>(terms.size());
  const int chunks = std::max(1, std::min<int>(workers, static_cast<int>(terms.size())));
  std::vector<WeightMap> partial(static_cast<std::size_t>(chunks));
  // Each chunk owns a contiguous slice of terms; merging in chunk order keeps the
  // result independent of scheduling (the sums are exact anyway).
#pragma omp parallel for schedule(static, 1) num_threads(workers)
  for (int c = 0; c < chunks; ++c) {
    auto& acc = partial[static_cast<std::size_t>(c)];
    const auto lo = nterms * c / chunks, hi = nterms * (c + 1) / chunks;
    for (auto t = lo; t < hi; ++t) {
      const auto& [a, ma] = terms[static_cast<std::size_t>(t)];
      for (const auto& [b, mb] : other) {
        Weight s = a + b;
        if (s.is_dominant()) add_to(acc, s, ma * mb);
      }
    }
  }
  Character product;
  for (const auto& part : partial)
    for (const auto& [w, m] : part) add_to(product.dominant, w, m);
  return weyl_decompose(rs, std::move(product), cache);
}

}  // namespace klext
