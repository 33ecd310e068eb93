#include "klext/weylaffine.hpp"

#include "klext/error.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace klext {

// ---------------------------------------------------------------------------
// FiniteWeylGroup

FiniteWeylGroup::FiniteWeylGroup(const RootSystem& rs, std::size_t max_order)
    : rs_(&rs), n_(static_cast<std::size_t>(rs.rank)), nroots_(rs.num_positive_roots()) {
  if (rs.weyl_order > max_order)
    throw ResourceLimit("Weyl group of " + rs.label() + " has order " + std::to_string(rs.weyl_order) +
                        ", above the limit " + std::to_string(max_order));
  std::vector<std::vector<std::int64_t>> simple_mats;
  for (std::size_t i = 0; i < n_; ++i) {
    std::vector<std::int64_t> m(n_ * n_, 0);
    for (std::size_t k = 0; k < n_; ++k) m[k * n_ + k] = 1;
    for (std::size_t k = 0; k < n_; ++k) m[k * n_ + i] -= rs.cartan[i][k];
    simple_mats.push_back(std::move(m));
  }
  std::vector<std::int64_t> id(n_ * n_, 0);
  for (std::size_t k = 0; k < n_; ++k) id[k * n_ + k] = 1;

  mats_.push_back(id);
  lengths_.push_back(0);
  words_.push_back({});
  by_rho_image_.emplace(image_of_rho(id), 0);
  for (std::size_t head = 0; head < mats_.size(); ++head) {
    for (std::size_t i = 0; i < n_; ++i) {
      auto m = matmul(simple_mats[i], mats_[head]);
      auto key = image_of_rho(m);
      if (by_rho_image_.count(key)) continue;
      by_rho_image_.emplace(std::move(key), static_cast<std::uint32_t>(mats_.size()));
      std::vector<int> word{static_cast<int>(i) + 1};
      word.insert(word.end(), words_[head].begin(), words_[head].end());
      mats_.push_back(std::move(m));
      lengths_.push_back(lengths_[head] + 1);
      words_.push_back(std::move(word));
    }
  }
  if (mats_.size() != rs.weyl_order)
    throw InvariantViolation("Weyl group enumeration found " + std::to_string(mats_.size()) +
                             " elements, expected " + std::to_string(rs.weyl_order));

  for (std::size_t i = 0; i < n_; ++i) simple_.push_back(*find(simple_mats[i]));
  inverse_.resize(mats_.size());
  for (std::size_t w = 0; w < mats_.size(); ++w) {
    // words_[w] = s_a s_b ... ; inverse = ... s_b s_a
    auto inv = id;
    for (auto it = words_[w].rbegin(); it != words_[w].rend(); ++it) inv = matmul(inv, simple_mats[*it - 1]);
    inverse_[w] = *find(inv);
  }
  longest_ = static_cast<std::uint32_t>(mats_.size() - 1);

  for (std::size_t k = 0; k < nroots_; ++k) {
    const auto& a = rs.positive_root_weights[k];
    const auto& co = rs.positive_coroots[k];
    std::vector<std::int64_t> m(n_ * n_, 0);
    for (std::size_t r = 0; r < n_; ++r)
      for (std::size_t c = 0; c < n_; ++c) m[r * n_ + c] = (r == c ? 1 : 0) - a[r] * co[c];
    reflections_.push_back(*find(m));
  }

  std::unordered_map<Weight, int, WeightHash> sign;
  for (const auto& a : rs.positive_root_weights) {
    sign.emplace(a, 1);
    sign.emplace(-a, -1);
  }
  inv_neg_.assign(mats_.size() * nroots_, 0);
  for (std::size_t w = 0; w < mats_.size(); ++w) {
    const auto winv = inverse_[w];
    for (std::size_t k = 0; k < nroots_; ++k) {
      auto img = act(winv, rs.positive_root_weights[k]);
      auto it = sign.find(img);
      if (it == sign.end()) throw InvariantViolation("Weyl group element does not permute the roots");
      inv_neg_[w * nroots_ + k] = it->second < 0 ? 1 : 0;
    }
  }
}

std::vector<std::int64_t> FiniteWeylGroup::matmul(const std::vector<std::int64_t>& a,
                                                  const std::vector<std::int64_t>& b) const {
  std::vector<std::int64_t> c(n_ * n_, 0);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t k = 0; k < n_; ++k) {
      const auto aik = a[i * n_ + k];
      if (aik == 0) continue;
      for (std::size_t j = 0; j < n_; ++j) c[i * n_ + j] += aik * b[k * n_ + j];
    }
  return c;
}

Weight FiniteWeylGroup::image_of_rho(const std::vector<std::int64_t>& m) const {
  Weight out(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) out[i] += m[i * n_ + j];
  return out;
}

std::optional<std::uint32_t> FiniteWeylGroup::find(const std::vector<std::int64_t>& matrix) const {
  auto it = by_rho_image_.find(image_of_rho(matrix));
  if (it == by_rho_image_.end()) return std::nullopt;
  return it->second;
}

std::uint32_t FiniteWeylGroup::multiply(std::uint32_t a, std::uint32_t b) const {
  return *find(matmul(mats_[a], mats_[b]));
}

Weight FiniteWeylGroup::act(std::uint32_t w, const Weight& lambda) const {
  const auto& m = mats_[w];
  Weight out(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    std::int64_t v = 0;
    for (std::size_t j = 0; j < n_; ++j) v += m[i * n_ + j] * lambda[j];
    out[i] = v;
  }
  return out;
}

// ---------------------------------------------------------------------------
// AffineWeylGroup

AffineWeylGroup::AffineWeylGroup(RootSystem rs, std::size_t max_finite_order) : rs_(std::move(rs)) {
  finite_ = std::make_unique<FiniteWeylGroup>(rs_, max_finite_order);
  // s_{alpha_0,-1}: x -> s_{alpha_0}(x) - alpha_0
  gens_.push_back({finite_->reflection(rs_.max_short_root), -rs_.positive_root_weights[rs_.max_short_root]});
  for (int i = 0; i < rs_.rank; ++i) gens_.push_back({finite_->simple_reflection(i), Weight(rs_.rank)});
}

AffineElement AffineWeylGroup::identity() const { return {0, Weight(static_cast<std::size_t>(rs_.rank))}; }

AffineElement AffineWeylGroup::multiply(const AffineElement& a, const AffineElement& b) const {
  // (t_mu w)(t_nu v) = t_{mu + w(nu)} wv
  return {finite_->multiply(a.w, b.w), a.mu + finite_->act(a.w, b.mu)};
}

AffineElement AffineWeylGroup::inverse(const AffineElement& g) const {
  const auto winv = finite_->inverse(g.w);
  return {winv, -finite_->act(winv, g.mu)};
}

std::uint32_t AffineWeylGroup::length(const AffineElement& g) const {
  std::int64_t len = 0;
  for (std::size_t k = 0; k < rs_.num_positive_roots(); ++k) {
    const std::int64_t v = pairing_positive(rs_, g.mu, k) + (finite_->inverts(g.w, k) ? 1 : 0);
    len += v < 0 ? -v : v;
  }
  return static_cast<std::uint32_t>(len);
}

AffineElement AffineWeylGroup::from_word(const std::vector<int>& word) const {
  auto g = identity();
  for (int s : word) {
    if (s < 0 || s > rs_.rank) throw InvalidArgument("generator index out of range");
    g = multiply(g, gens_[s]);
  }
  return g;
}

AffineElement AffineWeylGroup::from_finite(std::uint32_t w) const { return {w, Weight(static_cast<std::size_t>(rs_.rank))}; }

Weight AffineWeylGroup::act(const AffineElement& g, const Weight& x, std::int64_t l) const {
  return finite_->act(g.w, x) + l * g.mu;
}

Weight AffineWeylGroup::dot(const AffineElement& g, const Weight& x, std::int64_t l) const {
  if (l < 1) throw InvalidArgument("dot action: level must be >= 1");
  return finite_->act(g.w, x + rs_.rho) + l * g.mu - rs_.rho;
}

bool AffineWeylGroup::is_dominant(const AffineElement& g) const {
  // -rho/h is interior to the base alcove (shifted coordinates); scale by h.
  const Weight p = finite_->act(g.w, -rs_.rho) + static_cast<std::int64_t>(rs_.coxeter_number) * g.mu;
  return p.is_dominant();
}

std::uint64_t AffineWeylGroup::stabilizer_order(const RationalPoint& x, std::int64_t l) const {
  if (x.den <= 0) throw InvalidArgument("stabilizer_order: denominator must be positive");
  if (l < 1) throw InvalidArgument("stabilizer_order: level must be >= 1");
  const Weight y = x.num + x.den * rs_.rho;
  std::vector<std::uint32_t> gens;
  for (std::size_t k = 0; k < rs_.num_positive_roots(); ++k)
    if (pairing_positive(rs_, y, k) % (l * x.den) == 0) gens.push_back(finite_->reflection(k));
  std::set<std::uint32_t> seen{0};
  std::deque<std::uint32_t> queue{0};
  while (!queue.empty()) {
    auto w = queue.front();
    queue.pop_front();
    for (auto s : gens) {
      auto ws = finite_->multiply(w, s);
      if (seen.insert(ws).second) queue.push_back(ws);
    }
  }
  return seen.size();
}

// ---------------------------------------------------------------------------

std::vector<AffineElement> parabolic_elements(const AffineWeylGroup& group, const std::vector<int>& gens,
                                              std::size_t max_elements) {
  std::vector<AffineElement> out{group.identity()};
  std::unordered_map<AffineElement, std::size_t, AffineElementHash> seen{{out[0], 0}};
  for (std::size_t head = 0; head < out.size(); ++head) {
    for (int s : gens) {
      auto g = group.multiply(out[head], group.generator(s));
      if (seen.count(g)) continue;
      if (out.size() >= max_elements) throw ResourceLimit("parabolic subgroup exceeds element limit (infinite?)");
      seen.emplace(g, out.size());
      out.push_back(std::move(g));
    }
  }
  return out;
}

Factorization factorize_weight(const AffineWeylGroup& group, const Weight& lambda, std::int64_t l) {
  const auto& rs = group.roots();
  if (l < 1) throw InvalidArgument("factorize_weight: level must be >= 1");
  if (lambda.rank() != static_cast<std::size_t>(rs.rank)) throw InvalidArgument("factorize_weight: rank mismatch");
  const Weight& a0 = rs.positive_root_weights[rs.max_short_root];
  Weight y = lambda + rs.rho;
  std::vector<int> word;
  for (std::size_t guard = 0;; ++guard) {
    if (guard > 10'000'000) throw InvariantViolation("factorize_weight: alcove walk does not terminate");
    bool moved = false;
    for (int i = 0; i < rs.rank; ++i) {
      if (y[i] > 0) {
        const auto c = y[i];
        for (int k = 0; k < rs.rank; ++k) y[k] -= c * rs.cartan[i][k];
        word.push_back(i + 1);
        moved = true;
        break;
      }
    }
    if (moved) continue;
    const auto p0 = pairing_positive(rs, y, rs.max_short_root);
    if (p0 < -l) {
      y -= (p0 + l) * a0;
      word.push_back(0);
      continue;
    }
    break;
  }
  Factorization f;
  f.lambda_minus = y - rs.rho;
  f.element = group.from_word(word);
  for (int i = 0; i < rs.rank; ++i)
    if (y[i] == 0) f.wall_generators.push_back(i + 1);
  if (pairing_positive(rs, y, rs.max_short_root) == -l) f.wall_generators.insert(f.wall_generators.begin(), 0);
  f.regular = f.wall_generators.empty();
  if (!f.regular) {
    auto stab = parabolic_elements(group, f.wall_generators);
    f.stabilizer = stab.size();
    AffineElement best = f.element;
    auto best_len = group.length(best);
    for (const auto& v : stab) {
      auto g = group.multiply(f.element, v);
      auto len = group.length(g);
      if (len > best_len) {
        best = g;
        best_len = len;
      }
    }
    f.element = best;
  }
  if (group.dot(f.element, f.lambda_minus, l) != lambda)
    throw InvariantViolation("factorize_weight: round trip failed for " + lambda.str());
  return f;
}

std::vector<Weight> dominant_weights_below(const RootSystem& rs, const Weight& top, std::size_t max_weights) {
  auto scaled = root_coords_scaled(rs, top);
  std::vector<std::int64_t> bound(scaled.size());
  for (std::size_t i = 0; i < scaled.size(); ++i) {
    if (scaled[i] < 0) return {};
    bound[i] = scaled[i] / rs.cartan_det;
  }
  std::vector<Weight> out;
  std::vector<std::int64_t> n(bound.size(), 0);
  std::size_t visited = 0;
  for (;;) {
    if (++visited > max_weights * 16) throw ResourceLimit("dominant_weights_below: search box too large");
    Weight nu = top;
    for (std::size_t i = 0; i < n.size(); ++i)
      if (n[i]) nu -= n[i] * rs.simple_root(i);
    if (nu.is_dominant()) {
      if (out.size() >= max_weights) throw ResourceLimit("dominant_weights_below: too many weights");
      out.push_back(std::move(nu));
    }
    std::size_t i = n.size();
    while (i-- > 0) {
      if (++n[i] <= bound[i]) break;
      n[i] = 0;
    }
    if (i == static_cast<std::size_t>(-1)) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// GroupSlice

GroupSlice::GroupSlice(std::shared_ptr<const AffineWeylGroup> group, std::uint32_t cutoff, bool affine,
                       std::size_t max_elements)
    : group_(std::move(group)), cutoff_(cutoff), affine_(affine) {
  const auto& g = *group_;
  for (int s = affine ? 0 : 1; s <= g.rank(); ++s) gen_ids_.push_back(s);
  std::vector<AffineElement> shell{g.identity()};
  elements_ = shell;
  for (std::uint32_t len = 1; len <= cutoff && !shell.empty(); ++len) {
    std::set<AffineElement> next;
    for (const auto& x : shell)
      for (int s : gen_ids_) {
        auto y = g.multiply(x, g.generator(s));
        if (g.length(y) == len) next.insert(std::move(y));
      }
    shell.assign(next.begin(), next.end());
    if (elements_.size() + shell.size() > max_elements)
      throw ResourceLimit("group slice exceeds element limit " + std::to_string(max_elements) + " at length " +
                          std::to_string(len));
    elements_.insert(elements_.end(), shell.begin(), shell.end());
  }
  finish();
}

GroupSlice::GroupSlice(std::shared_ptr<const AffineWeylGroup> group, std::uint32_t cutoff, bool affine,
                       std::vector<AffineElement> elements)
    : group_(std::move(group)), cutoff_(cutoff), affine_(affine), elements_(std::move(elements)) {
  for (int s = affine ? 0 : 1; s <= group_->rank(); ++s) gen_ids_.push_back(s);
  finish();
}

void GroupSlice::finish() {
  const auto& g = *group_;
  const std::size_t n = elements_.size();
  if (n == 0 || !(elements_[0] == g.identity())) throw InvariantViolation("slice must start at the identity");
  lengths_.resize(n);
  dominant_.resize(n);
  index_.clear();
  index_.reserve(n * 2);
  for (std::size_t i = 0; i < n; ++i) {
    lengths_[i] = g.length(elements_[i]);
    if (lengths_[i] > cutoff_) throw InvariantViolation("slice element beyond the length cutoff");
    if (i > 0 && lengths_[i] < lengths_[i - 1]) throw InvariantViolation("slice not in length order");
    dominant_[i] = affine_ && g.is_dominant(elements_[i]) ? 1 : 0;
    if (!index_.emplace(elements_[i], i).second) throw InvariantViolation("duplicate slice element");
  }
  shell_start_.assign(cutoff_ + 2, n);
  for (std::size_t i = n; i-- > 0;) shell_start_[lengths_[i]] = i;
  for (std::size_t len = cutoff_ + 1; len-- > 0;)
    if (shell_start_[len] > shell_start_[len + 1]) shell_start_[len] = shell_start_[len + 1];

  stride_ = static_cast<std::size_t>(g.rank() + 1);
  neighbors_.assign(n * stride_, kOutside);
  left_neighbors_.assign(n * stride_, kOutside);
  for (std::size_t i = 0; i < n; ++i)
    for (int s : gen_ids_) {
      if (auto j = index_of(g.multiply(elements_[i], g.generator(s)))) neighbors_[i * stride_ + s] = static_cast<std::int32_t>(*j);
      if (auto j = index_of(g.multiply(g.generator(s), elements_[i]))) left_neighbors_[i * stride_ + s] = static_cast<std::int32_t>(*j);
    }

  // Lower Bruhat sets: for a right descent s of y, {x <= y} = D(ys) u D(ys)s.
  words_per_row_ = (n + 63) / 64;
  down_.assign(n * words_per_row_, 0);
  down_[0] |= 1;
  for (std::size_t y = 1; y < n; ++y) {
    int desc = -1;
    for (int s : gen_ids_) {
      auto v = right(y, s);
      if (v != kOutside && lengths_[static_cast<std::size_t>(v)] < lengths_[y]) {
        desc = s;
        break;
      }
    }
    if (desc < 0) throw InvariantViolation("non-identity element without a descent");
    const auto v = static_cast<std::size_t>(right(y, desc));
    std::uint64_t* row = &down_[y * words_per_row_];
    const std::uint64_t* vrow = &down_[v * words_per_row_];
    for (std::size_t k = 0; k < words_per_row_; ++k) row[k] |= vrow[k];
    for (std::size_t x = 0; x <= v; ++x) {
      if (!((vrow[x / 64] >> (x % 64)) & 1u)) continue;
      auto xs = right(x, desc);
      if (xs == kOutside) throw InvariantViolation("Bruhat closure left the slice");
      row[static_cast<std::size_t>(xs) / 64] |= std::uint64_t{1} << (static_cast<std::size_t>(xs) % 64);
    }
  }
}

std::optional<std::size_t> GroupSlice::index_of(const AffineElement& g) const {
  auto it = index_.find(g);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool GroupSlice::bruhat_leq(std::size_t x, std::size_t y) const {
  if (x >= size() || y >= size()) throw CoverageError("bruhat_leq: element outside slice");
  return (down_[y * words_per_row_ + x / 64] >> (x % 64)) & 1u;
}

std::vector<std::size_t> GroupSlice::below(std::size_t y) const {
  std::vector<std::size_t> out;
  for (std::size_t x = 0; x <= y; ++x)
    if (bruhat_leq(x, y)) out.push_back(x);
  return out;
}

std::pair<std::size_t, std::size_t> GroupSlice::shell(std::uint32_t len) const {
  if (len > cutoff_) return {size(), size()};
  return {shell_start_[len], shell_start_[len + 1]};
}

}  // namespace klext
