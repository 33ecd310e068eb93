#include "klext/extbounds.hpp"

#include "klext/error.hpp"

#include <omp.h>

#include <algorithm>
#include <exception>

namespace klext {

namespace {

BigInt power(std::int64_t base, std::size_t exp) {
  BigInt r = 1;
  for (std::size_t i = 0; i < exp; ++i) r *= base;
  return r;
}

std::int64_t len_diff(const GroupSlice& sl, std::size_t x, std::size_t z) {
  return static_cast<std::int64_t>(sl.length(x)) - static_cast<std::int64_t>(sl.length(z));
}

// Factorization of a dominant weight against the slice: regular elements only.
struct Located {
  Factorization f;
  std::size_t index = 0;
};

Located locate(const KLTable& table, const Weight& lambda, std::int64_t l, const char* op) {
  const auto& sl = table.slice();
  if (!lambda.is_dominant()) throw InvalidArgument(std::string(op) + ": " + lambda.str() + " is not dominant");
  Located loc{factorize_weight(sl.group(), lambda, l), 0};
  if (!loc.f.regular)
    throw InvalidArgument(std::string(op) + ": " + lambda.str() + " is " + std::to_string(l) +
                          "-singular; see the singular translation report");
  auto idx = sl.index_of(loc.f.element);
  if (!idx)
    throw CoverageError(std::string(op) + ": " + lambda.str() + " needs an element of length " +
                        std::to_string(sl.group().length(loc.f.element)) + " beyond the cutoff " +
                        std::to_string(sl.cutoff()));
  loc.index = *idx;
  return loc;
}

std::string provenance(const GroupSlice& sl) {
  return sl.group().roots().label() + (sl.affine() ? " affine" : " finite") + " slice, truncated@" +
         std::to_string(sl.cutoff());
}

}  // namespace

std::vector<std::string> level_warnings(const RootSystem& rs, std::int64_t l) {
  std::vector<std::string> w;
  if (l % 2 == 0) w.push_back("level " + std::to_string(l) + " is even");
  if (rs.type == 'G' && l % 3 == 0) w.push_back("level " + std::to_string(l) + " is divisible by 3 in type G2");
  if (l <= rs.coxeter_number)
    w.push_back("level " + std::to_string(l) + " does not exceed the Coxeter number " +
                std::to_string(rs.coxeter_number));
  return w;
}

// ---------------------------------------------------------------------------
// BlockContext

BlockContext::BlockContext(std::shared_ptr<const KLTable> table, std::int64_t l, Weight lambda_minus)
    : table_(std::move(table)), l_(l), lambda_minus_(std::move(lambda_minus)) {
  if (!table_) throw InvalidArgument("BlockContext: missing KL table");
  if (l_ < 1) throw InvalidArgument("BlockContext: level must be positive");
  const auto& sl = table_->slice();
  if (!sl.affine()) throw InvalidArgument("BlockContext: needs an affine slice");
  if (lambda_minus_.rank() != static_cast<std::size_t>(sl.group().rank()))
    throw InvalidArgument("BlockContext: weight " + lambda_minus_.str() + " has the wrong rank");
  auto f = factorize_weight(sl.group(), lambda_minus_, l_);
  if (f.lambda_minus != lambda_minus_)
    throw InvalidArgument("BlockContext: " + lambda_minus_.str() + " is not in the closed antidominant alcove at level " +
                          std::to_string(l_));
  regular_ = f.regular;
  for (std::size_t x = 0; x < sl.size(); ++x)
    if (sl.dominant(x)) dominant_.push_back(x);
  warnings_ = level_warnings(roots(), l_);
}

BlockContext::BlockContext(std::shared_ptr<const KLTable> table, std::int64_t l)
    : BlockContext(table, l, table ? -2 * table->slice().group().roots().rho : Weight{}) {}

Weight BlockContext::weight(std::size_t x) const { return group().dot(slice().element(x), lambda_minus_, l_); }

std::optional<std::size_t> BlockContext::element_of(const Weight& nu) const {
  if (!nu.is_dominant()) throw InvalidArgument("element_of: " + nu.str() + " is not dominant");
  auto f = factorize_weight(group(), nu, l_);
  if (f.lambda_minus != lambda_minus_) return std::nullopt;
  auto idx = slice().index_of(f.element);
  if (!idx)
    throw CoverageError("element_of: " + nu.str() + " needs an element of length " +
                        std::to_string(group().length(f.element)) + " beyond the cutoff " +
                        std::to_string(slice().cutoff()));
  return idx;
}

void BlockContext::require_regular(const char* op) const {
  if (!regular_) throw InvalidArgument(std::string(op) + ": block of " + lambda_minus_.str() + " is singular");
}

void BlockContext::require_dominant(std::size_t x, const char* op) const {
  if (x >= slice().size()) throw CoverageError(std::string(op) + ": element index outside the slice");
  if (!slice().dominant(x)) throw InvalidArgument(std::string(op) + ": element " + std::to_string(x) + " is not dominant");
}

// ---------------------------------------------------------------------------
// Ext dimensions

BigInt ext1_simple_simple(const BlockContext& ctx, std::size_t x, std::size_t y) {
  ctx.require_regular("ext1");
  ctx.require_dominant(x, "ext1");
  ctx.require_dominant(y, "ext1");
  return ctx.kl().mu(x, y);
}

BigInt ext1_simple_simple(const BlockContext& ctx, const Weight& lambda, const Weight& nu) {
  const auto fl = factorize_weight(ctx.group(), lambda, ctx.level());
  const auto fn = factorize_weight(ctx.group(), nu, ctx.level());
  if (fl.lambda_minus != fn.lambda_minus) return 0;
  auto a = locate(ctx.kl(), lambda, ctx.level(), "ext1");
  auto b = locate(ctx.kl(), nu, ctx.level(), "ext1");
  return ctx.kl().mu(a.index, b.index);
}

BigInt extn_simple_costandard(const BlockContext& ctx, std::size_t x, std::size_t z, std::int64_t n) {
  ctx.require_regular("extn");
  ctx.require_dominant(x, "extn");
  ctx.require_dominant(z, "extn");
  if (n < 0 || !ctx.slice().bruhat_leq(z, x)) return 0;
  return ctx.kl().kl_coefficient(z, x, len_diff(ctx.slice(), x, z) - n);
}

IntPolynomial ext_costandard_series(const BlockContext& ctx, std::size_t x, std::size_t z) {
  ctx.require_regular("extn");
  ctx.require_dominant(x, "extn");
  ctx.require_dominant(z, "extn");
  if (!ctx.slice().bruhat_leq(z, x)) return {};
  // P_{z,x} is stored in q = t^2.
  IntPolynomial in_t;
  for (const auto& term : ctx.kl().P(z, x).terms()) in_t.add_scaled(IntPolynomial::monomial(2 * term.exp, term.coeff), 1);
  return in_t.reversed(static_cast<std::uint32_t>(len_diff(ctx.slice(), x, z)));
}

BigInt extn_simple_simple(const BlockContext& ctx, std::size_t x, std::size_t y, std::int64_t n) {
  ctx.require_regular("extn");
  ctx.require_dominant(x, "extn");
  ctx.require_dominant(y, "extn");
  if (n < 0) return 0;
  const auto& sl = ctx.slice();
  BigInt total = 0;
  for (std::size_t z : sl.below(x)) {
    if (!sl.dominant(z) || !sl.bruhat_leq(z, y)) continue;
    for (std::int64_t a = 0; a <= n; ++a) {
      BigInt left = extn_simple_costandard(ctx, x, z, a);
      if (left == 0) continue;
      total += left * extn_simple_costandard(ctx, y, z, n - a);
    }
  }
  return total;
}

BigInt costandard_ext_sum(const BlockContext& ctx, std::size_t y, std::int64_t m) {
  ctx.require_regular("klsum");
  ctx.require_dominant(y, "klsum");
  if (m < 0) return 0;
  const auto& sl = ctx.slice();
  BigInt total = 0;
  for (std::size_t x : sl.below(y))
    if (sl.dominant(x)) total += ext_costandard_series(ctx, y, x).coefficient(static_cast<std::uint32_t>(m));
  return total;
}

BigInt ext1_deltared_costandard(const BlockContext& ctx, const Weight& lambda, const Weight& nu) {
  const auto fl = factorize_weight(ctx.group(), lambda, ctx.level());
  const auto fn = factorize_weight(ctx.group(), nu, ctx.level());
  if (fl.lambda_minus != fn.lambda_minus) return 0;
  auto w = locate(ctx.kl(), lambda, ctx.level(), "ext1-deltared");
  auto y = locate(ctx.kl(), nu, ctx.level(), "ext1-deltared");
  if (!ctx.slice().bruhat_leq(y.index, w.index)) return 0;
  return ctx.kl().mu(w.index, y.index);
}

SingularTranslationReport singular_translation_report(const BlockContext& ctx, const Weight& lambda,
                                                      const Weight& nu) {
  ctx.require_regular("singular report");
  const auto& g = ctx.group();
  const auto& sl = ctx.slice();
  if (!lambda.is_dominant() || !nu.is_dominant())
    throw InvalidArgument("singular report: weights must be dominant");
  const auto fl = factorize_weight(g, lambda, ctx.level());
  const auto fn = factorize_weight(g, nu, ctx.level());
  SingularTranslationReport r;
  r.lambda_minus = fl.lambda_minus;
  if (fl.lambda_minus != fn.lambda_minus) return r;  // unlinked: everything vanishes
  if (fl.regular) throw InvalidArgument("singular report: " + lambda.str() + " is regular; use ext1");
  r.stabilizer = fl.stabilizer;
  auto y = sl.index_of(fn.element);
  if (!y) throw CoverageError("singular report: " + nu.str() + " lies outside the slice");
  for (const auto& v : parabolic_elements(g, fl.wall_generators)) {
    SingularTranslationReport::Section s;
    s.v = g.multiply(fl.element, v);
    s.same_parity = (g.length(s.v) + sl.length(*y)) % 2 == 0;
    if (g.is_dominant(s.v)) {
      s.index = sl.index_of(s.v);
      if (!s.index)
        r.complete = false;
      else if (!s.same_parity)
        s.mu = ctx.kl().mu(*s.index, *y);
    }
    r.total += s.mu;
    r.sections.push_back(std::move(s));
  }
  r.bound = BigInt(r.stabilizer / 2) * constant_E(ctx.roots());
  return r;
}

// ---------------------------------------------------------------------------
// PIMs

PimReport pim_length(const KLTable& table, const Weight& lambda0, std::int64_t l) {
  const auto& sl = table.slice();
  const auto& g = sl.group();
  const auto& rs = g.roots();
  if (!sl.affine()) throw InvalidArgument("pim: needs an affine slice");
  if (!lambda0.is_dominant()) throw InvalidArgument("pim: " + lambda0.str() + " is not dominant");
  for (int i = 0; i < rs.rank; ++i)
    if (lambda0[i] >= l) throw InvalidArgument("pim: " + lambda0.str() + " is not " + std::to_string(l) + "-restricted");
  PimReport r;
  r.lambda0 = lambda0;
  r.l = l;
  r.top = (2 * (l - 1)) * rs.rho + g.finite().act(g.finite().longest(), lambda0);
  const auto f = factorize_weight(g, lambda0, l);
  if (!f.regular) {
    // Only the case where the block below the top is lambda0 alone is decided.
    std::vector<Weight> linked;
    for (const auto& nu : dominant_weights_below(rs, r.top))
      if (factorize_weight(g, nu, l).lambda_minus == f.lambda_minus) linked.push_back(nu);
    if (linked.size() != 1 || linked[0] != lambda0)
      throw InvalidArgument("pim: " + lambda0.str() + " is singular and its block below " + r.top.str() +
                            " is not a singleton");
    r.singleton_block = true;
    r.delta_multiplicities.emplace_back(lambda0, 1);
    r.total_length = 1;
    r.highest_weight_check = lambda0 == r.top;
    return r;
  }
  const auto m = decomposition_matrix(table, f.lambda_minus, l, r.top);
  const auto j = m.position(lambda0);
  if (!j) throw InvariantViolation("pim: " + lambda0.str() + " missing from its own block");
  bool top_seen = false, below_top = true;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const BigInt& c = m.decomp[i][*j];
    if (c == 0) continue;
    BigInt row = 0;
    for (const auto& v : m.decomp[i]) row += v;
    r.delta_multiplicities.emplace_back(m.weights[i], c);
    r.total_length += c * row;
    if (m.weights[i] == r.top) top_seen = true;
    if (!dominance_leq(rs, m.weights[i], r.top)) below_top = false;
  }
  r.highest_weight_check = top_seen && below_top;
  return r;
}

// ---------------------------------------------------------------------------
// Sums

SaturatedSum sum_ext_n(const BlockContext& ctx, std::size_t x, std::int64_t n) {
  ctx.require_regular("extsum");
  ctx.require_dominant(x, "extsum");
  const auto& dom = ctx.dominant_elements();
  std::vector<BigInt> terms(dom.size());
  for (std::size_t k = 0; k < dom.size(); ++k) terms[k] = extn_simple_simple(ctx, x, dom[k], n);
  SaturatedSum out;
  for (const auto& t : terms) out.value += t;
  auto w = ext_window(ctx.slice(), x, std::max<std::int64_t>(n, 0), ctx.level(), ctx.lambda_minus());
  out.window = w.members.size() + w.missing;
  out.missing = w.missing;
  out.saturated = w.missing == 0;
  return out;
}

// ---------------------------------------------------------------------------
// Constants

BigInt constant_E(const RootSystem& rs) {
  const std::int64_t h = rs.coxeter_number;
  return power(h, rs.num_roots()) * kostant_partition(rs, (2 * h - 2) * rs.rho);
}

BigInt constant_F(const RootSystem& rs) { return BigInt(rs.weyl_order) * constant_E(rs) / 2; }

BigInt p_bound(const RootSystem& rs, std::int64_t p) {
  if (p < 2) throw InvalidArgument("p_bound: p must be at least 2");
  return power(p, rs.num_roots()) * kostant_partition(rs, (2 * (p - 1)) * rs.rho);
}

std::vector<BoundReport> bound_constants(const RootSystem& rs, const BoundOptions& opt) {
  std::vector<BoundReport> out;
  const std::string formula = "closed formula, exact";
  out.push_back({"E", std::nullopt, constant_E(rs), std::nullopt, true, formula});
  out.push_back({"F", std::nullopt, constant_F(rs), std::nullopt, true, formula});
  out.push_back({"B_p", std::nullopt, p_bound(rs, opt.p), std::nullopt, true, formula});
  for (auto n : opt.ns) out.push_back({"f", n, BigInt(generic_shift(rs, opt.p, n)), std::nullopt, true, formula});
  if (!opt.table) return out;

  const KLTable& table = *opt.table;
  const auto& sl = table.slice();
  if (!sl.affine()) throw InvalidArgument("bounds: the empirical reports need an affine table");
  if (sl.group().roots().label() != rs.label()) throw InvalidArgument("bounds: table is for another root system");
  const std::int64_t l = opt.level > 0 ? opt.level : default_level(rs);
  // Non-owning handle; the table outlives this call.
  BlockContext ctx(std::shared_ptr<const KLTable>(std::shared_ptr<const KLTable>{}, &table), l);
  const auto& dom = ctx.dominant_elements();
  const std::string prov = provenance(sl);

  // mu over dominant pairs; every pair shows up in the mu row of its larger member.
  BigInt max_mu = 0;
  std::vector<std::size_t> partners(sl.size(), 0);
  for (std::size_t y : dom)
    for (const auto& e : table.mu_row(y))
      if (sl.dominant(e.z)) {
        max_mu = std::max(max_mu, e.mu);
        ++partners[y];
        ++partners[e.z];
      }
  for (auto& r : out)
    if (r.name == "E" || r.name == "F" || r.name == "B_p") {
      r.empirical_value = max_mu;
      r.saturated = false;  // the flag describes the empirical part once one is attached
      r.provenance = formula + "; empirical max mu over dominant pairs of the " + prov;
    }

  // Ext^1 partner counts, over elements whose Ext^1 window lies in the slice.
  BigInt max_partners = 0;
  for (std::size_t x : dom)
    if (ext_window(sl, x, 1, l, ctx.lambda_minus()).missing == 0)
      max_partners = std::max(max_partners, BigInt(partners[x]));
  out.push_back({"R_truncated", std::nullopt, std::nullopt, max_partners, false,
                 "max number of dominant y with mu(x,y) != 0 over saturated x; " + prov});

  const int workers = opt.workers <= 0 ? omp_get_max_threads() : opt.workers;
  for (auto n : opt.ns) {
    // Each x is independent; the maximum is taken afterwards in index order.
    std::vector<SaturatedSum> sums(dom.size());
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic) num_threads(workers)
    for (std::int64_t k = 0; k < static_cast<std::int64_t>(dom.size()); ++k) {
      try {
        sums[static_cast<std::size_t>(k)] = sum_ext_n(ctx, dom[static_cast<std::size_t>(k)], n);
      } catch (...) {
#pragma omp critical
        if (!err) err = std::current_exception();
      }
    }
    if (err) std::rethrow_exception(err);
    BigInt best = 0;
    for (const auto& s : sums)
      if (s.saturated) best = std::max(best, s.value);
    out.push_back({"C'_empirical", n, std::nullopt, best, false,
                   "max of saturated sums of dim Ext^n(L(x), L(y)) over y; " + prov});
  }
  for (auto m : opt.ms) {
    BigInt best_sum = 0, best_coeff = 0;
    for (std::size_t y : dom) {
      best_sum = std::max(best_sum, kl_coefficient_sum(table, y, m));
      for (const auto& e : table.row(y))
        if (sl.dominant(e.x))
          best_coeff = std::max(best_coeff, table.kl_coefficient(e.x, y, len_diff(sl, y, e.x) - m));
    }
    out.push_back({"C''_empirical", m, std::nullopt, best_sum, false,
                   "max over dominant y of sum_x c_{x,y}^[l(y)-l(x)-m]; " + prov});
    out.push_back({"d_empirical", m, std::nullopt, best_coeff, false,
                   "max over dominant x <= y of c_{x,y}^[l(y)-l(x)-m]; " + prov});
  }
  return out;
}

}  // namespace klext
