#include "klext/klpoly.hpp"

#include "klext/error.hpp"

#include <algorithm>
#include <exception>

#include <omp.h>

namespace klext {

namespace {

const IntPolynomial kZero;

std::int32_t neighbor(const GroupSlice& sl, std::size_t i, int s, Side side) {
  return side == Side::right ? sl.right(i, s) : sl.left(i, s);
}

}  // namespace

KLTable::KLTable(std::shared_ptr<const GroupSlice> slice)
    : slice_(std::move(slice)), rows_(slice_->size()), mu_(slice_->size()), done_(slice_->size(), 0) {}

bool KLTable::complete() const {
  return std::all_of(done_.begin(), done_.end(), [](std::uint8_t d) { return d != 0; });
}

void KLTable::check(std::size_t i) const {
  if (i >= rows_.size())
    throw CoverageError("element index " + std::to_string(i) + " outside the slice (length cutoff " +
                        std::to_string(slice_->cutoff()) + "); enlarge the cutoff");
}

const IntPolynomial* KLTable::lookup(const std::vector<Entry>& row, std::size_t x) const {
  auto it = std::lower_bound(row.begin(), row.end(), x, [](const Entry& e, std::size_t v) { return e.x < v; });
  if (it == row.end() || it->x != x) return nullptr;
  return &it->p;
}

IntPolynomial KLTable::combine(std::size_t x, std::size_t y, std::int32_t xs_idx, bool xs_lower, std::size_t v,
                               Side side, int s, const std::vector<Entry>* current_row) const {
  const auto& sl = *slice_;
  const auto xs = static_cast<std::size_t>(xs_idx);
  if (xs_lower && current_row) {
    // P_{x,y} = P_{xs,y} when xs < x and ys < y
    const IntPolynomial* p = lookup(*current_row, xs);
    if (!p) throw InvariantViolation("KL fill: xs missing from its own row");
    return *p;
  }
  std::vector<BigInt> acc;
  if (const IntPolynomial* p = lookup(rows_[v], xs)) p->accumulate_into(acc, 1, xs_lower ? 0 : 1);
  if (const IntPolynomial* p = lookup(rows_[v], x)) p->accumulate_into(acc, 1, xs_lower ? 1 : 0);
  const auto ly = sl.length(y);
  for (const auto& [z, m] : mu_[v]) {
    const auto zs = neighbor(sl, z, s, side);
    if (zs == GroupSlice::kOutside || sl.length(static_cast<std::size_t>(zs)) > sl.length(z)) continue;
    if (const IntPolynomial* p = lookup(rows_[z], x)) p->accumulate_into(acc, -m, (ly - sl.length(z)) / 2);
  }
  return IntPolynomial::from_dense(acc);
}

void KLTable::fill_row(std::size_t y) {
  const auto& sl = *slice_;
  std::vector<Entry> row;
  if (y == 0) {
    row.push_back({0, IntPolynomial::one()});
    rows_[0] = std::move(row);
    finish_row(0);
    return;
  }
  auto ds = descents(y, Side::right);
  if (ds.empty()) throw InvariantViolation("element without a right descent");
  const int s = ds.front();
  const auto v = static_cast<std::size_t>(sl.right(y, s));
  for (std::size_t x : sl.below(y)) {
    if (x == y) {
      row.push_back({static_cast<std::uint32_t>(x), IntPolynomial::one()});
      continue;
    }
    const auto xs = sl.right(x, s);
    if (xs == GroupSlice::kOutside) throw CoverageError("KL recursion leaves the slice; enlarge the cutoff");
    const bool lower = sl.length(static_cast<std::size_t>(xs)) < sl.length(x);
    row.push_back({static_cast<std::uint32_t>(x), combine(x, y, xs, lower, v, Side::right, s, &row)});
  }
  rows_[y] = std::move(row);
  finish_row(y);
}

void KLTable::finish_row(std::size_t y) {
  const auto& sl = *slice_;
  std::vector<MuEntry> mus;
  const auto ly = sl.length(y);
  for (const auto& e : rows_[y]) {
    const auto lx = sl.length(e.x);
    if (e.x == y || (ly - lx) % 2 == 0) continue;
    BigInt c = e.p.coefficient((ly - lx - 1) / 2);
    if (c != 0) mus.push_back({e.x, std::move(c)});
  }
  mu_[y] = std::move(mus);
  done_[y] = 1;
}

void KLTable::fill_serial() {
  for (std::size_t y = 0; y < rows_.size(); ++y)
    if (!done_[y]) fill_row(y);
}

void KLTable::fill_parallel(int workers) {
  const auto& sl = *slice_;
  if (workers <= 0) workers = omp_get_max_threads();
  for (std::uint32_t len = 0; len <= sl.cutoff(); ++len) {
    auto [a, b] = sl.shell(len);
    if (a == b) continue;
    std::exception_ptr error;
    const auto lo = static_cast<std::int64_t>(a), hi = static_cast<std::int64_t>(b);
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
    for (std::int64_t y = lo; y < hi; ++y) {
      if (done_[static_cast<std::size_t>(y)]) continue;
      try {
        fill_row(static_cast<std::size_t>(y));
      } catch (...) {
#pragma omp critical(klext_fill_error)
        if (!error) error = std::current_exception();
      }
    }
    if (error) std::rethrow_exception(error);
  }
}

const IntPolynomial& KLTable::P(std::size_t x, std::size_t y) const {
  check(x);
  check(y);
  if (!done_[y]) throw CoverageError("KL row not computed");
  const IntPolynomial* p = lookup(rows_[y], x);
  return p ? *p : kZero;
}

BigInt KLTable::mu(std::size_t x, std::size_t y) const {
  check(x);
  check(y);
  if (x == y) return 0;
  const auto& sl = *slice_;
  std::size_t a = x, b = y;
  if (!sl.bruhat_leq(a, b)) {
    if (!sl.bruhat_leq(b, a)) return 0;
    std::swap(a, b);
  }
  const auto d = sl.length(b) - sl.length(a);
  if (d % 2 == 0) return 0;
  return P(a, b).coefficient((d - 1) / 2);
}

BigInt KLTable::kl_coefficient(std::size_t x, std::size_t y, std::int64_t m) const {
  if (m < 0 || m % 2 != 0) return 0;
  return P(x, y).coefficient(static_cast<std::uint32_t>(m / 2));
}

const std::vector<KLTable::Entry>& KLTable::row(std::size_t y) const {
  check(y);
  return rows_[y];
}

const std::vector<KLTable::MuEntry>& KLTable::mu_row(std::size_t y) const {
  check(y);
  return mu_[y];
}

std::vector<int> KLTable::descents(std::size_t y, Side side) const {
  const auto& sl = *slice_;
  std::vector<int> out;
  for (int s : sl.generator_ids()) {
    auto v = neighbor(sl, y, s, side);
    if (v != GroupSlice::kOutside && sl.length(static_cast<std::size_t>(v)) < sl.length(y)) out.push_back(s);
  }
  return out;
}

IntPolynomial KLTable::recompute_entry(std::size_t x, std::size_t y, Side side, int s) const {
  check(x);
  check(y);
  const auto& sl = *slice_;
  if (x == y) return IntPolynomial::one();
  if (!sl.bruhat_leq(x, y)) return {};
  const auto v = neighbor(sl, y, s, side);
  if (v == GroupSlice::kOutside || sl.length(static_cast<std::size_t>(v)) > sl.length(y))
    throw InvalidArgument("recompute_entry: s is not a descent of y");
  const auto xs = neighbor(sl, x, s, side);
  if (xs == GroupSlice::kOutside) throw CoverageError("KL recursion leaves the slice; enlarge the cutoff");
  const bool lower = sl.length(static_cast<std::size_t>(xs)) < sl.length(x);
  return combine(x, y, xs, lower, static_cast<std::size_t>(v), side, s, nullptr);
}

void KLTable::set_row(std::size_t y, std::vector<Entry> entries) {
  check(y);
  rows_[y] = std::move(entries);
  finish_row(y);
}

// ---------------------------------------------------------------------------

std::int64_t default_level(const RootSystem& rs) {
  std::int64_t l = rs.coxeter_number + 1;
  while (l % 2 == 0 || (rs.type == 'G' && l % 3 == 0)) ++l;
  return l;
}

ExtWindow ext_window(const GroupSlice& slice, std::size_t x, std::int64_t n, std::int64_t l,
                     const Weight& lambda_minus) {
  const auto& g = slice.group();
  const auto& rs = g.roots();
  const Weight lambda = g.dot(slice.element(x), lambda_minus, l);
  const Weight top = lambda + (2 * n * (l - 1)) * rs.rho;
  ExtWindow w;
  for (const auto& nu : dominant_weights_below(rs, top)) {
    auto f = factorize_weight(g, nu, l);
    if (f.lambda_minus != lambda_minus) continue;
    if (auto idx = slice.index_of(f.element))
      w.members.push_back(*idx);
    else
      ++w.missing;
  }
  std::sort(w.members.begin(), w.members.end());
  return w;
}

SaturatedSum mu_row_sum(const KLTable& table, std::size_t x) {
  const auto& sl = table.slice();
  if (!sl.affine()) throw InvalidArgument("mu_row_sum needs an affine slice");
  if (!sl.dominant(x)) throw InvalidArgument("mu_row_sum: x must be dominant");
  const auto& rs = sl.group().roots();
  SaturatedSum out;
  for (std::size_t y = 0; y < sl.size(); ++y)
    if (sl.dominant(y)) out.value += table.mu(x, y);
  auto w = ext_window(sl, x, 1, default_level(rs), -2 * rs.rho);
  out.window = w.members.size() + w.missing;
  out.missing = w.missing;
  out.saturated = w.missing == 0;
  return out;
}

BigInt kl_coefficient_sum(const KLTable& table, std::size_t y, std::int64_t m) {
  const auto& sl = table.slice();
  BigInt s = 0;
  for (const auto& e : table.row(y)) {
    if (!sl.dominant(e.x)) continue;
    const auto d = static_cast<std::int64_t>(sl.length(y)) - static_cast<std::int64_t>(sl.length(e.x));
    s += table.kl_coefficient(e.x, y, d - m);
  }
  return s;
}

}  // namespace klext
