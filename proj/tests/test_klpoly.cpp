#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "klext/cache.hpp"
#include "klext/error.hpp"
#include "klext/klpoly.hpp"
#include "oracle_kl.hpp"

#include <filesystem>
#include <fstream>
#include <random>

using namespace klext;

namespace {

std::shared_ptr<const GroupSlice> make_slice(char t, int r, std::uint32_t L, bool affine = true) {
  auto g = std::make_shared<const AffineWeylGroup>(build_root_system(t, r));
  return std::make_shared<const GroupSlice>(g, L, affine);
}

KLTable filled(std::shared_ptr<const GroupSlice> sl, int workers = 1) {
  KLTable t(std::move(sl));
  t.fill(workers);
  return t;
}

std::vector<std::int64_t> dense(const IntPolynomial& p) {
  std::vector<std::int64_t> out;
  for (const auto& t : p.terms()) {
    if (out.size() <= t.exp) out.resize(t.exp + 1, 0);
    out[t.exp] = static_cast<std::int64_t>(t.coeff);
  }
  return out;
}

std::string read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::filesystem::path temp_dir(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / ("klext_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(d);
  std::filesystem::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("IntPolynomial arithmetic") {
  auto p = IntPolynomial::from_dense({1, 0, 2});
  CHECK(p.degree() == 2);
  CHECK(p.terms().size() == 2);
  CHECK(p.coefficient(1) == 0);
  CHECK(p.eval_at_one() == 3);
  auto q = IntPolynomial::monomial(1, 5);
  CHECK((p + q).str() == "1 + 5q + 2q^2");
  CHECK((p - p).is_zero());
  CHECK((p * q) == IntPolynomial::from_dense({0, 5, 0, 10}));
  CHECK(p.reversed(3) == IntPolynomial::from_dense({0, 2, 0, 1}));
  CHECK_THROWS_AS(p.reversed(1), InvalidArgument);
  IntPolynomial big = IntPolynomial::monomial(0, BigInt(1) << 200);
  big.add_scaled(big, -1);
  CHECK(big.is_zero());
  CHECK(IntPolynomial::from_dense({-1, 0, -1}).str("t") == "-1 - t^2");
  CHECK_FALSE(IntPolynomial::from_dense({1, -1}).nonnegative());
}

TEST_CASE("KL polynomials agree with the R-polynomial oracle") {
  struct Case {
    char t;
    int r;
    std::uint32_t L;
    bool affine;
  };
  for (auto c : std::vector<Case>{{'A', 3, 6, false}, {'B', 3, 9, false}, {'G', 2, 6, false}, {'D', 4, 12, false},
                                  {'A', 1, 12, true}, {'A', 2, 8, true}, {'B', 2, 8, true}, {'G', 2, 8, true}}) {
    CAPTURE(c.t);
    CAPTURE(c.r);
    auto sl = make_slice(c.t, c.r, c.L, c.affine);
    auto table = filled(sl);
    oracle::RPolyKL ref(*sl);
    for (std::size_t y = 0; y < sl->size(); ++y)
      for (std::size_t x = 0; x < sl->size(); ++x) CHECK(dense(table.P(x, y)) == ref.P(x, y));
  }
}

TEST_CASE("finite A3 has the two singular Schubert varieties") {
  auto sl = make_slice('A', 3, 6, false);
  auto t = filled(sl);
  std::size_t nontrivial_top = 0;
  for (std::size_t y = 0; y < sl->size(); ++y)
    if (t.P(0, y) != IntPolynomial::one()) {
      CHECK(t.P(0, y) == IntPolynomial::from_dense({1, 1}));
      ++nontrivial_top;
    }
  CHECK(nontrivial_top == 2);
}

TEST_CASE("affine A1 closed form") {
  auto sl = make_slice('A', 1, 20);
  auto t = filled(sl);
  for (std::size_t y = 0; y < sl->size(); ++y)
    for (std::size_t x = 0; x < sl->size(); ++x) {
      const bool le = sl->bruhat_leq(x, y);
      CHECK(t.P(x, y) == (le ? IntPolynomial::one() : IntPolynomial()));
      const auto dl = std::abs(static_cast<int>(sl->length(x)) - static_cast<int>(sl->length(y)));
      const bool comparable = le || sl->bruhat_leq(y, x);
      CHECK(t.mu(x, y) == ((comparable && dl == 1) ? 1 : 0));
    }
}

TEST_CASE("table axioms and parity vanishing") {
  for (auto [t, r, L, aff] : std::vector<std::tuple<char, int, std::uint32_t, bool>>{
           {'A', 2, 12, true}, {'B', 2, 10, true}, {'A', 3, 6, false}, {'B', 2, 4, false}}) {
    auto sl = make_slice(t, r, L, aff);
    auto table = filled(sl);
    for (std::size_t y = 0; y < sl->size(); ++y) {
      CHECK(table.P(y, y) == IntPolynomial::one());
      CHECK(table.mu(y, y) == 0);
      for (std::size_t x = 0; x < sl->size(); ++x) {
        const auto& p = table.P(x, y);
        if (!sl->bruhat_leq(x, y)) {
          CHECK(p.is_zero());
          continue;
        }
        CHECK(p.coefficient(0) == 1);
        CHECK(p.nonnegative());
        if (x != y) CHECK(2 * p.degree() <= static_cast<std::int64_t>(sl->length(y) - sl->length(x)) - 1);
        CHECK(table.mu(x, y) == table.mu(y, x));
        if ((sl->length(x) + sl->length(y)) % 2 == 0) CHECK(table.mu(x, y) == 0);
        for (std::int64_t m = 1; m < 8; m += 2) CHECK(table.kl_coefficient(x, y, m) == 0);
        if (x != y)
          for (std::int64_t m = sl->length(y) - sl->length(x); m < 20; ++m) CHECK(table.kl_coefficient(x, y, m) == 0);
      }
    }
  }
}

TEST_CASE("descent choice does not matter") {
  auto sl = make_slice('A', 2, 12);
  auto table = filled(sl);
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> pick(1, sl->size() - 1);
  std::size_t checked = 0;
  while (checked < 500) {
    const auto y = pick(rng);
    auto below = sl->below(y);
    const auto x = below[std::uniform_int_distribution<std::size_t>(0, below.size() - 1)(rng)];
    const Side side = rng() % 2 ? Side::right : Side::left;
    auto ds = table.descents(y, side);
    REQUIRE_FALSE(ds.empty());
    const int s = ds[std::uniform_int_distribution<std::size_t>(0, ds.size() - 1)(rng)];
    CHECK(table.recompute_entry(x, y, side, s) == table.P(x, y));
    ++checked;
  }
  auto d1 = table.descents(1, Side::right);
  REQUIRE(d1.size() == 1);
  const int ascent = d1[0] == 0 ? 1 : 0;
  CHECK_THROWS_AS(table.recompute_entry(0, 1, Side::right, ascent), InvalidArgument);
}

TEST_CASE("parallel fill matches the serial reference") {
  auto sl = make_slice('B', 2, 12);
  auto a = filled(sl, 1);
  auto b = filled(sl, 4);
  for (std::size_t y = 0; y < sl->size(); ++y) {
    REQUIRE(a.row(y).size() == b.row(y).size());
    for (std::size_t k = 0; k < a.row(y).size(); ++k) {
      CHECK(a.row(y)[k].x == b.row(y)[k].x);
      CHECK(a.row(y)[k].p == b.row(y)[k].p);
    }
  }
}

TEST_CASE("mu row sums on affine A1") {
  auto sl = make_slice('A', 1, 20);
  auto t = filled(sl);
  std::vector<std::size_t> dom;
  for (std::size_t i = 0; i < sl->size(); ++i)
    if (sl->dominant(i)) dom.push_back(i);
  REQUIRE(dom.size() == 20);
  for (std::size_t k = 0; k < dom.size(); ++k) {
    auto s = mu_row_sum(t, dom[k]);
    if (s.saturated) CHECK(s.value == (k == 0 ? 1 : 2));
    if (k < 15) CHECK(s.saturated);
  }
  CHECK_FALSE(mu_row_sum(t, dom.back()).saturated);
  CHECK_THROWS_AS(mu_row_sum(t, 0), InvalidArgument);
}

TEST_CASE("KL coefficient sums") {
  auto sl = make_slice('A', 1, 16);
  auto t = filled(sl);
  for (std::size_t y = 0; y < sl->size(); ++y) {
    if (!sl->dominant(y)) continue;
    CHECK(kl_coefficient_sum(t, y, 0) == 1);
    // m = 1: each dominant x < y with l(y) - l(x) - 1 = 0 contributes 1
    CHECK(kl_coefficient_sum(t, y, 1) == (sl->length(y) > 1 ? 1 : 0));
    CHECK(kl_coefficient_sum(t, y, static_cast<std::int64_t>(sl->length(y)) + 5) == 0);
  }
}

TEST_CASE("coverage errors") {
  auto sl = make_slice('A', 2, 4);
  auto t = filled(sl);
  CHECK_THROWS_AS(t.P(0, sl->size()), CoverageError);
  CHECK_THROWS_AS(t.mu(sl->size() + 3, 0), CoverageError);
}

TEST_CASE("cache round trip, truncation and corruption") {
  auto dir = temp_dir("klpoly");
  auto sl = make_slice('A', 2, 10);
  auto table = filled(sl);
  const auto& rs = sl->group().roots();
  auto sp = dir / slice_file_name(rs, true, 10);
  auto tp = dir / table_file_name(rs, true, 10);
  save_slice(*sl, sp);
  save_table(table, tp);

  auto sl2 = load_slice(sp, sl->group_ptr(), true, 10);
  auto t2 = load_table(tp, sl2);
  auto tp2 = dir / "again.bin";
  save_table(t2, tp2);
  CHECK(read_bytes(tp) == read_bytes(tp2));
  auto sp2 = dir / "again_slice.bin";
  save_slice(*sl2, sp2);
  CHECK(read_bytes(sp) == read_bytes(sp2));

  // a longer cached cutoff serves a shorter request
  auto small = load_slice(sp, sl->group_ptr(), true, 6);
  auto direct = make_slice('A', 2, 6);
  REQUIRE(small->size() == direct->size());
  auto ts = load_table(tp, small);
  auto td = filled(direct);
  for (std::size_t y = 0; y < small->size(); ++y)
    for (std::size_t x = 0; x <= y; ++x) CHECK(ts.P(x, y) == td.P(x, y));
  CHECK(find_cached(dir, "kl_A2_aff_L", 6) == tp);
  CHECK_FALSE(find_cached(dir, "kl_A2_aff_L", 11).has_value());
  CHECK_THROWS_AS(load_slice(sp, sl->group_ptr(), true, 11), CacheError);

  // flip one byte in the payload
  auto bytes = read_bytes(tp);
  bytes[bytes.size() / 2] ^= 0x40;
  {
    std::ofstream out(tp, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
  CHECK_THROWS_AS(load_table(tp, sl), CacheError);
  {
    std::ofstream out(sp, std::ios::binary | std::ios::trunc);
    out << "garbage";
  }
  CHECK_THROWS_AS(load_slice(sp, sl->group_ptr(), true, 10), CacheError);
  auto other = make_slice('B', 2, 10);
  CHECK_THROWS_AS(load_table(tp2, other), CacheError);
  std::filesystem::remove_all(dir);
}
