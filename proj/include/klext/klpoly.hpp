#pragma once

// Kazhdan-Lusztig polynomials P_{x,y} (in q = t^2) over a group slice.
//
// Rows are filled by length shell. For a right descent s of y with v = ys,
//   P_{x,y} = q^{1-c} P_{xs,v} + q^c P_{x,v}
//             - sum_{z < v, zs < z} mu(z,v) q^{(l(y)-l(z))/2} P_{x,z},
// with c = 1 if xs < x and 0 otherwise. Every row of a shell depends only on
// rows of smaller length, so the rows of one shell can be filled in parallel.

#include "klext/bigint.hpp"
#include "klext/polynomial.hpp"
#include "klext/weylaffine.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace klext {

enum class Side { right, left };

class KLTable {
 public:
  struct Entry {
    std::uint32_t x;
    IntPolynomial p;
  };
  struct MuEntry {
    std::uint32_t z;  // z < y
    BigInt mu;
  };

  explicit KLTable(std::shared_ptr<const GroupSlice> slice);

  const GroupSlice& slice() const { return *slice_; }
  std::shared_ptr<const GroupSlice> slice_ptr() const { return slice_; }
  std::size_t size() const { return rows_.size(); }
  bool complete() const;

  // Reference implementation: one row at a time, in index order.
  void fill_serial();
  // OpenMP over the rows of each length shell. workers <= 0 uses the OpenMP default.
  void fill_parallel(int workers = 0);
  void fill(int workers) { workers == 1 ? fill_serial() : fill_parallel(workers); }

  // P_{x,y}; the zero polynomial unless x <= y.
  const IntPolynomial& P(std::size_t x, std::size_t y) const;
  // mu(x,y), symmetric, 0 for incomparable pairs and equal parity.
  BigInt mu(std::size_t x, std::size_t y) const;
  // Coefficient of t^m in P_{x,y} (zero for odd m and m < 0).
  BigInt kl_coefficient(std::size_t x, std::size_t y, std::int64_t m) const;

  // Entries x <= y of row y, ascending in x.
  const std::vector<Entry>& row(std::size_t y) const;
  // z < y with mu(z,y) != 0, ascending in z.
  const std::vector<MuEntry>& mu_row(std::size_t y) const;

  // Descents of y on the given side.
  std::vector<int> descents(std::size_t y, Side side) const;
  // P_{x,y} recomputed from the completed smaller rows using the given descent.
  IntPolynomial recompute_entry(std::size_t x, std::size_t y, Side side, int s) const;

  // Used by the cache loader: install a row read from disk.
  void set_row(std::size_t y, std::vector<Entry> entries);

 private:
  void check(std::size_t i) const;
  void fill_row(std::size_t y);
  void finish_row(std::size_t y);
  const IntPolynomial* lookup(const std::vector<Entry>& row, std::size_t x) const;
  IntPolynomial combine(std::size_t x, std::size_t y, std::int32_t xs_idx, bool xs_lower, std::size_t v,
                        Side side, int s, const std::vector<Entry>* current_row) const;

  std::shared_ptr<const GroupSlice> slice_;
  std::vector<std::vector<Entry>> rows_;
  std::vector<std::vector<MuEntry>> mu_;
  std::vector<std::uint8_t> done_;
};

// Sum carrying an explicit exactness flag.
struct SaturatedSum {
  BigInt value = 0;
  bool saturated = false;
  std::size_t window = 0;   // dominant elements that may contribute
  std::size_t missing = 0;  // of those, how many lie outside the slice
};

// Smallest l > h that is odd (and prime to 3 for G2).
std::int64_t default_level(const RootSystem& rs);

// Dominant elements y whose weights y .l lambda_minus lie below
// x .l lambda_minus + 2n(l-1)rho; these are the only candidates for a nonzero
// Ext^n between the simple modules of x and y. Reports how many are missing
// from the slice.
struct ExtWindow {
  std::vector<std::size_t> members;
  std::size_t missing = 0;
};
ExtWindow ext_window(const GroupSlice& slice, std::size_t x, std::int64_t n, std::int64_t l,
                     const Weight& lambda_minus);

// sum over dominant y in the slice of mu(x,y); saturated when the Ext^1 window of
// x lies in the slice (level default_level, lambda^- = -2rho).
SaturatedSum mu_row_sum(const KLTable& table, std::size_t x);

// sum over dominant x <= y of c_{x,y}^{[l(y)-l(x)-m]}; always exact.
BigInt kl_coefficient_sum(const KLTable& table, std::size_t y, std::int64_t m);

}  // namespace klext
