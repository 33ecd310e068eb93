#pragma once

// KL polynomials from R-polynomials: for x <= y with d = l(y) - l(x),
//   q^d P_{x,y}(q^{-1}) - P_{x,y}(q) = sum_{x < z <= y} R_{x,z} P_{z,y},
// and the degree bound makes P_{x,y} minus the part of the right side of degree
// <= (d-1)/2. R follows R_{x,y} = R_{xs,ys} if xs < x, else
// (q-1) R_{x,ys} + q R_{xs,ys}, for a right descent s of y.

#include "klext/weylaffine.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace oracle {

using Poly = std::vector<std::int64_t>;  // dense, index = exponent

inline void trim(Poly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

inline Poly mul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly c(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  trim(c);
  return c;
}

inline void add_to(Poly& a, const Poly& b, std::int64_t k = 1) {
  if (a.size() < b.size()) a.resize(b.size(), 0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] += k * b[i];
  trim(a);
}

class RPolyKL {
 public:
  explicit RPolyKL(const klext::GroupSlice& sl) : sl_(sl), n_(sl.size()), r_(n_ * n_), p_(n_ * n_), p_done_(n_ * n_, 0) {
    for (std::size_t y = 0; y < n_; ++y) fill_r(y);
  }

  const Poly& R(std::size_t x, std::size_t y) const { return r_[x * n_ + y]; }

  const Poly& P(std::size_t x, std::size_t y) {
    auto& slot = p_[x * n_ + y];
    if (p_done_[x * n_ + y]) return slot;
    p_done_[x * n_ + y] = 1;
    if (x == y) {
      slot = {1};
      return slot;
    }
    if (sl_.length(x) >= sl_.length(y)) return slot;
    Poly rhs;
    for (std::size_t z = 0; z < n_; ++z) {
      if (z == x || sl_.length(z) <= sl_.length(x) || sl_.length(z) > sl_.length(y)) continue;
      const auto& rz = R(x, z);
      if (rz.empty()) continue;
      add_to(rhs, mul(rz, P(z, y)));
    }
    const auto d = sl_.length(y) - sl_.length(x);
    Poly out;
    for (std::size_t e = 0; e < rhs.size() && 2 * e + 1 <= d; ++e) out.push_back(-rhs[e]);
    trim(out);
    slot = out;
    return slot;
  }

 private:
  void fill_r(std::size_t y) {
    if (y == 0) {
      r_[0] = {1};
      return;
    }
    int s = -1;
    for (int t : sl_.generator_ids()) {
      auto v = sl_.right(y, t);
      if (v != klext::GroupSlice::kOutside && sl_.length(static_cast<std::size_t>(v)) < sl_.length(y)) {
        s = t;
        break;
      }
    }
    const auto ys = static_cast<std::size_t>(sl_.right(y, s));
    for (std::size_t x = 0; x < n_; ++x) {
      if (sl_.length(x) > sl_.length(y)) continue;
      const auto xs_i = sl_.right(x, s);
      if (xs_i == klext::GroupSlice::kOutside) continue;
      const auto xs = static_cast<std::size_t>(xs_i);
      Poly out;
      if (sl_.length(xs) < sl_.length(x)) {
        out = R(xs, ys);
      } else {
        add_to(out, mul({-1, 1}, R(x, ys)));
        add_to(out, mul({0, 1}, R(xs, ys)));
      }
      r_[x * n_ + y] = out;
    }
  }

  const klext::GroupSlice& sl_;
  std::size_t n_;
  std::vector<Poly> r_;
  std::vector<Poly> p_;
  std::vector<std::uint8_t> p_done_;
};

}  // namespace oracle
