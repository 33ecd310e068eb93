#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <string>
#include <vector>

namespace klext {

// Integer vector in the fundamental-weight basis: coordinate i is (lambda, alpha_i^vee).
// Also used for root-lattice vectors, which have integral weight coordinates.
class Weight {
 public:
  Weight() = default;
  explicit Weight(std::size_t rank) : c_(rank, 0) {}
  Weight(std::initializer_list<std::int64_t> init) : c_(init) {}
  explicit Weight(std::vector<std::int64_t> coords) : c_(std::move(coords)) {}

  std::size_t rank() const { return c_.size(); }
  std::int64_t operator[](std::size_t i) const { return c_[i]; }
  std::int64_t& operator[](std::size_t i) { return c_[i]; }
  const std::vector<std::int64_t>& coords() const { return c_; }

  bool is_zero() const {
    for (auto v : c_)
      if (v != 0) return false;
    return true;
  }
  bool is_dominant() const {
    for (auto v : c_)
      if (v < 0) return false;
    return true;
  }

  Weight& operator+=(const Weight& o) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  Weight& operator-=(const Weight& o) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Weight& operator*=(std::int64_t k) {
    for (auto& v : c_) v *= k;
    return *this;
  }
  friend Weight operator+(Weight a, const Weight& b) { return a += b; }
  friend Weight operator-(Weight a, const Weight& b) { return a -= b; }
  friend Weight operator*(std::int64_t k, Weight a) { return a *= k; }
  friend Weight operator-(Weight a) { return a *= -1; }

  friend bool operator==(const Weight&, const Weight&) = default;
  friend auto operator<=>(const Weight&, const Weight&) = default;

  // "(a,b,c)"
  std::string str() const;
  // Accepts "1,0,2", "(1,0,2)" or "1 0 2".
  static Weight parse(const std::string& text);

 private:
  std::vector<std::int64_t> c_;
};

struct WeightHash {
  std::size_t operator()(const Weight& w) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (auto v : w.coords()) {
      h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

}  // namespace klext
