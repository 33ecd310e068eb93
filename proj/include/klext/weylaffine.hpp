#pragma once

// Finite and affine Weyl groups.
//
// The affine group W_a = W x| Q acts on E by x -> w(x) + mu. Elements are kept
// in the normal form (w, mu) with w an index into the finite group table and mu
// a root-lattice vector in weight coordinates. The level-l dot action applies
// the scaling isomorphism first: (w, mu) .l x = w(x + rho) + l*mu - rho.
//
// Lengths come from the hyperplane count
//   l(w, mu) = sum_{alpha > 0} | (mu, alpha^vee) + [w^{-1} alpha < 0] |,
// which counts the walls H_{alpha,n} separating the base alcove from its image.

#include "klext/rootsys.hpp"
#include "klext/weight.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

namespace klext {

// Table of the finite Weyl group. Elements are matrices acting on weight
// coordinates (column vectors); element 0 is the identity and indices follow
// breadth-first order, so lengths are nondecreasing.
class FiniteWeylGroup {
 public:
  static constexpr std::size_t kDefaultMaxOrder = 4'000'000;

  explicit FiniteWeylGroup(const RootSystem& rs, std::size_t max_order = kDefaultMaxOrder);

  const RootSystem& roots() const { return *rs_; }
  std::size_t order() const { return lengths_.size(); }
  std::uint32_t length(std::uint32_t w) const { return lengths_[w]; }
  const std::vector<int>& reduced_word(std::uint32_t w) const { return words_[w]; }
  std::uint32_t inverse(std::uint32_t w) const { return inverse_[w]; }
  std::uint32_t multiply(std::uint32_t a, std::uint32_t b) const;
  std::uint32_t simple_reflection(int i) const { return simple_[i]; }
  std::uint32_t longest() const { return longest_; }
  // Reflection s_alpha for the k-th positive root.
  std::uint32_t reflection(std::size_t k) const { return reflections_[k]; }

  Weight act(std::uint32_t w, const Weight& lambda) const;
  // True when w^{-1}(alpha_k) is a negative root.
  bool inverts(std::uint32_t w, std::size_t k) const { return inv_neg_[w * nroots_ + k] != 0; }

  std::optional<std::uint32_t> find(const std::vector<std::int64_t>& matrix) const;

 private:
  std::vector<std::int64_t> matmul(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) const;
  Weight image_of_rho(const std::vector<std::int64_t>& m) const;

  const RootSystem* rs_;
  std::size_t n_;
  std::size_t nroots_;
  std::vector<std::vector<std::int64_t>> mats_;
  std::vector<std::uint32_t> lengths_;
  std::vector<std::vector<int>> words_;
  std::vector<std::uint32_t> inverse_;
  std::vector<std::uint32_t> simple_;
  std::vector<std::uint32_t> reflections_;
  std::vector<std::uint8_t> inv_neg_;
  std::uint32_t longest_ = 0;
  std::unordered_map<Weight, std::uint32_t, WeightHash> by_rho_image_;
};

struct AffineElement {
  std::uint32_t w = 0;  // finite part
  Weight mu;            // translation, a root-lattice vector in weight coordinates

  friend bool operator==(const AffineElement&, const AffineElement&) = default;
  friend auto operator<=>(const AffineElement&, const AffineElement&) = default;
};

struct AffineElementHash {
  std::size_t operator()(const AffineElement& g) const noexcept {
    return WeightHash{}(g.mu) * 31u + g.w;
  }
};

// Point of E with rational coordinates: num / den in the weight basis.
struct RationalPoint {
  Weight num;
  std::int64_t den = 1;
};

class AffineWeylGroup {
 public:
  AffineWeylGroup(RootSystem rs, std::size_t max_finite_order = FiniteWeylGroup::kDefaultMaxOrder);
  AffineWeylGroup(const AffineWeylGroup&) = delete;
  AffineWeylGroup& operator=(const AffineWeylGroup&) = delete;

  const RootSystem& roots() const { return rs_; }
  const FiniteWeylGroup& finite() const { return *finite_; }
  int rank() const { return rs_.rank; }

  AffineElement identity() const;
  AffineElement multiply(const AffineElement& a, const AffineElement& b) const;
  AffineElement inverse(const AffineElement& g) const;
  std::uint32_t length(const AffineElement& g) const;

  // Generators indexed 0..rank: index 0 is s_{alpha_0,-1}, index i >= 1 is s_{alpha_i}.
  int num_generators() const { return rs_.rank + 1; }
  const AffineElement& generator(int s) const { return gens_[s]; }
  AffineElement from_word(const std::vector<int>& word) const;
  AffineElement from_finite(std::uint32_t w) const;

  // Plain action on E (no rho shift), at level l.
  Weight act(const AffineElement& g, const Weight& x, std::int64_t l = 1) const;
  // Dot action g .l x.
  Weight dot(const AffineElement& g, const Weight& x, std::int64_t l = 1) const;

  // g is dominant iff g . C^- + rho lies in the closed dominant cone (level independent).
  bool is_dominant(const AffineElement& g) const;

  // Order of the stabiliser of x for the level-l dot action.
  std::uint64_t stabilizer_order(const RationalPoint& x, std::int64_t l) const;

  const std::vector<AffineElement>& generators() const { return gens_; }

 private:
  RootSystem rs_;
  std::unique_ptr<FiniteWeylGroup> finite_;
  std::vector<AffineElement> gens_;
};

struct Factorization {
  AffineElement element;     // g with g .l lambda_minus = lambda
  Weight lambda_minus;       // point of the closed antidominant alcove at level l
  bool regular = true;       // lambda_minus interior to C_l^-
  std::vector<int> wall_generators;  // generators fixing lambda_minus (singular case)
  std::uint64_t stabilizer = 1;
};

// lambda = g .l lambda_minus with lambda_minus in the closure of C_l^-. For
// singular weights g is the longest element of g * Stab(lambda_minus).
Factorization factorize_weight(const AffineWeylGroup& group, const Weight& lambda, std::int64_t l);

// All elements of the finite parabolic subgroup generated by the listed affine generators.
std::vector<AffineElement> parabolic_elements(const AffineWeylGroup& group, const std::vector<int>& gens,
                                              std::size_t max_elements = 1'000'000);

// Dominant weights nu <= top (integral dominance), in lexicographic order.
std::vector<Weight> dominant_weights_below(const RootSystem& rs, const Weight& top,
                                           std::size_t max_weights = 5'000'000);

// Breadth-first slice of W_a (or of W when affine == false) up to a length cutoff.
class GroupSlice {
 public:
  static constexpr std::size_t kDefaultMaxElements = 2'000'000;
  static constexpr std::int32_t kOutside = -1;

  GroupSlice(std::shared_ptr<const AffineWeylGroup> group, std::uint32_t cutoff, bool affine = true,
             std::size_t max_elements = kDefaultMaxElements);
  // Rebuild from stored elements (cache load). Elements must already be in slice order.
  GroupSlice(std::shared_ptr<const AffineWeylGroup> group, std::uint32_t cutoff, bool affine,
             std::vector<AffineElement> elements);

  const AffineWeylGroup& group() const { return *group_; }
  std::shared_ptr<const AffineWeylGroup> group_ptr() const { return group_; }
  bool affine() const { return affine_; }
  std::uint32_t cutoff() const { return cutoff_; }
  std::size_t size() const { return elements_.size(); }
  const AffineElement& element(std::size_t i) const { return elements_[i]; }
  const std::vector<AffineElement>& elements() const { return elements_; }
  std::uint32_t length(std::size_t i) const { return lengths_[i]; }
  bool dominant(std::size_t i) const { return dominant_[i] != 0; }

  // Generator ids available in this slice (0..rank for affine, 1..rank for finite).
  const std::vector<int>& generator_ids() const { return gen_ids_; }
  // Index of element(i) * s, or kOutside.
  std::int32_t right(std::size_t i, int s) const { return neighbors_[i * stride_ + s]; }
  // Index of s * element(i), or kOutside.
  std::int32_t left(std::size_t i, int s) const { return left_neighbors_[i * stride_ + s]; }

  std::optional<std::size_t> index_of(const AffineElement& g) const;
  bool bruhat_leq(std::size_t x, std::size_t y) const;
  // Elements x <= y, ascending.
  std::vector<std::size_t> below(std::size_t y) const;

  // Half-open index range of the elements of a given length.
  std::pair<std::size_t, std::size_t> shell(std::uint32_t len) const;

 private:
  void finish();

  std::shared_ptr<const AffineWeylGroup> group_;
  std::uint32_t cutoff_;
  bool affine_;
  std::vector<AffineElement> elements_;
  std::vector<std::uint32_t> lengths_;
  std::vector<std::uint8_t> dominant_;
  std::vector<int> gen_ids_;
  std::size_t stride_ = 0;
  std::vector<std::int32_t> neighbors_;
  std::vector<std::int32_t> left_neighbors_;
  std::unordered_map<AffineElement, std::size_t, AffineElementHash> index_;
  std::size_t words_per_row_ = 0;
  std::vector<std::uint64_t> down_;  // Bruhat lower sets as bit rows
  std::vector<std::size_t> shell_start_;
};

}  // namespace klext
