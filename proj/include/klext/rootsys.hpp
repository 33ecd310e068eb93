#pragma once

// Root systems and weight-lattice arithmetic for the irreducible types A-G.
//
// Weights live in the fundamental-weight basis, roots are generated by
// closure from the simple roots, and every pairing is an exact integer.
// Root-basis coordinates of a weight are rational; they are carried as
// integer numerators over the Cartan determinant.

#include "klext/bigint.hpp"
#include "klext/weight.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace klext {

using IntMatrix = std::vector<std::vector<std::int64_t>>;
using RootVec = std::vector<std::int64_t>;  // simple-root coordinates

struct RootSystem {
  char type = 'A';
  int rank = 0;
  // cartan[i][j] = (alpha_i, alpha_j^vee); row i is alpha_i in weight coordinates.
  IntMatrix cartan;
  // (alpha_i, alpha_i) / 2, normalised so the short simple roots have 1.
  std::vector<std::int64_t> half_norm;
  std::vector<RootVec> positive_roots;        // simple-root coordinates, sorted by height
  std::vector<Weight> positive_root_weights;  // same roots in weight coordinates
  // coroot of each positive root in simple-coroot coordinates
  std::vector<RootVec> positive_coroots;
  Weight rho;
  int coxeter_number = 0;
  std::uint64_t weyl_order = 0;
  std::size_t max_short_root = 0;  // index into positive_roots (alpha_0)
  std::size_t max_root = 0;        // index into positive_roots (alpha_max)
  std::int64_t torsion_exponent = 1;
  std::int64_t cartan_det = 1;  // |X/Q|
  // adj[i][j] = det * (C^{-1})[i][j]; root coords of lambda are (lambda * adj) / det.
  IntMatrix cartan_adj;

  std::size_t num_positive_roots() const { return positive_roots.size(); }
  std::size_t num_roots() const { return 2 * positive_roots.size(); }
  const RootVec& alpha0() const { return positive_roots[max_short_root]; }
  const RootVec& alpha_max() const { return positive_roots[max_root]; }
  Weight simple_root(std::size_t i) const;
  std::string label() const { return std::string(1, type) + std::to_string(rank); }
};

RootSystem build_root_system(char type, int rank);

// Weight coordinates of a root-lattice vector.
Weight root_to_weight(const RootSystem& rs, const RootVec& root);

// Numerators of the (rational) simple-root coordinates of lambda over cartan_det.
std::vector<std::int64_t> root_coords_scaled(const RootSystem& rs, const Weight& lambda);

// Integral simple-root coordinates; nullopt when lambda is not in Q.
std::optional<RootVec> root_coords(const RootSystem& rs, const Weight& lambda);

// (lambda, alpha^vee) for a root alpha given in simple-root coordinates.
std::int64_t pairing(const RootSystem& rs, const Weight& lambda, const RootVec& alpha);
// Same for the k-th positive root.
std::int64_t pairing_positive(const RootSystem& rs, const Weight& lambda, std::size_t k);

// cartan_det * (lambda, nu) under the W-invariant form with short roots of squared length 2.
std::int64_t inner_product_scaled(const RootSystem& rs, const Weight& lambda, const Weight& nu);

enum class Dominance { integral, rational };

// lambda <= nu: nu - lambda is a non-negative (integral or rational) combination of simple roots.
bool dominance_leq(const RootSystem& rs, const Weight& lambda, const Weight& nu,
                   Dominance variant = Dominance::integral);

// Kostant partition function of a vector given in simple-root coordinates.
// Zero for vectors with a negative coordinate. Throws ResourceLimit when the
// DP box exceeds max_cells.
BigInt kostant_partition(const RootSystem& rs, const RootVec& nu,
                         std::size_t max_cells = 50'000'000);
// Weight-coordinate overload; zero off the root lattice.
BigInt kostant_partition(const RootSystem& rs, const Weight& nu,
                         std::size_t max_cells = 50'000'000);

struct PAdicExpansion {
  std::vector<Weight> digits;  // lambda_0, lambda_1, ...; each in X^+_{1,p}
  Weight dagger;               // lambda^(1)
  int e_p = 0;                 // index of the last nonzero digit
};

PAdicExpansion p_adic_expansion(const Weight& lambda, std::int64_t p);

struct WeightClass {
  bool restricted_1l = false;
  bool restricted_el = false;
  bool regular_l = false;
  bool in_jantzen_region = false;
};

// e selects X^+_{e,l}; p (default l) is used for the Jantzen region.
WeightClass classify_weight(const RootSystem& rs, const Weight& lambda, std::int64_t l, int e = 1,
                            std::optional<std::int64_t> p = std::nullopt);

// Weight map attached to the special isogeny from type C_r to type B_r in
// characteristic 2: lambda -> tilde(lambda)^(1) in B_r fundamental coordinates.
Weight special_isogeny_image(const RootSystem& c_type, const Weight& lambda);

// e(m) = floor((m - 1)/(p - 1)) for m >= 1, and 0 for m <= 0.
std::int64_t largest_integer_e(std::int64_t m, std::int64_t p);

// f(Phi, n) = e(c * t(Phi) * n) + 1, c the largest coefficient of alpha_max.
std::int64_t generic_shift(const RootSystem& rs, std::int64_t p, std::int64_t n);

// Invariant factors of an integer matrix (Smith normal form diagonal, nonzero part).
std::vector<std::int64_t> smith_invariants(IntMatrix m);

// Convenience: the JSON-facing descriptor fields as a compact string ("A2").
bool is_valid_type(char type, int rank, std::string* why = nullptr);

}  // namespace klext
