#pragma once

// Weyl characters, the Kazhdan-Lusztig character chi_KL, decomposition
// matrices and tensor-product decompositions.
//
// A W-invariant character is stored by its dominant weights; the full weight
// multiset is produced on demand.

#include "klext/bigint.hpp"
#include "klext/klpoly.hpp"
#include "klext/rootsys.hpp"
#include "klext/weylaffine.hpp"

#include <map>
#include <vector>

namespace klext {

using WeightMap = std::map<Weight, BigInt>;

struct Character {
  WeightMap dominant;  // multiplicities of dominant weights

  BigInt multiplicity(const RootSystem& rs, const Weight& mu) const;
  BigInt dimension(const RootSystem& rs) const;
  // Every weight with its multiplicity.
  WeightMap expand(const RootSystem& rs) const;
};

// Dominant representative of the W-orbit of mu.
Weight dominant_conjugate(const RootSystem& rs, Weight mu);
// The W-orbit of mu, sorted.
std::vector<Weight> weyl_orbit(const RootSystem& rs, const Weight& mu);

// Weyl's character chi(lambda) by Freudenthal's recursion.
Character weyl_character(const RootSystem& rs, const Weight& lambda);
BigInt weyl_dimension(const RootSystem& rs, const Weight& lambda);

// Memo of Weyl characters for repeated use; not thread safe.
class CharacterCache {
 public:
  explicit CharacterCache(const RootSystem& rs) : rs_(rs) {}
  const Character& get(const Weight& lambda);

 private:
  const RootSystem& rs_;
  std::map<Weight, Character> memo_;
};

// Expand a formal combination sum_nu c_nu chi(nu) into a character.
Character combine_characters(const RootSystem& rs, const WeightMap& coeffs, CharacterCache* cache = nullptr);
// Inverse: write a W-invariant character as a combination of Weyl characters.
WeightMap weyl_decompose(const RootSystem& rs, Character ch, CharacterCache* cache = nullptr);

// chi_KL(lambda, l) = sum_{y <= w, y dominant} (-1)^{l(w)-l(y)} P_{y,w}(1) chi(y .l lambda^-),
// for lambda = w .l lambda^- regular. Keys are the weights y .l lambda^-.
WeightMap chi_kl(const KLTable& table, const Weight& lambda, std::int64_t l);

// The part of a regular linkage class below a weight ideal, as decomposition data.
//   signed_kl[i][j] = (-1)^{l(w_i)-l(w_j)} P_{w_j,w_i}(1)   (row i: simple L(w_i .l lambda^-))
//   decomp = signed_kl^{-1}; decomp[i][j] = [Delta(nu_i) : L(nu_j)].
struct DecompositionMatrix {
  std::int64_t l = 0;
  Weight lambda_minus;
  Weight cutoff;
  std::vector<Weight> weights;         // block order: nondecreasing length of the elements
  std::vector<std::size_t> elements;   // slice indices
  std::vector<std::vector<BigInt>> signed_kl;
  std::vector<std::vector<BigInt>> decomp;

  std::size_t size() const { return weights.size(); }
  std::optional<std::size_t> position(const Weight& nu) const;
};

// Every dominant weight <= cutoff in the linkage class of lambda_minus must
// correspond to an element of the table's slice, otherwise CoverageError.
DecompositionMatrix decomposition_matrix(const KLTable& table, const Weight& lambda_minus, std::int64_t l,
                                         const Weight& cutoff);

struct DecompositionCheck {
  bool inverse_ok = true;      // A * D == I
  bool nonnegative = true;     // D >= 0
  bool resubstitution_ok = true;
  std::vector<std::string> problems;
  bool ok() const { return inverse_ok && nonnegative && resubstitution_ok; }
};

// Verifies A*D = I, D >= 0 and chi(nu) = sum_mu D[nu][mu] ch L(mu) as characters,
// where ch L(mu) is the row of A expanded in Weyl characters.
DecompositionCheck check_decomposition(const RootSystem& rs, const DecompositionMatrix& m,
                                       bool expand_characters = true);

// Multiplicities of L(tau) in L(lambda) (x) L(nu) over C. Character
// multiplication runs over the weights of chi(lambda), split across workers.
WeightMap tensor_decompose(const RootSystem& rs, const Weight& lambda, const Weight& nu, int workers = 1,
                           CharacterCache* cache = nullptr);

}  // namespace klext
