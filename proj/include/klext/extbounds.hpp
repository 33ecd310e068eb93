#pragma once

// Ext dimensions in a regular quantum block, read off from KL data, and the
// explicit constants that bound them.
//
// A block is fixed by a level l and a point lambda^- of the closed antidominant
// alcove; its dominant weights are x .l lambda^- for dominant x. For x, z
// dominant,
//   dim Ext^1(L(x), L(y))   = mu(x, y),
//   dim Ext^n(L(x), nabla(z)) = coefficient of t^{l(x)-l(z)-n} in P_{z,x},
//   dim Ext^n(L(x), L(y))   = sum_{z, a+b=n} Ext^a(L(x), nabla(z)) Ext^b(L(y), nabla(z)).

#include "klext/bigint.hpp"
#include "klext/characters.hpp"
#include "klext/klpoly.hpp"
#include "klext/polynomial.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace klext {

// Warnings for levels outside the range where the character statements hold
// (l odd, prime to 3 for G2, l > h). The combinatorics is valid regardless.
std::vector<std::string> level_warnings(const RootSystem& rs, std::int64_t l);

class BlockContext {
 public:
  // lambda_minus must lie in the closed antidominant alcove at level l.
  BlockContext(std::shared_ptr<const KLTable> table, std::int64_t l, Weight lambda_minus);
  // Regular block of -2 rho.
  BlockContext(std::shared_ptr<const KLTable> table, std::int64_t l);

  std::int64_t level() const { return l_; }
  const Weight& lambda_minus() const { return lambda_minus_; }
  bool regular() const { return regular_; }
  const KLTable& kl() const { return *table_; }
  const GroupSlice& slice() const { return table_->slice(); }
  const AffineWeylGroup& group() const { return table_->slice().group(); }
  const RootSystem& roots() const { return group().roots(); }
  const std::vector<std::string>& warnings() const { return warnings_; }

  // x .l lambda^-.
  Weight weight(std::size_t x) const;
  // Slice index of a dominant weight of this block; nullopt if the weight lies
  // in another block. CoverageError if it belongs here but not to the slice.
  std::optional<std::size_t> element_of(const Weight& nu) const;
  // Dominant slice elements in slice order.
  const std::vector<std::size_t>& dominant_elements() const { return dominant_; }

  void require_regular(const char* op) const;
  void require_dominant(std::size_t x, const char* op) const;

 private:
  std::shared_ptr<const KLTable> table_;
  std::int64_t l_;
  Weight lambda_minus_;
  bool regular_ = true;
  std::vector<std::size_t> dominant_;
  std::vector<std::string> warnings_;
};

// dim Ext^1(L(x), L(y)) = mu(x, y) for dominant x, y.
BigInt ext1_simple_simple(const BlockContext& ctx, std::size_t x, std::size_t y);
// Weight form: unlinked weights give 0.
BigInt ext1_simple_simple(const BlockContext& ctx, const Weight& lambda, const Weight& nu);

// dim Ext^n(L(x), nabla(z)) from the coefficient of t^{l(x)-l(z)-n} in P_{z,x}.
BigInt extn_simple_costandard(const BlockContext& ctx, std::size_t x, std::size_t z, std::int64_t n);
// sum_n dim Ext^n(L(x), nabla(z)) t^n = t^{l(x)-l(z)} P_{z,x}(t^{-1}), in the variable t.
IntPolynomial ext_costandard_series(const BlockContext& ctx, std::size_t x, std::size_t z);

BigInt extn_simple_simple(const BlockContext& ctx, std::size_t x, std::size_t y, std::int64_t n);

// sum over dominant x <= y of dim Ext^m(L(y), nabla(x)), read from the t-series
// (second path to kl_coefficient_sum).
BigInt costandard_ext_sum(const BlockContext& ctx, std::size_t y, std::int64_t m);

// dim Ext^1(Delta^red(lambda), nabla(nu)) at character level: mu(w, y) for
// lambda = w .l lambda^-, nu = y .l lambda^-, y <= w; 0 if unlinked or y not <= w.
BigInt ext1_deltared_costandard(const BlockContext& ctx, const Weight& lambda, const Weight& nu);

// Singular pair lambda = w . lambda^-, nu = y . lambda^- with lambda^- on walls,
// pushed into the regular block ctx (of -2 rho): the sections v in the facet
// stabiliser of the translated standard module, with their mu against y.
struct SingularTranslationReport {
  Weight lambda_minus;                 // singular point of the pair
  std::uint64_t stabilizer = 1;        // |(W_{a,l})_x|
  struct Section {
    AffineElement v;                   // element of the stabiliser coset, w*v
    std::optional<std::size_t> index;  // slice index when dominant and present
    bool same_parity = false;          // same parity as y; these contribute 0
    BigInt mu = 0;
  };
  std::vector<Section> sections;
  BigInt total = 0;                    // sum of mu over opposite-parity sections
  BigInt bound = 0;                    // (stabilizer / 2) * E
  bool complete = true;                // every dominant section lies in the slice
};
SingularTranslationReport singular_translation_report(const BlockContext& ctx, const Weight& lambda,
                                                      const Weight& nu);

struct PimReport {
  Weight lambda0;
  std::int64_t l = 0;
  Weight top;                                      // 2(l-1)rho + w0 lambda0
  std::vector<std::pair<Weight, BigInt>> delta_multiplicities;  // [Q : Delta(nu)], nonzero, block order
  BigInt total_length = 0;
  bool highest_weight_check = false;
  bool singleton_block = false;                    // singular case answered by a 1x1 block
};
// PIM Q(lambda0) for restricted lambda0, through the decomposition matrix of
// its block truncated at the highest weight bound.
PimReport pim_length(const KLTable& table, const Weight& lambda0, std::int64_t l);

// sum over dominant y of dim Ext^n(L(x), L(y)); the candidates are the Ext^n
// window of x, and the flag is set when the whole window lies in the slice.
SaturatedSum sum_ext_n(const BlockContext& ctx, std::size_t x, std::int64_t n);

// E = h^{|Phi|} P((2h-2) rho), with (2h-2) rho read as the weight (2h-2) * rho.
BigInt constant_E(const RootSystem& rs);
// F = |W| E / 2.
BigInt constant_F(const RootSystem& rs);
// B_p = p^{|Phi|} P(2(p-1) rho).
BigInt p_bound(const RootSystem& rs, std::int64_t p);

struct BoundReport {
  std::string name;
  std::optional<std::int64_t> parameter;  // n or m where the constant has one
  std::optional<BigInt> formula_value;
  std::optional<BigInt> empirical_value;
  bool saturated = false;
  std::string provenance;
  bool consistent() const { return !formula_value || !empirical_value || *empirical_value <= *formula_value; }
};

struct BoundOptions {
  std::int64_t p = 2;                 // p (or l) for B_p and f
  std::vector<std::int64_t> ns{1};    // n for f and C'
  std::vector<std::int64_t> ms{0};    // m for d and C''
  const KLTable* table = nullptr;     // affine table for the empirical reports
  std::int64_t level = 0;             // block level for windows; 0 picks default_level
  int workers = 1;
};
std::vector<BoundReport> bound_constants(const RootSystem& rs, const BoundOptions& opt);

}  // namespace klext
