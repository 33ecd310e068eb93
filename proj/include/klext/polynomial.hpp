#pragma once

// Sparse polynomial in one variable with arbitrary-precision coefficients.
// Terms are kept sorted by exponent and zero coefficients are never stored.

#include "klext/bigint.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace klext {

class IntPolynomial {
 public:
  struct Term {
    std::uint32_t exp;
    BigInt coeff;
    friend bool operator==(const Term&, const Term&) = default;
  };

  IntPolynomial() = default;
  static IntPolynomial one() { return monomial(0, 1); }
  static IntPolynomial monomial(std::uint32_t exp, const BigInt& coeff);
  // Dense coefficient list, index = exponent; zeros are dropped.
  static IntPolynomial from_dense(const std::vector<BigInt>& coeffs);

  bool is_zero() const { return terms_.empty(); }
  // -1 for the zero polynomial.
  std::int64_t degree() const { return terms_.empty() ? -1 : static_cast<std::int64_t>(terms_.back().exp); }
  BigInt coefficient(std::uint32_t exp) const;
  BigInt eval_at_one() const;
  bool nonnegative() const;
  const std::vector<Term>& terms() const { return terms_; }

  // this += k * q^shift * p
  void add_scaled(const IntPolynomial& p, const BigInt& k, std::uint32_t shift = 0);
  // Adds into a dense accumulator: acc[e + shift] += k * c_e.
  void accumulate_into(std::vector<BigInt>& acc, const BigInt& k, std::uint32_t shift = 0) const;

  // q^d * p(q^{-1}); requires d >= degree().
  IntPolynomial reversed(std::uint32_t d) const;

  friend IntPolynomial operator+(IntPolynomial a, const IntPolynomial& b) {
    a.add_scaled(b, 1);
    return a;
  }
  friend IntPolynomial operator-(IntPolynomial a, const IntPolynomial& b) {
    a.add_scaled(b, -1);
    return a;
  }
  friend IntPolynomial operator*(const IntPolynomial& a, const IntPolynomial& b);
  friend bool operator==(const IntPolynomial&, const IntPolynomial&) = default;

  // "1 + 2q + q^3" in the given variable name.
  std::string str(const std::string& var = "q") const;

 private:
  std::vector<Term> terms_;
};

}  // namespace klext
