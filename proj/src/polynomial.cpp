#include "klext/polynomial.hpp"

#include "klext/error.hpp"

#include <algorithm>

namespace klext {

IntPolynomial IntPolynomial::monomial(std::uint32_t exp, const BigInt& coeff) {
  IntPolynomial p;
  if (coeff != 0) p.terms_.push_back({exp, coeff});
  return p;
}

IntPolynomial IntPolynomial::from_dense(const std::vector<BigInt>& coeffs) {
  IntPolynomial p;
  for (std::size_t e = 0; e < coeffs.size(); ++e)
    if (coeffs[e] != 0) p.terms_.push_back({static_cast<std::uint32_t>(e), coeffs[e]});
  return p;
}

BigInt IntPolynomial::coefficient(std::uint32_t exp) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), exp,
                             [](const Term& t, std::uint32_t e) { return t.exp < e; });
  if (it == terms_.end() || it->exp != exp) return 0;
  return it->coeff;
}

BigInt IntPolynomial::eval_at_one() const {
  BigInt s = 0;
  for (const auto& t : terms_) s += t.coeff;
  return s;
}

bool IntPolynomial::nonnegative() const {
  for (const auto& t : terms_)
    if (t.coeff < 0) return false;
  return true;
}

void IntPolynomial::add_scaled(const IntPolynomial& p, const BigInt& k, std::uint32_t shift) {
  if (k == 0 || p.terms_.empty()) return;
  std::vector<Term> out;
  out.reserve(terms_.size() + p.terms_.size());
  auto a = terms_.begin();
  auto b = p.terms_.begin();
  while (a != terms_.end() || b != p.terms_.end()) {
    if (b == p.terms_.end() || (a != terms_.end() && a->exp < b->exp + shift)) {
      out.push_back(std::move(*a++));
    } else if (a == terms_.end() || b->exp + shift < a->exp) {
      out.push_back({b->exp + shift, k * b->coeff});
      ++b;
    } else {
      BigInt c = a->coeff + k * b->coeff;
      if (c != 0) out.push_back({a->exp, std::move(c)});
      ++a;
      ++b;
    }
  }
  terms_ = std::move(out);
}

void IntPolynomial::accumulate_into(std::vector<BigInt>& acc, const BigInt& k, std::uint32_t shift) const {
  for (const auto& t : terms_) {
    const std::size_t e = t.exp + shift;
    if (e >= acc.size()) acc.resize(e + 1);
    acc[e] += k * t.coeff;
  }
}

IntPolynomial IntPolynomial::reversed(std::uint32_t d) const {
  if (degree() > static_cast<std::int64_t>(d)) throw InvalidArgument("IntPolynomial::reversed: degree exceeds shift");
  IntPolynomial p;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) p.terms_.push_back({d - it->exp, it->coeff});
  return p;
}

IntPolynomial operator*(const IntPolynomial& a, const IntPolynomial& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<BigInt> acc(static_cast<std::size_t>(a.degree() + b.degree() + 1));
  for (const auto& t : a.terms_) b.accumulate_into(acc, t.coeff, t.exp);
  return IntPolynomial::from_dense(acc);
}

std::string IntPolynomial::str(const std::string& var) const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& t : terms_) {
    BigInt c = t.coeff;
    if (out.empty()) {
      if (c < 0) {
        out += "-";
        c = -c;
      }
    } else {
      out += c < 0 ? " - " : " + ";
      if (c < 0) c = -c;
    }
    if (t.exp == 0 || c != 1) out += c.str();
    if (t.exp > 0) {
      out += var;
      if (t.exp > 1) out += "^" + std::to_string(t.exp);
    }
  }
  return out;
}

}  // namespace klext
