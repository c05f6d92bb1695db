#include "lcdiag/poly.hpp"

#include <cmath>
#include <numeric>

namespace lcdiag {

namespace {
unsigned expo_degree(const Expo& e) {
  return std::accumulate(e.begin(), e.end(), 0u);
}
}  // namespace

TruncPoly TruncPoly::constant(std::size_t arity, const Rat& c,
                              std::optional<unsigned> trunc) {
  TruncPoly p(arity, trunc);
  p.add_term(Expo(arity, 0), c);
  return p;
}

TruncPoly TruncPoly::monomial(std::size_t arity, const Expo& e, const Rat& c,
                              std::optional<unsigned> trunc) {
  if (e.size() != arity) throw std::invalid_argument("monomial arity mismatch");
  TruncPoly p(arity, trunc);
  p.add_term(e, c);
  return p;
}

TruncPoly TruncPoly::var(std::size_t arity, std::size_t i,
                         std::optional<unsigned> trunc) {
  Expo e(arity, 0);
  e.at(i) = 1;
  return monomial(arity, e, Rat(1), trunc);
}

unsigned TruncPoly::total_degree() const {
  unsigned d = 0;
  for (const auto& [e, c] : coeffs_) d = std::max(d, expo_degree(e));
  return d;
}

void TruncPoly::add_term(const Expo& e, const Rat& c) {
  if (e.size() != arity_) throw std::invalid_argument("add_term arity mismatch");
  if (c == 0) return;
  if (trunc_ && expo_degree(e) > *trunc_) return;
  auto it = coeffs_.find(e);
  if (it == coeffs_.end()) {
    coeffs_.emplace(e, c);
  } else {
    it->second += c;
    if (it->second == 0) coeffs_.erase(it);
  }
}

namespace {
std::optional<unsigned> merge_trunc(std::optional<unsigned> a,
                                    std::optional<unsigned> b) {
  if (!a) return b;
  if (!b) return a;
  return std::min(*a, *b);
}
}  // namespace

TruncPoly TruncPoly::operator+(const TruncPoly& o) const {
  TruncPoly r(arity_, merge_trunc(trunc_, o.trunc_));
  for (const auto& [e, c] : coeffs_) r.add_term(e, c);
  for (const auto& [e, c] : o.coeffs_) r.add_term(e, c);
  return r;
}

TruncPoly TruncPoly::operator-(const TruncPoly& o) const {
  return *this + (-o);
}

TruncPoly TruncPoly::operator-() const {
  TruncPoly r(arity_, trunc_);
  for (const auto& [e, c] : coeffs_) r.coeffs_.emplace(e, -c);
  return r;
}

TruncPoly TruncPoly::scaled(const Rat& c) const {
  TruncPoly r(arity_, trunc_);
  if (c == 0) return r;
  for (const auto& [e, k] : coeffs_) r.coeffs_.emplace(e, k * c);
  return r;
}

TruncPoly TruncPoly::operator*(const TruncPoly& o) const {
  TruncPoly r(arity_, merge_trunc(trunc_, o.trunc_));
  for (const auto& [e1, c1] : coeffs_) {
    for (const auto& [e2, c2] : o.coeffs_) {
      Expo e(arity_);
      for (std::size_t i = 0; i < arity_; ++i) e[i] = e1[i] + e2[i];
      r.add_term(e, c1 * c2);
    }
  }
  return r;
}

TruncPoly TruncPoly::pow(unsigned e) const {
  TruncPoly r = constant(arity_, Rat(1), trunc_);
  for (unsigned i = 0; i < e; ++i) r = r * *this;
  return r;
}

Rat TruncPoly::evaluate(const std::vector<Rat>& pt) const {
  if (pt.size() != arity_) throw std::invalid_argument("evaluate arity");
  Rat acc(0);
  for (const auto& [e, c] : coeffs_) {
    Rat t = c;
    for (std::size_t i = 0; i < arity_; ++i)
      for (unsigned j = 0; j < e[i]; ++j) t *= pt[i];
    acc += t;
  }
  return acc;
}

double TruncPoly::evaluate_double(const std::vector<double>& pt) const {
  if (pt.size() != arity_) throw std::invalid_argument("evaluate arity");
  double acc = 0;
  for (const auto& [e, c] : coeffs_) {
    double t = rat_to_double(c);
    for (std::size_t i = 0; i < arity_; ++i)
      if (e[i]) t *= std::pow(pt[i], double(e[i]));
    acc += t;
  }
  return acc;
}

TruncPoly TruncPoly::substitute(
    const std::vector<std::optional<Rat>>& vals) const {
  if (vals.size() != arity_) throw std::invalid_argument("substitute arity");
  TruncPoly r(arity_, trunc_);
  for (const auto& [e, c] : coeffs_) {
    Rat coef = c;
    Expo rest(arity_, 0);
    for (std::size_t i = 0; i < arity_; ++i) {
      if (vals[i]) {
        for (unsigned j = 0; j < e[i]; ++j) coef *= *vals[i];
      } else {
        rest[i] = e[i];
      }
    }
    r.add_term(rest, coef);
  }
  return r;
}

TruncPoly TruncPoly::embed(std::size_t new_arity,
                           const std::vector<std::size_t>& where) const {
  if (where.size() != arity_) throw std::invalid_argument("embed arity");
  TruncPoly r(new_arity, trunc_);
  for (const auto& [e, c] : coeffs_) {
    Expo ne(new_arity, 0);
    for (std::size_t i = 0; i < arity_; ++i) ne.at(where[i]) += e[i];
    r.add_term(ne, c);
  }
  return r;
}

}  // namespace lcdiag
