#include "meda/poly.hpp"

#include <algorithm>
#include <limits>

#include "meda/calculus.hpp"
#include "meda/error.hpp"

namespace meda {

// ---------------------------------------------------------------------------
// Monomial

Monomial Monomial::atom(const Expr& a, int exponent) {
  Monomial m;
  if (exponent != 0) m.factors_.emplace_back(a, exponent);
  return m;
}

int Monomial::degree() const {
  int d = 0;
  for (const auto& f : factors_) d += f.second;
  return d;
}

int Monomial::exponent_of(const Expr& a) const {
  for (const auto& [atom, e] : factors_) {
    if (atom == a) return e;
  }
  return 0;
}

Monomial Monomial::without(const Expr& a) const {
  Monomial m;
  for (const auto& f : factors_) {
    if (f.first != a) m.factors_.push_back(f);
  }
  return m;
}

Expr Monomial::to_expr() const {
  std::vector<Expr> fs;
  fs.reserve(factors_.size());
  for (const auto& [a, e] : factors_) fs.push_back(Expr::power(a, Expr(static_cast<long>(e))));
  return Expr::product(std::move(fs));
}

Monomial operator*(const Monomial& a, const Monomial& b) {
  Monomial m;
  auto i = a.factors_.begin();
  auto j = b.factors_.begin();
  while (i != a.factors_.end() || j != b.factors_.end()) {
    if (j == b.factors_.end() || (i != a.factors_.end() && i->first < j->first)) {
      m.factors_.push_back(*i++);
    } else if (i == a.factors_.end() || j->first < i->first) {
      m.factors_.push_back(*j++);
    } else {
      const int e = i->second + j->second;
      if (e != 0) m.factors_.emplace_back(i->first, e);
      ++i;
      ++j;
    }
  }
  return m;
}

Monomial Monomial::inverse() const { return pow(-1); }

Monomial Monomial::pow(int k) const {
  Monomial m;
  if (k == 0) return m;
  for (const auto& [a, e] : factors_) m.factors_.emplace_back(a, e * k);
  return m;
}

Monomial Monomial::min(const Monomial& a, const Monomial& b) {
  Monomial m;
  auto i = a.factors_.begin();
  auto j = b.factors_.begin();
  while (i != a.factors_.end() || j != b.factors_.end()) {
    if (j == b.factors_.end() || (i != a.factors_.end() && i->first < j->first)) {
      if (i->second < 0) m.factors_.push_back(*i);
      ++i;
    } else if (i == a.factors_.end() || j->first < i->first) {
      if (j->second < 0) m.factors_.push_back(*j);
      ++j;
    } else {
      const int e = std::min(i->second, j->second);
      if (e != 0) m.factors_.emplace_back(i->first, e);
      ++i;
      ++j;
    }
  }
  return m;
}

bool DegLex::operator()(const Monomial& a, const Monomial& b) const {
  const int da = a.degree();
  const int db = b.degree();
  if (da != db) return da > db;
  const auto& fa = a.factors();
  const auto& fb = b.factors();
  const std::size_t n = std::min(fa.size(), fb.size());
  for (std::size_t k = 0; k < n; ++k) {
    if (fa[k].first != fb[k].first) return fa[k].first < fb[k].first;
    if (fa[k].second != fb[k].second) return fa[k].second > fb[k].second;
  }
  return fa.size() > fb.size();
}

// ---------------------------------------------------------------------------
// Poly

namespace {

Expr normalize_atom(const Expr& e) {
  switch (e.kind()) {
    case Kind::function: return Expr::function(e.func(), expand(e.argument()));
    case Kind::derivative: return Expr::derivative(expand(e.inner()), e.orders());
    case Kind::power: return Expr::power(expand(e.base()), expand(e.exponent()));
    default: return e;
  }
}

bool is_sqrt(const Expr& a) { return a.is_function() && a.func() == Func::sqrt; }

Poly from_expr_raw(const Expr& e) {
  switch (e.kind()) {
    case Kind::constant: return Poly(e.value());
    case Kind::symbol: return Poly::atom(e);
    case Kind::sum: {
      Poly p;
      for (const auto& t : e.operands()) p += from_expr_raw(t);
      return p;
    }
    case Kind::product: {
      Poly p(1);
      for (const auto& f : e.operands()) {
        p *= from_expr_raw(f);
        if (p.is_zero()) break;
      }
      return p;
    }
    case Kind::power: {
      auto k = e.exponent().integer_value();
      if (!k || *k > std::numeric_limits<int>::max() || *k < -std::numeric_limits<int>::max()) {
        return Poly::atom(normalize_atom(e));
      }
      Poly b = from_expr_raw(e.base());
      if (*k >= 0) return b.pow(static_cast<int>(*k));
      if (b.is_zero()) throw DivisionByZero();
      if (b.size() == 1) return b.pow(static_cast<int>(*k));
      return Poly::atom(Expr::power(b.to_expr(), Expr(-1))).pow(static_cast<int>(-*k));
    }
    case Kind::function:
    case Kind::derivative: return Poly::atom(normalize_atom(e));
  }
  return {};
}

}  // namespace

Poly::Poly(GaussianRational c) {
  if (!c.is_zero()) terms_.emplace(Monomial(), std::move(c));
}

Poly Poly::atom(const Expr& a) {
  if (a.is_constant()) return Poly(a.value());
  return term(GaussianRational(1), Monomial::atom(a));
}

Poly Poly::term(const GaussianRational& c, const Monomial& m) {
  Poly p;
  if (!c.is_zero()) p.terms_.emplace(m, c);
  return p;
}

Poly Poly::from_expr(const Expr& e) {
  Poly p = from_expr_raw(e);
  // sqrt(X)^k with |k| >= 2 folds into X^(k/2) * sqrt(X)^(k%2)
  for (int guard = 0; guard < 16; ++guard) {
    bool found = false;
    Poly out;
    for (const auto& [m, c] : p.terms_) {
      Poly t = term(c, Monomial());
      Monomial rest;
      for (const auto& [a, k] : m.factors()) {
        if (is_sqrt(a) && (k >= 2 || k <= -2)) {
          found = true;
          const int q = k / 2;
          const int r = k - 2 * q;
          t *= from_expr_raw(Expr::power(a.argument(), Expr(static_cast<long>(q))));
          rest = rest * Monomial::atom(a, r);
        } else {
          rest = rest * Monomial::atom(a, k);
        }
      }
      out += t.shifted(rest);
    }
    if (!found) return p;
    p = std::move(out);
  }
  return p;
}

bool Poly::is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one()); }

std::optional<GaussianRational> Poly::constant_value() const {
  if (terms_.empty()) return GaussianRational(0);
  if (!is_constant()) return std::nullopt;
  return terms_.begin()->second;
}

GaussianRational Poly::constant_term() const {
  auto it = terms_.find(Monomial());
  return it == terms_.end() ? GaussianRational(0) : it->second;
}

std::pair<Monomial, GaussianRational> Poly::leading() const {
  if (terms_.empty()) return {Monomial(), GaussianRational(0)};
  return *terms_.begin();
}

Monomial Poly::content() const {
  if (terms_.empty()) return {};
  Monomial m = terms_.begin()->first;
  for (const auto& t : terms_) m = Monomial::min(m, t.first);
  return m;
}

std::vector<Expr> Poly::atoms() const {
  std::vector<Expr> out;
  for (const auto& t : terms_) {
    for (const auto& f : t.first.factors()) out.push_back(f.first);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool Poly::contains_atom(const Expr& a) const {
  for (const auto& t : terms_) {
    if (t.first.exponent_of(a) != 0) return true;
  }
  return false;
}

int Poly::max_degree_in(const Expr& a) const {
  int d = std::numeric_limits<int>::min();
  for (const auto& t : terms_) d = std::max(d, t.first.exponent_of(a));
  return terms_.empty() ? 0 : d;
}

int Poly::min_degree_in(const Expr& a) const {
  int d = std::numeric_limits<int>::max();
  for (const auto& t : terms_) d = std::min(d, t.first.exponent_of(a));
  return terms_.empty() ? 0 : d;
}

Poly Poly::derivative(const Expr& a) const {
  Poly out;
  for (const auto& [m, c] : terms_) {
    const int e = m.exponent_of(a);
    if (e == 0) continue;
    out.add_term(m * Monomial::atom(a, -1), c * GaussianRational(e));
  }
  return out;
}

Poly Poly::coefficient(const Expr& a, int k) const {
  Poly out;
  for (const auto& [m, c] : terms_) {
    if (m.exponent_of(a) == k) out.add_term(m.without(a), c);
  }
  return out;
}

Poly Poly::compose(const std::map<Expr, Poly>& images) const {
  Poly out;
  std::map<std::pair<Expr, int>, Poly> cache;
  for (const auto& [m, c] : terms_) {
    Poly t = term(c, Monomial());
    Monomial rest;
    for (const auto& [a, e] : m.factors()) {
      auto it = images.find(a);
      if (it == images.end()) {
        rest = rest * Monomial::atom(a, e);
        continue;
      }
      auto key = std::make_pair(a, e);
      auto ct = cache.find(key);
      if (ct == cache.end()) {
        if (e < 0 && it->second.size() != 1) {
          throw NonPolynomial("negative power of a non-monomial image of " + a.str());
        }
        ct = cache.emplace(key, it->second.pow(e)).first;
      }
      t *= ct->second;
    }
    out += t.shifted(rest);
  }
  return out;
}

Expr Poly::to_expr() const {
  std::vector<Expr> ts;
  ts.reserve(terms_.size());
  for (const auto& [m, c] : terms_) ts.push_back(Expr(c) * m.to_expr());
  return Expr::sum(std::move(ts));
}

void Poly::add_term(const Monomial& m, const GaussianRational& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

Poly& Poly::operator+=(const Poly& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) out.add_term(ma * mb, ca * cb);
  }
  return out;
}

Poly& Poly::operator*=(const Poly& o) { return *this = *this * o; }

Poly Poly::operator-() const { return scaled(GaussianRational(-1)); }

Poly Poly::pow(int k) const {
  if (k < 0) {
    if (terms_.size() != 1) throw NonPolynomial("negative power of a non-monomial polynomial");
    const auto& [m, c] = *terms_.begin();
    return term(c.pow(k), m.pow(k));
  }
  Poly result(1);
  Poly base = *this;
  while (k != 0) {
    if ((k & 1) != 0) result *= base;
    k >>= 1;
    if (k != 0) base *= base;
  }
  return result;
}

Poly Poly::scaled(const GaussianRational& c) const {
  if (c.is_zero()) return {};
  Poly out = *this;
  for (auto& t : out.terms_) t.second *= c;
  return out;
}

Poly Poly::shifted(const Monomial& m) const {
  if (m.is_one()) return *this;
  Poly out;
  for (const auto& [k, c] : terms_) out.add_term(k * m, c);
  return out;
}

bool operator<(const Poly& a, const Poly& b) {
  auto i = a.terms_.begin();
  auto j = b.terms_.begin();
  const DegLex less;
  for (; i != a.terms_.end() && j != b.terms_.end(); ++i, ++j) {
    if (less(i->first, j->first)) return true;
    if (less(j->first, i->first)) return false;
    if (i->second != j->second) return (i->second <=> j->second) < 0;
  }
  return i == a.terms_.end() && j != b.terms_.end();
}

// ---------------------------------------------------------------------------
// PolyForm

bool PolyForm::ExponentOrder::operator()(const Exponents& a, const Exponents& b) const {
  int da = 0;
  int db = 0;
  for (int e : a) da += e;
  for (int e : b) db += e;
  if (da != db) return da > db;
  return a > b;
}

PolyForm::PolyForm(std::vector<std::string> main, Terms terms) : main_(std::move(main)), terms_(std::move(terms)) {
  std::erase_if(terms_, [](const auto& t) { return t.second.is_zero(); });
}

PolyForm PolyForm::from_poly(const Poly& p, const std::vector<std::string>& main) {
  std::vector<Expr> main_atoms;
  SymbolSet names;
  for (const auto& s : main) {
    main_atoms.push_back(Expr::symbol(s));
    names.insert(s);
  }
  Terms terms;
  for (const auto& [m, c] : p.terms()) {
    Exponents key(main.size(), 0);
    Monomial rest;
    for (const auto& [a, e] : m.factors()) {
      auto it = std::find(main_atoms.begin(), main_atoms.end(), a);
      if (it != main_atoms.end()) {
        key[static_cast<std::size_t>(it - main_atoms.begin())] = e;
        continue;
      }
      if (contains_any(a, names)) {
        throw NonPolynomial("non-polynomial dependence on a main symbol in " + a.str());
      }
      rest = rest * Monomial::atom(a, e);
    }
    terms[key] += Poly::term(c, rest);
  }
  return PolyForm(main, std::move(terms));
}

PolyForm::Exponents PolyForm::min_exponents() const {
  Exponents lo(main_.size(), 0);
  for (const auto& t : terms_) {
    for (std::size_t k = 0; k < lo.size(); ++k) lo[k] = std::min(lo[k], t.first[k]);
  }
  return lo;
}

PolyForm::Exponents PolyForm::max_exponents() const {
  Exponents hi(main_.size(), std::numeric_limits<int>::min());
  for (const auto& t : terms_) {
    for (std::size_t k = 0; k < hi.size(); ++k) hi[k] = std::max(hi[k], t.first[k]);
  }
  if (terms_.empty()) std::fill(hi.begin(), hi.end(), 0);
  return hi;
}

Poly PolyForm::coefficient(const Exponents& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? Poly() : it->second;
}

Poly PolyForm::to_poly() const {
  Poly out;
  for (const auto& [key, c] : terms_) {
    Monomial m;
    for (std::size_t k = 0; k < key.size(); ++k) m = m * Monomial::atom(Expr::symbol(main_[k]), key[k]);
    out += c.shifted(m);
  }
  return out;
}

PolyForm expand_normalize(const Expr& e, const std::vector<std::string>& main) {
  return PolyForm::from_poly(Poly::from_expr(e), main);
}

PolyForm expand_normalize(const Expr& e, const SymbolSet& main) {
  return expand_normalize(e, std::vector<std::string>(main.begin(), main.end()));
}

}  // namespace meda
