#include "meda/calculus.hpp"

#include <map>
#include <vector>

#include "meda/error.hpp"

namespace meda {

bool depends_on(const Expr& e, std::string_view var, const SymbolSet& dependents) {
  if (e.is_symbol()) return e.name() == var || dependents.contains(e.name());
  for (const auto& op : e.operands()) {
    if (depends_on(op, var, dependents)) return true;
  }
  return false;
}

Expr differentiate(const Expr& e, std::string_view var, const SymbolSet& dependents) {
  switch (e.kind()) {
    case Kind::constant: return Expr();
    case Kind::symbol:
      if (e.name() == var) return Expr(1);
      if (dependents.contains(e.name())) return Expr::derivative(e, {{std::string(var), 1}});
      return Expr();
    case Kind::derivative:
      if (!depends_on(e.inner(), var, dependents)) return Expr();
      return Expr::derivative(e, {{std::string(var), 1}});
    case Kind::sum: {
      std::vector<Expr> terms;
      for (const auto& t : e.operands()) terms.push_back(differentiate(t, var, dependents));
      return Expr::sum(std::move(terms));
    }
    case Kind::product: {
      auto ops = e.operands();
      std::vector<Expr> terms;
      for (std::size_t k = 0; k < ops.size(); ++k) {
        Expr d = differentiate(ops[k], var, dependents);
        if (d.is_zero()) continue;
        std::vector<Expr> fs(ops.begin(), ops.end());
        fs[k] = d;
        terms.push_back(Expr::product(std::move(fs)));
      }
      return Expr::sum(std::move(terms));
    }
    case Kind::power: {
      const Expr& b = e.base();
      const Expr& x = e.exponent();
      if (depends_on(x, var, dependents)) {
        throw UnsupportedOperation("cannot differentiate a power whose exponent depends on '" + std::string(var) + "'");
      }
      Expr db = differentiate(b, var, dependents);
      if (db.is_zero()) return Expr();
      return Expr::product({x, Expr::power(b, x - Expr(1)), db});
    }
    case Kind::function: {
      const Expr& w = e.argument();
      Expr dw = differentiate(w, var, dependents);
      if (dw.is_zero()) return Expr();
      switch (e.func()) {
        case Func::tan: return (Expr(1) + pow(e, Expr(2))) * dw;
        case Func::cot: return -(Expr(1) + pow(e, Expr(2))) * dw;
        case Func::tanh: return (Expr(1) - pow(e, Expr(2))) * dw;
        case Func::coth: return (Expr(1) - pow(e, Expr(2))) * dw;
        case Func::sqrt: return dw / (Expr(2) * e);
      }
      throw UnsupportedOperation("unsupported function node");
    }
  }
  throw UnsupportedOperation("unsupported expression node");
}

Expr expand_derivatives(const Expr& e, const SymbolSet& dependents) {
  switch (e.kind()) {
    case Kind::constant:
    case Kind::symbol: return e;
    case Kind::derivative: {
      Expr inner = expand_derivatives(e.inner(), dependents);
      if (inner.is_symbol() && dependents.contains(inner.name())) return Expr::derivative(inner, e.orders());
      Expr out = inner;
      for (const auto& o : e.orders()) {
        for (int k = 0; k < o.order; ++k) out = differentiate(out, o.var, dependents);
      }
      return out;
    }
    case Kind::sum: {
      std::vector<Expr> ops;
      for (const auto& t : e.operands()) ops.push_back(expand_derivatives(t, dependents));
      return Expr::sum(std::move(ops));
    }
    case Kind::product: {
      std::vector<Expr> ops;
      for (const auto& t : e.operands()) ops.push_back(expand_derivatives(t, dependents));
      return Expr::product(std::move(ops));
    }
    case Kind::power:
      return Expr::power(expand_derivatives(e.base(), dependents), expand_derivatives(e.exponent(), dependents));
    case Kind::function: return Expr::function(e.func(), expand_derivatives(e.argument(), dependents));
  }
  return e;
}

namespace {

template <typename Leaf>
Expr rebuild(const Expr& e, const Leaf& leaf) {
  if (auto r = leaf(e)) return *r;
  switch (e.kind()) {
    case Kind::constant:
    case Kind::symbol: return e;
    case Kind::derivative: return Expr::derivative(rebuild(e.inner(), leaf), e.orders());
    case Kind::sum: {
      std::vector<Expr> ops;
      for (const auto& t : e.operands()) ops.push_back(rebuild(t, leaf));
      return Expr::sum(std::move(ops));
    }
    case Kind::product: {
      std::vector<Expr> ops;
      for (const auto& t : e.operands()) ops.push_back(rebuild(t, leaf));
      return Expr::product(std::move(ops));
    }
    case Kind::power: return Expr::power(rebuild(e.base(), leaf), rebuild(e.exponent(), leaf));
    case Kind::function: return Expr::function(e.func(), rebuild(e.argument(), leaf));
  }
  return e;
}

std::vector<Expr> terms_of(const Expr& e) {
  if (e.is_sum()) return {e.operands().begin(), e.operands().end()};
  return {e};
}

std::vector<Expr> multiply_terms(const std::vector<Expr>& a, const std::vector<Expr>& b) {
  std::vector<Expr> out;
  out.reserve(a.size() * b.size());
  for (const auto& x : a) {
    for (const auto& y : b) out.push_back(x * y);
  }
  return terms_of(Expr::sum(std::move(out)));
}

}  // namespace

Expr substitute(const Expr& e, const Bindings& bindings) {
  if (bindings.empty()) return e;
  return rebuild(e, [&](const Expr& x) -> std::optional<Expr> {
    if (!x.is_symbol()) return std::nullopt;
    auto it = bindings.find(x.name());
    if (it == bindings.end()) return std::nullopt;
    return it->second;
  });
}

Expr replace(const Expr& e, const std::map<Expr, Expr>& rules) {
  if (rules.empty()) return e;
  return rebuild(e, [&](const Expr& x) -> std::optional<Expr> {
    auto it = rules.find(x);
    if (it == rules.end()) return std::nullopt;
    return it->second;
  });
}

Expr expand(const Expr& e) {
  switch (e.kind()) {
    case Kind::constant:
    case Kind::symbol: return e;
    case Kind::derivative: return Expr::derivative(expand(e.inner()), e.orders());
    case Kind::function: return Expr::function(e.func(), expand(e.argument()));
    case Kind::sum: {
      std::vector<Expr> ops;
      for (const auto& t : e.operands()) ops.push_back(expand(t));
      return Expr::sum(std::move(ops));
    }
    case Kind::product: {
      std::vector<Expr> acc{Expr(1)};
      for (const auto& f : e.operands()) acc = multiply_terms(acc, terms_of(expand(f)));
      return Expr::sum(std::move(acc));
    }
    case Kind::power: {
      Expr base = expand(e.base());
      Expr x = expand(e.exponent());
      auto k = x.integer_value();
      if (k && *k > 1 && base.is_sum()) {
        std::vector<Expr> acc{Expr(1)};
        const auto bt = terms_of(base);
        for (long j = 0; j < *k; ++j) acc = multiply_terms(acc, bt);
        return Expr::sum(std::move(acc));
      }
      Expr p = Expr::power(base, x);
      if (p.is_product() || p.is_sum()) return expand(p);
      return p;
    }
  }
  return e;
}

}  // namespace meda
