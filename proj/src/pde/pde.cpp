#include "meda/pde.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <regex>
#include <sstream>

#include "meda/calculus.hpp"
#include "meda/error.hpp"
#include "meda/parser.hpp"
#include "meda/poly.hpp"

namespace meda {

SymbolSet PDEProblem::declared() const {
  SymbolSet s{space, time};
  s.insert(unknowns.begin(), unknowns.end());
  s.insert(params.begin(), params.end());
  return s;
}

SymbolSet TravelingWaveODE::declared() const {
  SymbolSet s{wave.variable};
  s.insert(profiles.begin(), profiles.end());
  s.insert(params.begin(), params.end());
  return s;
}

// ---------------------------------------------------------------------------
// Problem DSL

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a])) != 0) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1])) != 0) --b;
  return std::string(s.substr(a, b - a));
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

bool is_identifier(const std::string& s) {
  if (s.empty() || std::isalpha(static_cast<unsigned char>(s[0])) == 0) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; });
}

bool has_marker(const Expr& e) { return contains_derivative(e); }

}  // namespace

PDEProblem parse_problem_text(const std::string& text, const std::string& origin) {
  PDEProblem p;
  struct PendingEq {
    std::string text;
    int line;
  };
  std::vector<PendingEq> pending;
  bool have_vars = false;
  bool have_unknowns = false;
  bool have_wave = false;
  std::vector<std::pair<std::string, int>> constraints;

  std::istringstream in(text);
  std::string raw;
  int line = 0;
  auto fail = [&](const std::string& msg) -> void { throw FileFormatError(origin, line, msg); };
  auto names = [&](const std::vector<std::string>& w) {
    for (std::size_t k = 1; k < w.size(); ++k) {
      if (!is_identifier(w[k])) fail("invalid identifier '" + w[k] + "'");
      if (w[k] == "i" || w[k] == "D" || func_from_name(w[k])) fail("reserved name '" + w[k] + "'");
    }
    return std::vector<std::string>(w.begin() + 1, w.end());
  };

  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    if (auto hash = s.find('#'); hash != std::string::npos) s.erase(hash);
    s = trim(s);
    if (s.empty()) continue;

    if (s.rfind("eq:", 0) == 0) {
      pending.push_back({s.substr(3), line});
      continue;
    }
    if (s.rfind("wave:", 0) == 0) {
      static const std::regex wave_re(
          R"(^\s*([A-Za-z][A-Za-z0-9_]*)\s*=\s*i\s*\*\s*\(\s*([A-Za-z][A-Za-z0-9_]*)\s*([+-])\s*([A-Za-z][A-Za-z0-9_]*)\s*\*\s*([A-Za-z][A-Za-z0-9_]*)\s*\)\s*$)");
      std::smatch m;
      const std::string body = s.substr(5);
      if (!std::regex_match(body, m, wave_re)) fail("wave spec must read 'wave: z = i*(x +|- speed*t)'");
      if (!have_vars) fail("wave spec before 'vars'");
      if (m[2] != p.space || m[5] != p.time) fail("wave spec must use the declared variables " + p.space + " and " + p.time);
      p.wave.variable = m[1];
      p.wave.sign = m[3] == "+" ? 1 : -1;
      p.wave.speed = m[4];
      have_wave = true;
      continue;
    }

    const auto w = words(s);
    const std::string& key = w.front();
    if (key == "problem") {
      if (w.size() != 2) fail("expected 'problem <name>'");
      p.name = w[1];
    } else if (key == "vars") {
      auto v = names(w);
      if (v.size() != 2) fail("expected 'vars <space> <time>'");
      p.space = v[0];
      p.time = v[1];
      have_vars = true;
    } else if (key == "unknowns") {
      auto v = names(w);
      if (v.empty()) fail("expected at least one unknown");
      p.unknowns = v;
      have_unknowns = true;
    } else if (key == "params") {
      auto v = names(w);
      p.params.insert(p.params.end(), v.begin(), v.end());
    } else if (key == "constraint") {
      if (w.size() != 4 || w[2] != ">" || w[3] != "0") fail("expected 'constraint <sym> > 0'");
      constraints.emplace_back(w[1], line);
    } else {
      fail("unknown keyword '" + key + "'");
    }
  }

  ++line;
  if (!have_vars) fail("missing 'vars' line");
  if (!have_unknowns) fail("missing 'unknowns' line");
  if (!have_wave) fail("missing wave spec");
  if (pending.empty()) fail("no equations");

  if (std::find(p.params.begin(), p.params.end(), p.wave.speed) == p.params.end()) p.params.push_back(p.wave.speed);

  SymbolSet seen;
  for (const auto& s : p.declared()) seen.insert(s);
  const std::size_t count = 2 + p.unknowns.size() + p.params.size();
  if (seen.size() != count) {
    line = 0;
    fail("a name is declared more than once");
  }
  if (seen.contains(p.wave.variable)) {
    line = 0;
    fail("wave variable '" + p.wave.variable + "' clashes with a declared name");
  }
  for (const auto& [name, at] : constraints) {
    if (std::find(p.params.begin(), p.params.end(), name) == p.params.end()) {
      throw FileFormatError(origin, at, "constraint on undeclared parameter '" + name + "'");
    }
    p.positive.insert(name);
  }

  const SymbolSet declared = p.declared();
  for (const auto& eq : pending) {
    line = eq.line;
    const auto eqpos = eq.text.find('=');
    if (eqpos == std::string::npos) fail("equation must have the form '<expr> = 0'");
    Expr lhs;
    Expr rhs;
    try {
      lhs = parse_expr(eq.text.substr(0, eqpos), declared);
      rhs = parse_expr(eq.text.substr(eqpos + 1), declared);
    } catch (const UndeclaredSymbol& err) {
      fail(err.what());
    } catch (const ParseError& err) {
      fail(err.what());
    }
    Expr e = lhs - rhs;
    if (!has_marker(e)) fail("equation contains no derivative");
    p.equations.push_back(e);
  }
  return p;
}

PDEProblem parse_problem(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw FileFormatError(file.string(), 0, "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem_text(buf.str(), file.string());
}

// ---------------------------------------------------------------------------
// Reduction

namespace {

std::string profile_name(const std::string& unknown, const SymbolSet& taken) {
  std::string n = unknown;
  std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  while (taken.contains(n)) n += "Z";
  return n;
}

std::vector<Expr> terms_of(const Expr& e) {
  if (e.is_zero()) return {};
  if (e.is_sum()) return {e.operands().begin(), e.operands().end()};
  return {e};
}

/// Divides out a common factor i (all coefficients imaginary) and a common
/// sign (all coefficients negative reals). Returns the removed factor.
Expr clear_common_factor(Expr& e) {
  auto terms = terms_of(e);
  if (terms.empty()) return Expr(1);
  GaussianRational factor(1);
  const bool imaginary = std::all_of(terms.begin(), terms.end(), [](const Expr& t) { return split_coefficient(t).first.is_imaginary(); });
  if (imaginary) factor *= GaussianRational::i();
  const bool negative = std::all_of(terms.begin(), terms.end(), [&](const Expr& t) {
    return (split_coefficient(t).first / factor).is_negative_real();
  });
  if (negative) factor = -factor;
  if (!factor.is_one()) e = expand(e * Expr(factor.inverse()));
  return Expr(factor);
}

}  // namespace

TravelingWaveODE reduce_to_ode(const PDEProblem& problem) {
  TravelingWaveODE ode;
  ode.wave = problem.wave;
  ode.params = problem.params;
  SymbolSet taken = problem.declared();
  taken.insert(problem.wave.variable);
  for (const auto& u : problem.unknowns) {
    std::string p = profile_name(u, taken);
    taken.insert(p);
    ode.profile_of[u] = p;
    ode.profiles.push_back(p);
  }

  const Expr i = Expr::imaginary_unit();
  const Expr dx = i;
  const Expr dt = Expr(static_cast<long>(problem.wave.sign)) * i * sym(problem.wave.speed);
  const std::string& z = problem.wave.variable;

  std::function<Expr(const Expr&)> transform = [&](const Expr& e) -> Expr {
    switch (e.kind()) {
      case Kind::constant: return e;
      case Kind::symbol: {
        if (e.name() == problem.space || e.name() == problem.time) {
          throw DerivationError("equation depends explicitly on '" + e.name() + "' and cannot be reduced");
        }
        auto it = ode.profile_of.find(e.name());
        return it == ode.profile_of.end() ? e : sym(it->second);
      }
      case Kind::derivative: {
        Expr inner = transform(e.inner());
        Expr factor(1);
        int order = 0;
        for (const auto& o : e.orders()) {
          if (o.var == problem.space) {
            factor = factor * pow(dx, Expr(o.order));
          } else if (o.var == problem.time) {
            factor = factor * pow(dt, Expr(o.order));
          } else {
            throw DerivationError("derivative in undeclared variable '" + o.var + "'");
          }
          order += o.order;
        }
        if (!contains_any(inner, ode.profile_set())) return Expr();
        return factor * Expr::derivative(inner, {{z, order}});
      }
      case Kind::sum: {
        std::vector<Expr> ops;
        for (const auto& t : e.operands()) ops.push_back(transform(t));
        return Expr::sum(std::move(ops));
      }
      case Kind::product: {
        std::vector<Expr> ops;
        for (const auto& t : e.operands()) ops.push_back(transform(t));
        return Expr::product(std::move(ops));
      }
      case Kind::power: return pow(transform(e.base()), transform(e.exponent()));
      case Kind::function: return apply(e.func(), transform(e.argument()));
    }
    return e;
  };

  for (const auto& eq : problem.equations) {
    Expr reduced = expand(transform(eq));
    ode.cleared_factors.push_back(clear_common_factor(reduced));
    ode.equations.push_back(reduced);
    ode.integration_constants.emplace_back(0);
  }
  return ode;
}

// ---------------------------------------------------------------------------
// Integration

namespace {

struct Antiderivative {
  std::optional<Expr> value;
  std::string reason;
};

Antiderivative antiderivative(const Expr& term, const SymbolSet& profiles, const std::string& z) {
  std::vector<Expr> factors = term.is_product() ? std::vector<Expr>(term.operands().begin(), term.operands().end())
                                                : std::vector<Expr>{term};
  std::vector<Expr> coef;
  std::vector<Expr> dependent;
  for (const auto& f : factors) {
    if (contains_any(f, profiles)) {
      dependent.push_back(f);
    } else {
      coef.push_back(f);
    }
  }
  const Expr c = Expr::product(coef);
  auto is_first_derivative_of = [&](const Expr& f) {
    return f.is_derivative() && f.orders().size() == 1 && f.orders()[0].var == z && f.orders()[0].order == 1 &&
           f.inner().is_symbol() && profiles.contains(f.inner().name());
  };

  if (dependent.size() == 1 && dependent[0].is_derivative()) {
    const Expr& d = dependent[0];
    if (d.orders().size() == 1 && d.orders()[0].var == z) {
      const int k = d.orders()[0].order;
      return {c * Expr::derivative(d.inner(), {{z, k - 1}}), {}};
    }
  }
  if (dependent.size() == 2) {
    for (int pick = 0; pick < 2; ++pick) {
      const Expr& d = dependent[static_cast<std::size_t>(pick)];
      const Expr& other = dependent[static_cast<std::size_t>(1 - pick)];
      if (!is_first_derivative_of(d)) continue;
      const Expr& w = d.inner();
      Expr k;
      if (other == w) {
        k = Expr(1);
      } else if (other.is_power() && other.base() == w && !contains_any(other.exponent(), profiles)) {
        k = other.exponent();
        if (auto kv = k.integer_value(); kv && *kv < 0) continue;
      } else {
        continue;
      }
      return {c * pow(w, k + Expr(1)) / (k + Expr(1)), {}};
    }
  }
  return {std::nullopt, "no antiderivative pattern matches the term " + term.str()};
}

}  // namespace

bool integrable(const TravelingWaveODE& ode) {
  const SymbolSet profiles = ode.profile_set();
  for (const auto& eq : ode.equations) {
    for (const auto& t : terms_of(expand(eq))) {
      if (!antiderivative(t, profiles, ode.variable()).value) return false;
    }
  }
  return true;
}

TravelingWaveODE integrate_once(const TravelingWaveODE& ode, const std::vector<Expr>& constants) {
  TravelingWaveODE out = ode;
  const SymbolSet profiles = ode.profile_set();
  for (std::size_t k = 0; k < ode.equations.size(); ++k) {
    std::vector<Expr> parts;
    for (const auto& t : terms_of(expand(ode.equations[k]))) {
      Antiderivative a = antiderivative(t, profiles, ode.variable());
      if (!a.value) throw DerivationError("cannot integrate equation " + std::to_string(k + 1) + ": " + a.reason);
      parts.push_back(*a.value);
    }
    const Expr constant = k < constants.size() ? constants[k] : Expr();
    parts.push_back(-constant);
    out.equations[k] = expand(Expr::sum(std::move(parts)));
    out.integration_constants[k] = constant;
  }
  ++out.integrations;
  return out;
}

// ---------------------------------------------------------------------------
// Elimination

TravelingWaveODE eliminate(const TravelingWaveODE& ode, const std::string& profile, std::optional<std::size_t> into) {
  if (std::find(ode.profiles.begin(), ode.profiles.end(), profile) == ode.profiles.end()) {
    throw DerivationError("profile '" + profile + "' is not present in the equations");
  }
  if (ode.equations.size() < 2) throw DerivationError("elimination needs at least two equations");
  const Expr target = sym(profile);

  std::optional<std::size_t> source;
  Expr relation;
  for (std::size_t k = 0; k < ode.equations.size(); ++k) {
    if (into && *into == k) continue;
    Poly p = Poly::from_expr(ode.equations[k]);
    if (p.max_degree_in(target) != 1 || p.min_degree_in(target) != 0) continue;
    bool clean = true;
    for (const auto& a : p.atoms()) {
      if (a != target && contains_symbol(a, profile)) clean = false;
    }
    if (!clean) continue;
    const Poly slope = p.coefficient(target, 1);
    const Poly rest = p.coefficient(target, 0);
    if (slope.is_zero()) continue;
    relation = expand(-rest.to_expr() / slope.to_expr());
    source = k;
    break;
  }
  if (!source) throw DerivationError("no equation is linear in '" + profile + "' without derivatives of it");

  std::size_t receiver = 0;
  if (into) {
    receiver = *into;
  } else {
    receiver = *source == 0 ? 1 : 0;
  }
  if (receiver >= ode.equations.size() || receiver == *source) throw DerivationError("invalid receiving equation");

  TravelingWaveODE out;
  out.wave = ode.wave;
  out.params = ode.params;
  out.profile_of = ode.profile_of;
  out.integrations = ode.integrations;
  out.transform = ode.transform;
  for (const auto& p : ode.profiles) {
    if (p != profile) out.profiles.push_back(p);
  }
  const SymbolSet remaining = out.profile_set();
  Expr eq = substitute(ode.equations[receiver], {{profile, relation}});
  eq = expand(expand_derivatives(eq, remaining));
  out.cleared_factors.push_back(ode.cleared_factors[receiver]);
  Expr sign = clear_common_factor(eq);
  // prefer a positive coefficient on the highest derivative
  int best = -1;
  GaussianRational lead;
  for (const auto& t : terms_of(eq)) {
    int order = 0;
    for (const auto& f : t.is_product() ? std::vector<Expr>(t.operands().begin(), t.operands().end()) : std::vector<Expr>{t}) {
      const Expr& g = f.is_power() ? f.base() : f;
      if (g.is_derivative()) order = std::max(order, g.total_order());
    }
    if (order > best) {
      best = order;
      lead = split_coefficient(t).first;
    }
  }
  if (best >= 0 && lead.is_negative_real()) {
    eq = expand(-eq);
    sign = -sign;
  }
  out.cleared_factors.back() = out.cleared_factors.back() * sign;
  out.equations.push_back(eq);
  out.integration_constants = ode.integration_constants;
  out.eliminated = Elimination{profile, relation, *source};
  return out;
}

// ---------------------------------------------------------------------------
// Formatting and instantiation

std::string format_equation(const Expr& e, const SymbolSet& profiles) {
  std::map<Expr, std::vector<Expr>> groups;
  for (const auto& t : terms_of(expand(e))) {
    std::vector<Expr> fs = t.is_product() ? std::vector<Expr>(t.operands().begin(), t.operands().end()) : std::vector<Expr>{t};
    std::vector<Expr> dep;
    std::vector<Expr> coef;
    for (const auto& f : fs) (contains_any(f, profiles) ? dep : coef).push_back(f);
    groups[Expr::product(dep)].push_back(Expr::product(coef));
  }
  struct Row {
    int order;
    long degree;
    Expr part;
    Expr coef;
  };
  std::vector<Row> rows;
  for (const auto& [part, cs] : groups) {
    Expr coef = Expr::sum(cs);
    if (coef.is_zero()) continue;
    int order = 0;
    long degree = 0;
    for (const auto& f : part.is_product() ? std::vector<Expr>(part.operands().begin(), part.operands().end()) : std::vector<Expr>{part}) {
      const Expr& g = f.is_power() ? f.base() : f;
      const long k = f.is_power() ? f.exponent().integer_value().value_or(1) : 1;
      if (g.is_derivative()) order = std::max(order, g.total_order());
      degree += k;
    }
    rows.push_back({order, degree, part, coef});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.order != b.order) return a.order > b.order;
    return a.degree > b.degree;
  });
  if (rows.empty()) return "0";
  std::string out;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const Row& r = rows[k];
    std::string text;
    bool negative = false;
    if (r.part.is_one()) {
      text = r.coef.str();
    } else if (r.coef.is_constant()) {
      text = (r.coef * r.part).str();
    } else if (r.coef.is_sum()) {
      text = "(" + r.coef.str() + ")*" + r.part.str();
    } else {
      text = (r.coef * r.part).str();
    }
    if (text.front() == '-') {
      negative = true;
      text.erase(0, 1);
    }
    if (k == 0) {
      out += negative ? "-" + text : text;
    } else {
      out += negative ? " - " : " + ";
      out += text;
    }
  }
  return out;
}

Expr instantiate_profiles(const Expr& e, const Bindings& profiles) {
  return expand_derivatives(substitute(e, profiles), {});
}

}  // namespace meda
