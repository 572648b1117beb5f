#include <cmath>

#include "doctest.h"
#include "meda/calculus.hpp"
#include "meda/error.hpp"
#include "meda/eval.hpp"
#include "meda/parser.hpp"
#include "meda/poly.hpp"
#include "meda/rational_function.hpp"

using namespace meda;

namespace {

const SymbolSet kSymbols{"x", "t", "z", "u", "v", "c", "n", "alpha", "beta", "lambda", "a0", "a1", "b", "phi", "k"};

Expr P(const char* text) { return parse_expr(text, kSymbols); }

}  // namespace

TEST_CASE("gaussian rationals stay exact") {
  GaussianRational h = GaussianRational::ratio(6, -4);
  CHECK(h.str() == "-3/2");
  CHECK((GaussianRational::i() * GaussianRational::i()) == GaussianRational(-1));
  CHECK(GaussianRational(mpq_class(1, 2), 3).str() == "(1/2+3*i)");
  CHECK((GaussianRational(1) / GaussianRational(0, 2)) == GaussianRational(0, mpq_class(-1, 2)));
  CHECK(GaussianRational::ratio(-9, 4).exact_sqrt() == GaussianRational(0, mpq_class(3, 2)));
  CHECK_FALSE(GaussianRational(2).exact_sqrt().has_value());
  CHECK_THROWS_AS(GaussianRational(0).inverse(), DivisionByZero);
  CHECK(GaussianRational::parse_decimal("0.25") == GaussianRational::ratio(1, 4));
}

TEST_CASE("parser maps the grammar onto canonical trees") {
  Expr e = P("alpha*D(u,x)");
  REQUIRE(e.is_product());
  CHECK(e.operands()[0] == sym("alpha"));
  CHECK(e.operands()[1] == Expr::derivative(sym("u"), {{"x", 1}}));

  Expr d = P("beta*D(u^n, x, x, t)");
  REQUIRE(d.is_product());
  const Expr& m = d.operands()[1];
  REQUIRE(m.is_derivative());
  CHECK(m.inner() == pow(sym("u"), sym("n")));
  CHECK(m.orders() == std::vector<DerivOrder>{{"t", 1}, {"x", 2}});

  Expr w = P("i*(x - c*t)");
  REQUIRE(w.is_product());
  CHECK(w.operands()[0] == Expr::imaginary_unit());
  CHECK(w.operands()[1] == Expr::sum({sym("x"), Expr::product({Expr(-1), sym("c"), sym("t")})}));

  CHECK(P("2^-1") == Expr::ratio(1, 2));
  CHECK(P("-x^2") == -pow(sym("x"), Expr(2)));
  CHECK(P("x^2^3") == pow(sym("x"), Expr(8)));
  CHECK(P("x - x") == Expr());
  CHECK(P("x*x/x") == sym("x"));
}

TEST_CASE("parser reports errors") {
  CHECK_THROWS_AS(P("y + 1"), UndeclaredSymbol);
  CHECK_THROWS_AS(P("x + "), ParseError);
  CHECK_THROWS_AS(P("(x"), ParseError);
  CHECK_THROWS_AS(P("tan x"), ParseError);
  try {
    P("x $ 2");
    FAIL("expected a parse error");
  } catch (const ParseError& err) {
    CHECK(err.position() == 2);
  }
}

TEST_CASE("rendering re-parses to the same expression") {
  for (const char* text : {"alpha*D(u,x)", "i*(x - c*t)", "(1/2)*x^2 - 3*x*y/z", "tan(k*z)^2 + 1",
                           "u^(n-1)*D(u, x, x)", "-(a0 + 2*i*phi)^3", "sqrt(-b)*coth(sqrt(-b)*z)"}) {
    Expr e = parse_expr_free(text);
    CHECK(parse_expr_free(e.str()) == e);
  }
}

TEST_CASE("differentiation") {
  CHECK(differentiate(P("z^2"), "z") == P("2*z"));
  CHECK(poly_zero_check(differentiate(P("tan(k*z)"), "z") - P("k*(1 + tan(k*z)^2)")));
  CHECK(differentiate(P("alpha"), "z").is_zero());
  CHECK(differentiate(P("u^n"), "x", {"u"}) == P("n*u^(n-1)*D(u, x)"));
  CHECK(differentiate(P("D(u^n, x)"), "x", {"u"}) == P("D(u^n, x, x)"));
  CHECK_THROWS_AS(differentiate(P("z^z"), "z"), UnsupportedOperation);
  Expr e = expand_derivatives(P("D(u^2, x, x)"), {"u"});
  CHECK(poly_zero_check(e - P("2*D(u,x)^2 + 2*u*D(u,x,x)")));
}

TEST_CASE("substitution is simultaneous") {
  CHECK(substitute(P("u^2"), {{"u", P("a0 + a1*phi")}}) == P("(a0 + a1*phi)^2"));
  CHECK(substitute(P("x"), {}) == P("x"));
  CHECK(substitute(P("lambda"), {{"lambda", P("-a0")}}) == P("-a0"));
  CHECK(substitute(P("x + t"), {{"x", P("t")}, {"t", P("x")}}) == P("x + t"));
}

TEST_CASE("expand_normalize") {
  PolyForm f = expand_normalize(P("(phi + 1)^2"), SymbolSet{"phi"});
  CHECK(f.coefficient({2}) == Poly(1));
  CHECK(f.coefficient({1}) == Poly(2));
  CHECK(f.coefficient({0}) == Poly(1));
  CHECK(f.terms().size() == 3);

  // (a0 + 2 i phi)^3 has phi^3 coefficient (2i)^3 = -8i
  PolyForm g = expand_normalize(P("(a0 + 2*i*phi)^3"), SymbolSet{"phi"});
  CHECK(g.coefficient({3}) == Poly(GaussianRational(0, -8)));

  PolyForm h = expand_normalize(P("b*phi^-1 + phi"), SymbolSet{"phi"});
  CHECK(h.min_exponents() == std::vector<int>{-1});
  CHECK(h.coefficient({-1}) == Poly::atom(sym("b")));

  CHECK_THROWS_AS(expand_normalize(P("tan(phi)"), SymbolSet{"phi"}), NonPolynomial);
  CHECK(expand_normalize(P("phi - phi"), SymbolSet{"phi"}).is_zero());

  PolyForm again = expand_normalize(g.to_expr(), SymbolSet{"phi"});
  CHECK(again == g);
}

TEST_CASE("poly_zero_check") {
  CHECK(poly_zero_check(P("(n-1)^2 - (n^2 - 2*n + 1)")));
  Expr e = P("4*b - a0^2");
  CHECK(poly_zero_check(substitute(e, {{"b", P("a0^2/4")}})));
  Expr wrong = substitute(e, {{"b", P("-a0^2/4")}});
  CHECK_FALSE(poly_zero_check(wrong));
  CHECK(poly_zero_check(wrong + P("2*a0^2")));
  CHECK(poly_zero_check(P("1/(n-1) + 1/(1-n)")));
  CHECK(poly_zero_check(P("x/(x+1) + 1/(x+1) - 1")));
  CHECK(poly_zero_check(P("sqrt(x+1)^2 - x - 1")));
  CHECK(poly_zero_check(P("sqrt(c)*sqrt(c)*sqrt(c) - c*sqrt(c)")));
  CHECK_THROWS_AS(poly_zero_check(P("1/(x - x)")), DivisionByZero);
  CHECK_FALSE(poly_zero_check(P("x/(x+1)")));
}

TEST_CASE("rational function constants") {
  auto r = RationalFunction::from_expr(P("(n^2 - 1)/(n - 1) - n"));
  CHECK(r.as_constant() == GaussianRational(1));
  auto s = RationalFunction::from_expr(P("n/(n-1)"));
  CHECK_FALSE(s.as_constant().has_value());
}

TEST_CASE("eval_complex") {
  NumericBindings b{{"z", {2.0, 0.0}}};
  CHECK(eval_complex(P("z^2"), b) == Complex(4.0, 0.0));
  Complex v = eval_complex(P("tan(i*1)"), {});
  CHECK(std::abs(v.real()) < 1e-15);
  CHECK(v.imag() == doctest::Approx(std::tanh(1.0)).epsilon(1e-14));
  CHECK(v.imag() == doctest::Approx(0.7615941559557649).epsilon(1e-12));
  Complex r = eval_complex(P("sqrt(-1)"), {});
  CHECK(r == Complex(0.0, 1.0));
  CHECK_THROWS_AS(eval_complex(P("x"), {}), UnboundSymbol);
  CHECK_THROWS_AS(eval_complex(P("cot(z)"), {{"z", {0.0, 0.0}}}), PoleError);
  CHECK_THROWS_AS(eval_complex(P("1/z"), {{"z", {0.0, 0.0}}}), PoleError);
  CHECK_THROWS_AS(eval_complex(P("D(u, x)"), {{"u", {1.0, 0.0}}}), UnsupportedOperation);
}
