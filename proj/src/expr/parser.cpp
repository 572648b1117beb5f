#include "meda/parser.hpp"

#include <cctype>
#include <string>
#include <vector>

#include "meda/error.hpp"

namespace meda {

namespace {

class Parser {
 public:
  Parser(std::string_view text, const SymbolSet* declared) : text_(text), declared_(declared) {}

  Expr parse() {
    Expr e = parse_sum();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])) != 0) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= text_.size()) fail(std::string("expected '") + c + "' but reached end of input");
      fail(std::string("expected '") + c + "'");
    }
  }

  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  Expr parse_sum() {
    std::vector<Expr> terms{parse_product()};
    for (;;) {
      if (accept('+')) {
        terms.push_back(parse_product());
      } else if (accept('-')) {
        terms.push_back(-parse_product());
      } else {
        break;
      }
    }
    return terms.size() == 1 ? terms.front() : Expr::sum(std::move(terms));
  }

  Expr parse_product() {
    std::vector<Expr> factors{parse_unary()};
    for (;;) {
      if (accept('*')) {
        factors.push_back(parse_unary());
      } else if (accept('/')) {
        factors.push_back(Expr::power(parse_unary(), Expr(-1)));
      } else {
        break;
      }
    }
    return factors.size() == 1 ? factors.front() : Expr::product(std::move(factors));
  }

  Expr parse_unary() {
    if (accept('-')) return -parse_unary();
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_atom();
    if (accept('^')) {
      Expr exponent = parse_unary();
      return Expr::power(base, exponent);
    }
    return base;
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) != 0 || text_[pos_] == '.')) {
      ++pos_;
    }
    std::string_view lit = text_.substr(start, pos_ - start);
    if (lit.find('.') != lit.rfind('.') || lit == ".") {
      pos_ = start;
      fail("malformed number");
    }
    return Expr(GaussianRational::parse_decimal(lit));
  }

  std::string parse_identifier() {
    skip_space();
    const std::size_t start = pos_;
    if (pos_ >= text_.size() || std::isalpha(static_cast<unsigned char>(text_[pos_])) == 0) {
      fail("expected identifier");
    }
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) != 0 || text_[pos_] == '_')) {
      ++pos_;
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  Expr parse_derivative() {
    Expr inner = parse_sum();
    std::vector<DerivOrder> orders;
    while (accept(',')) {
      const std::size_t at = pos_;
      std::string var = parse_identifier();
      if (declared_ != nullptr && !declared_->contains(var)) {
        pos_ = at;
        throw UndeclaredSymbol(var);
      }
      orders.push_back({var, 1});
    }
    expect(')');
    if (orders.empty()) fail("derivative needs at least one variable");
    return Expr::derivative(inner, std::move(orders));
  }

  Expr parse_atom() {
    const char c = peek();
    if (c == '\0') fail("unexpected end of input");
    if (accept('(')) {
      Expr e = parse_sum();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) != 0 || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) == 0) fail("unexpected '" + std::string(1, c) + "'");

    const std::size_t at = pos_;
    std::string id = parse_identifier();
    if (peek() == '(') {
      if (id == "D") {
        accept('(');
        return parse_derivative();
      }
      if (auto f = func_from_name(id)) {
        accept('(');
        Expr arg = parse_sum();
        expect(')');
        return Expr::function(*f, arg);
      }
    }
    if (id == "i") return Expr::imaginary_unit();
    if (func_from_name(id)) {
      pos_ = at;
      fail("function '" + id + "' needs an argument");
    }
    if (declared_ != nullptr && !declared_->contains(id)) {
      pos_ = at;
      throw UndeclaredSymbol(id);
    }
    return Expr::symbol(id);
  }

  std::string_view text_;
  const SymbolSet* declared_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(std::string_view text, const SymbolSet& declared) { return Parser(text, &declared).parse(); }

Expr parse_expr_free(std::string_view text) { return Parser(text, nullptr).parse(); }

}  // namespace meda
