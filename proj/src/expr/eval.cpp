#include "meda/eval.hpp"

#include <cmath>

#include "meda/error.hpp"

namespace meda {

namespace {

Complex checked(Complex v) {
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw PoleError("non-finite value");
  return v;
}

Complex integer_power(Complex base, long k, const EvalOptions& opts) {
  if (k < 0) {
    if (std::abs(base) < opts.min_divisor) throw PoleError("negative power of a vanishing base");
    base = 1.0 / base;
    k = -k;
  }
  Complex r(1.0, 0.0);
  while (k != 0) {
    if ((k & 1) != 0) r *= base;
    k >>= 1;
    if (k != 0) base *= base;
  }
  return r;
}

Complex eval(const Expr& e, const NumericBindings& b, const EvalOptions& opts) {
  switch (e.kind()) {
    case Kind::constant: return e.value().to_complex();
    case Kind::symbol: {
      auto it = b.find(e.name());
      if (it == b.end()) throw UnboundSymbol(e.name());
      return it->second;
    }
    case Kind::sum: {
      Complex s(0.0, 0.0);
      for (const auto& t : e.operands()) s += eval(t, b, opts);
      return s;
    }
    case Kind::product: {
      Complex p(1.0, 0.0);
      for (const auto& f : e.operands()) p *= eval(f, b, opts);
      return checked(p);
    }
    case Kind::power: {
      const Complex base = eval(e.base(), b, opts);
      if (auto k = e.exponent().integer_value()) return checked(integer_power(base, *k, opts));
      const Complex x = eval(e.exponent(), b, opts);
      if (base == Complex(0.0, 0.0)) {
        if (x.real() > 0.0) return {0.0, 0.0};
        throw PoleError("zero base with non-positive exponent");
      }
      if (x.real() < 0.0 && std::abs(base) < opts.min_divisor) throw PoleError("negative power of a vanishing base");
      return checked(std::pow(base, x));
    }
    case Kind::function: {
      const Complex w = eval(e.argument(), b, opts);
      switch (e.func()) {
        case Func::tan: {
          const Complex c = std::cos(w);
          if (std::abs(c) < opts.pole_guard) throw PoleError("tan pole");
          return checked(std::tan(w));
        }
        case Func::cot: {
          const Complex s = std::sin(w);
          if (std::abs(s) < opts.pole_guard) throw PoleError("cot pole");
          return checked(1.0 / std::tan(w));
        }
        case Func::tanh: {
          const Complex c = std::cosh(w);
          if (std::abs(c) < opts.pole_guard) throw PoleError("tanh pole");
          return checked(std::tanh(w));
        }
        case Func::coth: {
          const Complex s = std::sinh(w);
          if (std::abs(s) < opts.pole_guard) throw PoleError("coth pole");
          return checked(1.0 / std::tanh(w));
        }
        case Func::sqrt: return std::sqrt(w);
      }
      break;
    }
    case Kind::derivative: throw UnsupportedOperation("cannot evaluate an unexpanded derivative " + e.str());
  }
  throw UnsupportedOperation("unsupported expression node");
}

}  // namespace

Complex eval_complex(const Expr& e, const NumericBindings& bindings, const EvalOptions& opts) {
  return eval(e, bindings, opts);
}

}  // namespace meda
