#include "hnn/expression.h"

#include <cctype>
#include <charconv>
#include <optional>

namespace hnn {

namespace {

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  ExprPtr parse() {
    ExprPtr e = expr();
    skip();
    if (pos_ < src_.size()) fail(std::string("unexpected '") + src_[pos_] + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(pos_, msg); }

  void skip() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  ExprPtr expr() {
    skip();
    auto sum = std::make_shared<Expr>();
    sum->kind = Expr::Kind::Sum;
    sum->offset = pos_;
    int sign = 1;
    if (accept('-')) {
      sign = -1;
    } else {
      accept('+');
    }
    sum->signs.push_back(sign);
    sum->children.push_back(term());
    while (true) {
      if (accept('+')) {
        sum->signs.push_back(1);
      } else if (accept('-')) {
        sum->signs.push_back(-1);
      } else {
        break;
      }
      sum->children.push_back(term());
    }
    if (sum->children.size() == 1 && sum->signs[0] == 1) return sum->children[0];
    return sum;
  }

  ExprPtr term() {
    skip();
    auto prod = std::make_shared<Expr>();
    prod->kind = Expr::Kind::Product;
    prod->offset = pos_;
    prod->children.push_back(factor());
    while (accept('*')) prod->children.push_back(factor());
    if (prod->children.size() == 1) return prod->children[0];
    return prod;
  }

  ExprPtr factor() {
    ExprPtr e = atom();
    skip();
    if (accept('^')) {
      skip();
      auto p = std::make_shared<Expr>();
      p->kind = Expr::Kind::Power;
      p->offset = pos_;
      p->exponent = integer();
      p->children.push_back(e);
      e = p;
    }
    if (accept('\'')) {
      auto a = std::make_shared<Expr>();
      a->kind = Expr::Kind::Adjoint;
      a->offset = pos_ - 1;
      a->children.push_back(e);
      e = a;
    }
    return e;
  }

  int integer() {
    const std::size_t start = pos_;
    if (pos_ < src_.size() && (src_[pos_] == '-' || src_[pos_] == '+')) ++pos_;
    const std::size_t digits = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (pos_ == digits) fail("expected an integer power");
    if (pos_ < src_.size() && (src_[pos_] == '.' || src_[pos_] == 'e' || src_[pos_] == 'E')) {
      fail("power must be an integer");
    }
    int v = 0;
    const char* first = src_.data() + (src_[start] == '+' ? start + 1 : start);
    auto [ptr, ec] = std::from_chars(first, src_.data() + pos_, v);
    if (ec != std::errc()) {
      pos_ = start;
      fail("power out of range");
    }
    return v;
  }

  ExprPtr atom() {
    skip();
    if (pos_ >= src_.size()) fail("unexpected end of expression");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      ExprPtr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return scalar();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      auto id = std::make_shared<Expr>();
      id->kind = Expr::Kind::Identifier;
      id->offset = pos_;
      while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        ++pos_;
      }
      id->name = std::string(src_.substr(id->offset, pos_ - id->offset));
      return id;
    }
    fail(std::string("unexpected '") + c + "'");
  }

  ExprPtr scalar() {
    const std::size_t start = pos_;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(src_.data() + pos_, src_.data() + src_.size(), v);
    if (ec != std::errc()) fail("malformed number");
    pos_ = static_cast<std::size_t>(ptr - src_.data());
    auto s = std::make_shared<Expr>();
    s->kind = Expr::Kind::Scalar;
    s->offset = start;
    s->value = v;
    if (pos_ < src_.size() && src_[pos_] == 'i' &&
        (pos_ + 1 == src_.size() || !std::isalnum(static_cast<unsigned char>(src_[pos_ + 1])))) {
      ++pos_;
      s->value = Complex(0.0, v);
    }
    return s;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

std::optional<std::size_t> letter_index(const std::string& name, std::size_t count) {
  if (name.size() < 2 || name[0] != 't') return std::nullopt;
  std::size_t k = 0;
  auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), k);
  if (ec != std::errc() || ptr != name.data() + name.size() || k == 0 || name[1] == '0') return std::nullopt;
  if (k > count) return std::nullopt;
  return k - 1;
}

// Shared evaluation skeleton over HnnElement and AlgebraElement.
template <class T, class Ops>
T eval(const Expr& e, const Ops& ops) {
  switch (e.kind) {
    case Expr::Kind::Identifier:
      return ops.identifier(e);
    case Expr::Kind::Scalar:
      return ops.scalar(e.value);
    case Expr::Kind::Sum: {
      T out = ops.scalar(0.0);
      for (std::size_t i = 0; i < e.children.size(); ++i) {
        T term = eval<T>(*e.children[i], ops);
        out = e.signs[i] > 0 ? ops.add(out, term) : ops.add(out, ops.negate(term));
      }
      return out;
    }
    case Expr::Kind::Product: {
      T out = eval<T>(*e.children[0], ops);
      for (std::size_t i = 1; i < e.children.size(); ++i) out = ops.mul(out, eval<T>(*e.children[i], ops));
      return out;
    }
    case Expr::Kind::Power: {
      T base = eval<T>(*e.children[0], ops);
      if (e.exponent < 0) {
        if (!ops.unitary(base)) throw ParseError(e.offset, "negative power of a non-unitary operand");
        base = ops.adjoint(base);
      }
      T out = ops.scalar(1.0);
      for (int i = 0; i < std::abs(e.exponent); ++i) out = ops.mul(out, base);
      return out;
    }
    case Expr::Kind::Adjoint:
      return ops.adjoint(eval<T>(*e.children[0], ops));
  }
  throw Error("unknown expression node");
}

struct HnnOps {
  const ScenarioPtr& s;
  std::vector<std::pair<std::string, AlgebraElement>> bindings;

  HnnElement identifier(const Expr& e) const {
    if (auto k = letter_index(e.name, s->thetas().size())) return HnnElement::letter(s, *k, 1);
    for (auto it = bindings.rbegin(); it != bindings.rend(); ++it) {
      if (it->first == e.name) return HnnElement::base(s, it->second);
    }
    throw ParseError(e.offset, "unresolved identifier '" + e.name + "'");
  }
  HnnElement scalar(Complex c) const { return c == Complex(0.0) ? HnnElement::zero(s) : HnnElement::scalar(s, c); }
  // Base summands are collected into one leading length-0 word.
  HnnElement add(const HnnElement& a, const HnnElement& b) const {
    AlgebraElement base_part = AlgebraElement::zero(s->base());
    std::vector<HnnWord> rest;
    for (const HnnElement* x : {&a, &b}) {
      for (const auto& w : x->words()) {
        if (w.length() == 0) {
          base_part += w.coefficients.front();
        } else {
          rest.push_back(w);
        }
      }
    }
    std::vector<HnnWord> words;
    if (!base_part.is_zero()) words.emplace_back(std::move(base_part));
    for (auto& w : rest) words.push_back(std::move(w));
    return HnnElement(s, std::move(words));
  }
  HnnElement negate(const HnnElement& a) const { return Complex(-1.0) * a; }
  HnnElement mul(const HnnElement& a, const HnnElement& b) const {
    // Keep the raw expansion, but fold scalar factors in place.
    if (a.words().size() == 1 && a.words()[0].length() == 0 && a.words()[0].coefficients[0] == AlgebraElement::one(s->base())) {
      return b;
    }
    return concatenate(a, b);
  }
  HnnElement adjoint(const HnnElement& a) const { return hnn::adjoint(a); }
  bool unitary(const HnnElement& a) const { return is_unitary(a); }
};

struct BaseOps {
  const BackendPtr& backend;
  const std::vector<std::pair<std::string, AlgebraElement>>& bindings;

  AlgebraElement identifier(const Expr& e) const {
    for (auto it = bindings.rbegin(); it != bindings.rend(); ++it) {
      if (it->first == e.name) return it->second;
    }
    throw ParseError(e.offset, "unresolved identifier '" + e.name + "'");
  }
  AlgebraElement scalar(Complex c) const { return AlgebraElement::scalar(backend, c); }
  AlgebraElement add(const AlgebraElement& a, const AlgebraElement& b) const { return a + b; }
  AlgebraElement negate(const AlgebraElement& a) const { return -a; }
  AlgebraElement mul(const AlgebraElement& a, const AlgebraElement& b) const { return a * b; }
  AlgebraElement adjoint(const AlgebraElement& a) const { return hnn::adjoint(a); }
  bool unitary(const AlgebraElement& a) const {
    const AlgebraElement one = AlgebraElement::one(backend);
    const AlgebraElement as = hnn::adjoint(a);
    return distance(a * as, one) <= 1e-9 && distance(as * a, one) <= 1e-9;
  }
};

}  // namespace

ExprPtr parse_expression(std::string_view src) { return Parser(src).parse(); }

std::vector<std::pair<std::string, AlgebraElement>> base_bindings(
    const BackendPtr& backend, const std::vector<std::pair<std::string, AlgebraElement>>& extra) {
  std::vector<std::pair<std::string, AlgebraElement>> out;
  for (const auto& [name, b] : backend->default_bindings()) out.emplace_back(name, AlgebraElement::basis(backend, b));
  out.insert(out.end(), extra.begin(), extra.end());
  return out;
}

HnnElement evaluate(const Expr& e, const ScenarioPtr& s) {
  const HnnOps ops{s, base_bindings(s->base(), s->bindings())};
  return eval<HnnElement>(e, ops);
}

HnnElement evaluate(std::string_view src, const ScenarioPtr& s) { return evaluate(*parse_expression(src), s); }

AlgebraElement evaluate_base(const Expr& e, const BackendPtr& backend,
                             const std::vector<std::pair<std::string, AlgebraElement>>& bindings) {
  const BaseOps ops{backend, bindings};
  return eval<AlgebraElement>(e, ops);
}

}  // namespace hnn
