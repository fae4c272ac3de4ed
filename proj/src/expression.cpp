#include "pks/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

namespace pks {

namespace {

struct Expr {
  virtual ~Expr() = default;
  virtual double eval(double s) const = 0;
};
using Ptr = std::shared_ptr<const Expr>;

struct Const : Expr {
  double v;
  explicit Const(double x) : v(x) {}
  double eval(double) const override { return v; }
};

struct Var : Expr {
  double eval(double s) const override { return s; }
};

struct Unary : Expr {
  char op;
  Ptr a;
  Unary(char o, Ptr x) : op(o), a(std::move(x)) {}
  double eval(double s) const override {
    const double x = a->eval(s);
    return op == '-' ? -x : (x == 0.0 ? 1.0 : 0.0);
  }
};

struct Binary : Expr {
  std::string op;
  Ptr a, b;
  Binary(std::string o, Ptr x, Ptr y) : op(std::move(o)), a(std::move(x)), b(std::move(y)) {}
  double eval(double s) const override {
    const double x = a->eval(s);
    if (op == "&&") return (x != 0.0 && b->eval(s) != 0.0) ? 1.0 : 0.0;
    if (op == "||") return (x != 0.0 || b->eval(s) != 0.0) ? 1.0 : 0.0;
    const double y = b->eval(s);
    switch (op[0]) {
      case '+': return x + y;
      case '-': return x - y;
      case '*': return x * y;
      case '/': return x / y;
      case '^': return std::pow(x, y);
      case '<': return (op == "<=" ? x <= y : x < y) ? 1.0 : 0.0;
      case '>': return (op == ">=" ? x >= y : x > y) ? 1.0 : 0.0;
      case '=': return x == y ? 1.0 : 0.0;
      case '!': return x != y ? 1.0 : 0.0;
    }
    return NAN;
  }
};

struct Call : Expr {
  std::string name;
  std::vector<Ptr> args;
  double eval(double s) const override {
    const double x = args[0]->eval(s);
    if (name == "exp") return std::exp(x);
    if (name == "log") return std::log(x);
    if (name == "sqrt") return std::sqrt(x);
    if (name == "abs") return std::abs(x);
    if (name == "floor") return std::floor(x);
    if (name == "ceil") return std::ceil(x);
    if (name == "ind") return x != 0.0 ? 1.0 : 0.0;
    double r = x;
    for (std::size_t i = 1; i < args.size(); ++i) {
      const double y = args[i]->eval(s);
      r = name == "min" ? std::min(r, y) : std::max(r, y);
    }
    return r;
  }
};

class Parser {
 public:
  explicit Parser(const std::string& t) : t_(t) {}

  Ptr parse() {
    Ptr e = parse_or();
    skip();
    if (i_ != t_.size()) fail("unexpected '" + std::string(1, t_[i_]) + "'");
    return e;
  }
  bool uses_s = false;

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParameterError("expression '" + t_ + "', column " + std::to_string(i_ + 1) + ": " + what);
  }
  void skip() {
    while (i_ < t_.size() && std::isspace(static_cast<unsigned char>(t_[i_]))) ++i_;
  }
  bool eat(const char* tok) {
    skip();
    const std::size_t n = std::char_traits<char>::length(tok);
    if (t_.compare(i_, n, tok) == 0) {
      i_ += n;
      return true;
    }
    return false;
  }

  Ptr parse_or() {
    Ptr a = parse_and();
    while (eat("||")) a = std::make_shared<Binary>("||", a, parse_and());
    return a;
  }
  Ptr parse_and() {
    Ptr a = parse_cmp();
    while (eat("&&")) a = std::make_shared<Binary>("&&", a, parse_cmp());
    return a;
  }
  Ptr parse_cmp() {
    Ptr a = parse_sum();
    for (const char* op : {"<=", ">=", "==", "!=", "<", ">"})
      if (eat(op)) return std::make_shared<Binary>(op, a, parse_sum());
    return a;
  }
  Ptr parse_sum() {
    Ptr a = parse_product();
    for (;;) {
      if (eat("+")) a = std::make_shared<Binary>("+", a, parse_product());
      else if (eat("-")) a = std::make_shared<Binary>("-", a, parse_product());
      else return a;
    }
  }
  Ptr parse_product() {
    Ptr a = parse_unary();
    for (;;) {
      if (eat("*")) a = std::make_shared<Binary>("*", a, parse_unary());
      else if (eat("/")) a = std::make_shared<Binary>("/", a, parse_unary());
      else return a;
    }
  }
  Ptr parse_unary() {
    if (eat("-")) return std::make_shared<Unary>('-', parse_unary());
    skip();
    if (i_ < t_.size() && t_[i_] == '!' && (i_ + 1 >= t_.size() || t_[i_ + 1] != '=')) {
      ++i_;
      return std::make_shared<Unary>('!', parse_unary());
    }
    Ptr a = parse_atom();
    if (eat("^")) return std::make_shared<Binary>("^", a, parse_unary());
    return a;
  }
  Ptr parse_atom() {
    skip();
    if (i_ >= t_.size()) fail("unexpected end of expression");
    const char c = t_[i_];
    if (c == '(') {
      ++i_;
      Ptr e = parse_or();
      if (!eat(")")) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double v = 0;
      const auto r = std::from_chars(t_.data() + i_, t_.data() + t_.size(), v);
      if (r.ec != std::errc()) fail("bad number");
      i_ = static_cast<std::size_t>(r.ptr - t_.data());
      return std::make_shared<Const>(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t b = i_;
      while (i_ < t_.size() && (std::isalnum(static_cast<unsigned char>(t_[i_])) || t_[i_] == '_')) ++i_;
      const std::string name = t_.substr(b, i_ - b);
      if (name == "s") {
        uses_s = true;
        return std::make_shared<Var>();
      }
      if (name == "pi") return std::make_shared<Const>(std::numbers::pi);
      static const char* known[] = {"exp", "log", "sqrt", "abs", "floor", "ceil", "ind", "min", "max"};
      bool ok = false;
      for (const char* k : known) ok = ok || name == k;
      if (!ok) {
        i_ = b;
        fail("unknown name '" + name + "'");
      }
      if (!eat("(")) fail("expected '(' after " + name);
      auto call = std::make_shared<Call>();
      call->name = name;
      call->args.push_back(parse_or());
      while (eat(",")) call->args.push_back(parse_or());
      if (!eat(")")) fail("expected ')'");
      const bool variadic = name == "min" || name == "max";
      if (variadic ? call->args.size() < 2 : call->args.size() != 1)
        fail("wrong number of arguments to " + name);
      return call;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& t_;
  std::size_t i_ = 0;
};

}  // namespace

ScalarFn parse_function(const std::string& text) {
  Parser p(text);
  Ptr e = p.parse();
  return [e](double s) { return e->eval(s); };
}

double parse_number(const std::string& text) {
  Parser p(text);
  Ptr e = p.parse();
  if (p.uses_s) throw ParameterError("expression '" + text + "': expected a constant");
  return e->eval(0.0);
}

}  // namespace pks
