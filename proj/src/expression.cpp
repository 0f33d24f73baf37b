#include "gsisio/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>

#include "gsisio/errors.hpp"

namespace gsisio {

enum class Op { kConst, kVar, kTime, kNeg, kAdd, kSub, kMul, kDiv, kSin, kCos, kTanh, kExp };

struct Expression::Node {
  Op op = Op::kConst;
  double value = 0.0;
  std::size_t index = 0;
  bool literal = false;  // constant written as a number in the source
  std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

class Parser {
 public:
  Parser(std::string_view src, const ExpressionSymbols& sym) : src_(src), sym_(sym) {}

  NodePtr run() {
    NodePtr e = expr();
    skip();
    if (pos_ < src_.size()) fail(std::string("unexpected '") + src_[pos_] + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("expression \"" + std::string(src_) + "\": " + msg + " at column " + std::to_string(pos_ + 1));
  }

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

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make(Op::kAdd, lhs, term());
      } else if (accept('-')) {
        lhs = make(Op::kSub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make(Op::kMul, lhs, unary());
      } else if (accept('/')) {
        const std::size_t at = pos_;
        NodePtr rhs = unary();
        if (rhs->op == Op::kConst && rhs->literal && rhs->value == 0.0) {
          pos_ = at;
          skip();
          fail("division by literal zero");
        }
        lhs = make(Op::kDiv, lhs, rhs);
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Op::kNeg, unary());
    if (accept('+')) return unary();
    return atom();
  }

  NodePtr atom() {
    skip();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name();
    fail(std::string("unexpected '") + c + "'");
  }

  NodePtr number() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) ++pos_;
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t q = pos_ + 1;
      if (q < src_.size() && (src_[q] == '+' || src_[q] == '-')) ++q;
      if (q < src_.size() && std::isdigit(static_cast<unsigned char>(src_[q]))) {
        pos_ = q;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      }
    }
    const std::string text(src_.substr(start, pos_ - start));
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || !std::isfinite(v)) {
      pos_ = start;
      fail("malformed number '" + text + "'");
    }
    auto n = std::make_shared<Expression::Node>();
    n->value = v;
    n->literal = true;
    return n;
  }

  NodePtr name() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
    const std::string id(src_.substr(start, pos_ - start));

    static const std::pair<const char*, Op> kFuncs[] = {
        {"sin", Op::kSin}, {"cos", Op::kCos}, {"tanh", Op::kTanh}, {"exp", Op::kExp}};
    for (const auto& [fname, op] : kFuncs) {
      if (id == fname) {
        if (!accept('(')) fail("expected '(' after " + id);
        NodePtr arg = expr();
        if (!accept(')')) fail("expected ')'");
        return make(op, arg);
      }
    }
    if (id.size() > 1 && id[0] == 'x' && id.find_first_not_of("0123456789", 1) == std::string::npos) {
      const unsigned long idx = std::strtoul(id.c_str() + 1, nullptr, 10);
      if (idx == 0 || idx > sym_.state_dim) {
        pos_ = start;
        fail("variable " + id + " out of range (state dimension " + std::to_string(sym_.state_dim) + ")");
      }
      auto n = std::make_shared<Expression::Node>();
      n->op = Op::kVar;
      n->index = idx - 1;
      return n;
    }
    if (id == "k" && sym_.allow_time) return make(Op::kTime);
    auto n = std::make_shared<Expression::Node>();
    if (id == "pi") {
      n->value = std::numbers::pi;
      return n;
    }
    if (auto it = sym_.constants.find(id); it != sym_.constants.end()) {
      n->value = it->second;
      return n;
    }
    pos_ = start;
    fail("unknown identifier '" + id + "'");
  }

  std::string_view src_;
  const ExpressionSymbols& sym_;
  std::size_t pos_ = 0;
};

double eval(const Expression::Node& n, const Vector& x, double k) {
  switch (n.op) {
    case Op::kConst: return n.value;
    case Op::kVar: return x[n.index];
    case Op::kTime: return k;
    case Op::kNeg: return -eval(*n.a, x, k);
    case Op::kAdd: return eval(*n.a, x, k) + eval(*n.b, x, k);
    case Op::kSub: return eval(*n.a, x, k) - eval(*n.b, x, k);
    case Op::kMul: return eval(*n.a, x, k) * eval(*n.b, x, k);
    case Op::kDiv: return eval(*n.a, x, k) / eval(*n.b, x, k);
    case Op::kSin: return std::sin(eval(*n.a, x, k));
    case Op::kCos: return std::cos(eval(*n.a, x, k));
    case Op::kTanh: return std::tanh(eval(*n.a, x, k));
    case Op::kExp: return std::exp(eval(*n.a, x, k));
  }
  return 0.0;
}

void print(const Expression::Node& n, std::string& out) {
  auto bin = [&](const char* sym) {
    out += '(';
    print(*n.a, out);
    out += sym;
    print(*n.b, out);
    out += ')';
  };
  auto fn = [&](const char* name) {
    out += name;
    out += '(';
    print(*n.a, out);
    out += ')';
  };
  switch (n.op) {
    case Op::kConst: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      out += buf;
      return;
    }
    case Op::kVar: out += "x" + std::to_string(n.index + 1); return;
    case Op::kTime: out += "k"; return;
    case Op::kNeg:
      out += "(-";
      print(*n.a, out);
      out += ')';
      return;
    case Op::kAdd: bin(" + "); return;
    case Op::kSub: bin(" - "); return;
    case Op::kMul: bin("*"); return;
    case Op::kDiv: bin("/"); return;
    case Op::kSin: fn("sin"); return;
    case Op::kCos: fn("cos"); return;
    case Op::kTanh: fn("tanh"); return;
    case Op::kExp: fn("exp"); return;
  }
}

std::size_t max_var(const Expression::Node& n) {
  std::size_t m = n.op == Op::kVar ? n.index + 1 : 0;
  if (n.a) m = std::max(m, max_var(*n.a));
  if (n.b) m = std::max(m, max_var(*n.b));
  return m;
}

}  // namespace

Expression::Expression(std::shared_ptr<const Node> root) : root_(std::move(root)), arity_(max_var(*root_)) {}

Expression Expression::parse(std::string_view src, const ExpressionSymbols& symbols) {
  return Expression(Parser(src, symbols).run());
}

double Expression::evaluate(const Vector& x, double k) const {
  if (!root_) throw ConfigError("evaluating an empty expression");
  if (x.size() < arity_) throw DimensionError("expression: state vector too short");
  return eval(*root_, x, k);
}

std::string Expression::to_string() const {
  std::string out;
  if (root_) print(*root_, out);
  return out;
}

}  // namespace gsisio
