#include "orbitforge/expr.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cstdint>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "orbitforge/errors.hpp"

namespace orbitforge {

struct Expr::Node {
  ExprOp op = ExprOp::constant;
  double value = 0.0;
  std::string name;
  int exponent = 0;
  std::vector<Expr> children;
};

namespace {

bool is_unary_function(ExprOp op) {
  switch (op) {
    case ExprOp::sin:
    case ExprOp::cos:
    case ExprOp::exp:
    case ExprOp::log:
    case ExprOp::bump:
    case ExprOp::step:
      return true;
    default:
      return false;
  }
}

bool is_binary(ExprOp op) {
  return op == ExprOp::add || op == ExprOp::sub || op == ExprOp::mul || op == ExprOp::div;
}

const char* function_name(ExprOp op) {
  switch (op) {
    case ExprOp::sin: return "sin";
    case ExprOp::cos: return "cos";
    case ExprOp::exp: return "exp";
    case ExprOp::log: return "log";
    case ExprOp::bump: return "bump";
    case ExprOp::step: return "step";
    default: return "";
  }
}

struct FunctionEntry {
  std::string_view name;
  ExprOp op;
};

constexpr std::array<FunctionEntry, 6> kFunctions{{
    {"sin", ExprOp::sin},
    {"cos", ExprOp::cos},
    {"exp", ExprOp::exp},
    {"log", ExprOp::log},
    {"bump", ExprOp::bump},
    {"step", ExprOp::step},
}};

}  // namespace

Expr::Expr() : Expr(constant(0.0)) {}

Expr::Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expr Expr::constant(double value) {
  auto n = std::make_shared<Node>();
  n->op = ExprOp::constant;
  n->value = value;
  return Expr(std::move(n));
}

Expr Expr::pi() {
  auto n = std::make_shared<Node>();
  n->op = ExprOp::pi;
  return Expr(std::move(n));
}

Expr Expr::var() {
  auto n = std::make_shared<Node>();
  n->op = ExprOp::var;
  return Expr(std::move(n));
}

Expr Expr::param(std::string name) {
  auto n = std::make_shared<Node>();
  n->op = ExprOp::param;
  n->name = std::move(name);
  return Expr(std::move(n));
}

Expr Expr::unary(ExprOp op, Expr arg) {
  if (op != ExprOp::neg && !is_unary_function(op)) {
    throw Error(Errc::param, "not a unary operator");
  }
  auto n = std::make_shared<Node>();
  n->op = op;
  n->children.push_back(std::move(arg));
  return Expr(std::move(n));
}

Expr Expr::binary(ExprOp op, Expr lhs, Expr rhs) {
  if (!is_binary(op)) throw Error(Errc::param, "not a binary operator");
  auto n = std::make_shared<Node>();
  n->op = op;
  n->children.push_back(std::move(lhs));
  n->children.push_back(std::move(rhs));
  return Expr(std::move(n));
}

Expr Expr::power(Expr base, int exponent) {
  auto n = std::make_shared<Node>();
  n->op = ExprOp::pow;
  n->exponent = exponent;
  n->children.push_back(std::move(base));
  return Expr(std::move(n));
}

ExprOp Expr::op() const noexcept { return node_->op; }
double Expr::value() const noexcept { return node_->value; }
const std::string& Expr::name() const noexcept { return node_->name; }
int Expr::exponent() const noexcept { return node_->exponent; }
std::size_t Expr::arity() const noexcept { return node_->children.size(); }

const Expr& Expr::child(std::size_t i) const {
  if (i >= node_->children.size()) throw Error(Errc::param, "expression child index out of range");
  return node_->children[i];
}

Expr Expr::substitute(const Expr& replacement) const {
  switch (op()) {
    case ExprOp::var:
      return replacement;
    case ExprOp::constant:
    case ExprOp::pi:
    case ExprOp::param:
      return *this;
    case ExprOp::pow:
      return power(child(0).substitute(replacement), exponent());
    default:
      break;
  }
  if (arity() == 1) return unary(op(), child(0).substitute(replacement));
  return binary(op(), child(0).substitute(replacement), child(1).substitute(replacement));
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.op() != b.op() || a.arity() != b.arity()) return false;
  switch (a.op()) {
    case ExprOp::constant:
      return std::bit_cast<std::uint64_t>(a.value()) == std::bit_cast<std::uint64_t>(b.value());
    case ExprOp::param:
      return a.name() == b.name();
    case ExprOp::pow:
      if (a.exponent() != b.exponent()) return false;
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < a.arity(); ++i) {
    if (!(a.child(i) == b.child(i))) return false;
  }
  return true;
}

std::vector<std::string> Expr::param_names() const {
  std::set<std::string> names;
  std::vector<const Expr*> todo{this};
  while (!todo.empty()) {
    const Expr* e = todo.back();
    todo.pop_back();
    if (e->op() == ExprOp::param) names.insert(e->name());
    for (std::size_t i = 0; i < e->arity(); ++i) todo.push_back(&e->child(i));
  }
  return {names.begin(), names.end()};
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::binary(ExprOp::add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::binary(ExprOp::sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::binary(ExprOp::mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::binary(ExprOp::div, a, b); }
Expr operator-(const Expr& a) { return Expr::unary(ExprOp::neg, a); }

// ---------------------------------------------------------------------------
// Printing

namespace {

int precedence(const Expr& e) {
  switch (e.op()) {
    case ExprOp::add:
    case ExprOp::sub:
      return 1;
    case ExprOp::mul:
    case ExprOp::div:
      return 2;
    case ExprOp::neg:
      return 3;
    case ExprOp::constant:
      return std::signbit(e.value()) ? 3 : 5;
    case ExprOp::pow:
      return 4;
    default:
      return 5;
  }
}

bool is_negative_form(const Expr& e) { return precedence(e) == 3; }

std::string format_number(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw Error(Errc::param, "cannot format constant");
  return std::string(buf.data(), ptr);
}

void print(const Expr& e, std::string& out);

void print_wrapped(const Expr& e, bool wrap, std::string& out) {
  if (wrap) out.push_back('(');
  print(e, out);
  if (wrap) out.push_back(')');
}

void print(const Expr& e, std::string& out) {
  switch (e.op()) {
    case ExprOp::constant:
      if (!std::isfinite(e.value())) throw Error(Errc::param, "non-finite constant in expression");
      out += format_number(e.value());
      return;
    case ExprOp::pi:
      out += "pi";
      return;
    case ExprOp::var:
      out += "z";
      return;
    case ExprOp::param:
      out += e.name();
      return;
    case ExprOp::neg:
      out.push_back('-');
      print_wrapped(e.child(0), precedence(e.child(0)) < 3, out);
      return;
    case ExprOp::pow:
      print_wrapped(e.child(0), precedence(e.child(0)) < 4, out);
      out.push_back('^');
      out += std::to_string(e.exponent());
      return;
    case ExprOp::add:
    case ExprOp::sub:
    case ExprOp::mul:
    case ExprOp::div: {
      const int p = precedence(e);
      const Expr& lhs = e.child(0);
      const Expr& rhs = e.child(1);
      print_wrapped(lhs, precedence(lhs) < p, out);
      out.push_back(e.op() == ExprOp::add   ? '+'
                    : e.op() == ExprOp::sub ? '-'
                    : e.op() == ExprOp::mul ? '*'
                                            : '/');
      print_wrapped(rhs, precedence(rhs) <= p || is_negative_form(rhs), out);
      return;
    }
    default:
      out += function_name(e.op());
      out.push_back('(');
      print(e.child(0), out);
      out.push_back(')');
      return;
  }
}

}  // namespace

std::string Expr::to_string() const {
  std::string out;
  print(*this, out);
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Parser {
 public:
  Parser(std::string_view text, const Params& params) : text_(text), params_(params) {}

  Expr parse_all() {
    Expr e = parse_expr();
    skip_space();
    if (pos_ != text_.size()) throw SyntaxError(pos_, "operator or end of input");
    return e;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' || text_[pos_] == '\r')) {
      ++pos_;
    }
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
    if (!accept(c)) throw SyntaxError(pos_, std::string("'") + c + "'");
  }

  Expr parse_expr() {
    Expr lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = lhs + parse_term();
      } else if (accept('-')) {
        lhs = lhs - parse_term();
      } else {
        return lhs;
      }
    }
  }

  Expr parse_term() {
    Expr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = lhs * parse_unary();
      } else if (accept('/')) {
        lhs = lhs / parse_unary();
      } else {
        return lhs;
      }
    }
  }

  Expr parse_unary() {
    if (accept('-')) return -parse_unary();
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    while (accept('^')) base = Expr::power(base, parse_integer());
    return base;
  }

  int parse_integer() {
    skip_space();
    const std::size_t start = pos_;
    bool negative = false;
    if (pos_ < text_.size() && text_[pos_] == '-') {
      negative = true;
      ++pos_;
    }
    const std::size_t digits = pos_;
    while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') ++pos_;
    if (pos_ == digits) throw SyntaxError(pos_, "integer exponent");
    int value = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + digits, text_.data() + pos_, value);
    if (ec != std::errc{} || ptr != text_.data() + pos_) throw SyntaxError(start, "integer exponent in range");
    return negative ? -value : value;
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    auto digit = [&](std::size_t i) { return i < text_.size() && text_[i] >= '0' && text_[i] <= '9'; };
    while (digit(pos_)) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (digit(pos_)) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
      if (!digit(p)) throw SyntaxError(p, "exponent digits");
      while (digit(p)) ++p;
      pos_ = p;
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc{} || ptr != text_.data() + pos_ || !std::isfinite(value)) {
      throw SyntaxError(start, "finite number");
    }
    return Expr::constant(value);
  }

  Expr parse_primary() {
    skip_space();
    if (pos_ >= text_.size()) throw SyntaxError(pos_, "expression");
    const char c = text_[pos_];
    if ((c >= '0' && c <= '9') || c == '.') return parse_number();
    if (c == '(') {
      ++pos_;
      Expr e = parse_expr();
      expect(')');
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      const std::string_view ident = text_.substr(start, pos_ - start);
      if (ident == "z") return Expr::var();
      if (ident == "pi") return Expr::pi();
      if (ident == "pow") {
        expect('(');
        Expr base = parse_expr();
        expect(',');
        const int n = parse_integer();
        expect(')');
        return Expr::power(base, n);
      }
      for (const auto& f : kFunctions) {
        if (ident == f.name) {
          expect('(');
          Expr arg = parse_expr();
          expect(')');
          return Expr::unary(f.op, arg);
        }
      }
      if (params_.find(ident) != params_.end()) return Expr::param(std::string(ident));
      std::ostringstream os;
      os << "'" << ident << "' at position " << start;
      throw Error(Errc::unknown_identifier, os.str());
    }
    throw SyntaxError(pos_, "expression");
  }

  std::string_view text_;
  const Params& params_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text, const Params& known_params) {
  return Parser(text, known_params).parse_all();
}

// ---------------------------------------------------------------------------
// Compiled evaluation

namespace {

double int_power(double x, int n) {
  if (n < 0) {
    const double p = int_power(x, -n);
    if (p == 0.0) throw Error(Errc::singularity, "negative power of zero");
    return 1.0 / p;
  }
  double result = 1.0;
  double base = x;
  unsigned e = static_cast<unsigned>(n);
  while (e != 0) {
    if (e & 1u) result *= base;
    e >>= 1u;
    if (e != 0) base *= base;
  }
  return result;
}

}  // namespace

CompiledExpr::CompiledExpr(const Expr& expr, const Params& params) {
  std::size_t depth = 0;
  auto emit = [&](auto&& self, const Expr& e) -> void {
    for (std::size_t i = 0; i < e.arity(); ++i) self(self, e.child(i));
    Instr in{e.op()};
    switch (e.op()) {
      case ExprOp::constant:
        in.value = e.value();
        break;
      case ExprOp::pi:
        in.op = ExprOp::constant;
        in.value = 3.141592653589793;
        break;
      case ExprOp::param: {
        auto it = params.find(e.name());
        if (it == params.end()) {
          throw Error(Errc::unknown_identifier, "parameter '" + e.name() + "' has no value");
        }
        in.op = ExprOp::constant;
        in.value = it->second;
        break;
      }
      case ExprOp::pow:
        in.exponent = e.exponent();
        break;
      default:
        break;
    }
    if (e.arity() == 0) {
      ++depth;
    } else if (e.arity() == 2) {
      --depth;
    }
    max_depth_ = std::max(max_depth_, depth);
    code_.push_back(in);
  };
  emit(emit, expr);
}

double CompiledExpr::value(double z) const {
  thread_local std::vector<double> stack;
  stack.clear();
  for (const Instr& in : code_) {
    switch (in.op) {
      case ExprOp::constant:
        stack.push_back(in.value);
        break;
      case ExprOp::var:
        stack.push_back(z);
        break;
      case ExprOp::neg:
        stack.back() = -stack.back();
        break;
      case ExprOp::sin:
        stack.back() = std::sin(stack.back());
        break;
      case ExprOp::cos:
        stack.back() = std::cos(stack.back());
        break;
      case ExprOp::exp:
        stack.back() = std::exp(stack.back());
        break;
      case ExprOp::log:
        if (!(stack.back() > 0.0)) throw Error(Errc::singularity, "log of nonpositive value");
        stack.back() = std::log(stack.back());
        break;
      case ExprOp::bump:
        stack.back() = bump_value(stack.back());
        break;
      case ExprOp::step:
        stack.back() = smooth_step_value(stack.back());
        break;
      case ExprOp::pow:
        stack.back() = int_power(stack.back(), in.exponent);
        break;
      default: {
        const double rhs = stack.back();
        stack.pop_back();
        double& lhs = stack.back();
        switch (in.op) {
          case ExprOp::add: lhs += rhs; break;
          case ExprOp::sub: lhs -= rhs; break;
          case ExprOp::mul: lhs *= rhs; break;
          case ExprOp::div:
            if (rhs == 0.0) throw Error(Errc::singularity, "division by zero");
            lhs /= rhs;
            break;
          default:
            throw Error(Errc::param, "corrupt expression code");
        }
      }
    }
  }
  return stack.back();
}

Jet CompiledExpr::jet(const Jet& z) const {
  thread_local std::vector<Jet> stack;
  stack.clear();
  stack.reserve(max_depth_);
  for (const Instr& in : code_) {
    switch (in.op) {
      case ExprOp::constant:
        stack.push_back(Jet::constant(z.base_point(), z.order(), in.value));
        break;
      case ExprOp::var:
        stack.push_back(z);
        break;
      case ExprOp::neg:
        stack.back() = -stack.back();
        break;
      case ExprOp::sin:
        stack.back() = sin(stack.back());
        break;
      case ExprOp::cos:
        stack.back() = cos(stack.back());
        break;
      case ExprOp::exp:
        stack.back() = exp(stack.back());
        break;
      case ExprOp::log:
        stack.back() = log(stack.back());
        break;
      case ExprOp::bump:
        stack.back() = bump(stack.back());
        break;
      case ExprOp::step:
        stack.back() = smooth_step(stack.back());
        break;
      case ExprOp::pow:
        stack.back() = pow(stack.back(), in.exponent);
        break;
      default: {
        const Jet rhs = stack.back();
        stack.pop_back();
        Jet& lhs = stack.back();
        switch (in.op) {
          case ExprOp::add: lhs += rhs; break;
          case ExprOp::sub: lhs -= rhs; break;
          case ExprOp::mul: lhs = lhs * rhs; break;
          case ExprOp::div: lhs = lhs / rhs; break;
          default:
            throw Error(Errc::param, "corrupt expression code");
        }
      }
    }
  }
  return stack.back();
}

}  // namespace orbitforge
