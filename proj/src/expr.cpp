#include "linmba/expr.hpp"

#include "linmba/errors.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

namespace linmba {

Width::Width(unsigned bits) : bits_(bits) {
  if (bits < 1 || bits > 64)
    throw std::invalid_argument("width must be between 1 and 64 bits, got " + std::to_string(bits));
}

bool is_unary(Op op) noexcept { return op == Op::BitNot || op == Op::Neg; }

bool is_binary(Op op) noexcept {
  switch (op) {
  case Op::And:
  case Op::Xor:
  case Op::Or:
  case Op::Add:
  case Op::Sub:
  case Op::Mul:
    return true;
  default:
    return false;
  }
}

bool is_bitwise(Op op) noexcept {
  return op == Op::BitNot || op == Op::And || op == Op::Xor || op == Op::Or;
}

const char* symbol(Op op) noexcept {
  switch (op) {
  case Op::BitNot: return "~";
  case Op::Neg: return "-";
  case Op::And: return "&";
  case Op::Xor: return "^";
  case Op::Or: return "|";
  case Op::Add: return "+";
  case Op::Sub: return "-";
  case Op::Mul: return "*";
  default: return "";
  }
}

namespace {

const std::shared_ptr<const Node>& zero_node() {
  static const auto node = std::make_shared<const Node>();
  return node;
}

} // namespace

Expr::Expr() : node_(zero_node()) {}

Expr Expr::constant(std::uint64_t value) {
  auto n = std::make_shared<Node>();
  n->op = Op::Const;
  n->value = value;
  return Expr(std::move(n));
}

Expr Expr::var(std::string name) {
  auto n = std::make_shared<Node>();
  n->op = Op::Var;
  n->name = std::move(name);
  return Expr(std::move(n));
}

Expr Expr::unary(Op op, Expr child) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->size = 1 + child.node_count();
  n->lhs = std::move(child);
  return Expr(std::move(n));
}

Expr Expr::binary(Op op, Expr lhs, Expr rhs) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->size = 1 + lhs.node_count() + rhs.node_count();
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return Expr(std::move(n));
}

Op Expr::op() const noexcept { return node_->op; }
std::uint64_t Expr::value() const noexcept { return node_->value; }
const std::string& Expr::name() const noexcept { return node_->name; }
const Expr& Expr::child() const noexcept { return node_->lhs; }
const Expr& Expr::lhs() const noexcept { return node_->lhs; }
const Expr& Expr::rhs() const noexcept { return node_->rhs; }
std::size_t Expr::node_count() const noexcept { return node_->size; }

bool operator==(const Expr& a, const Expr& b) noexcept {
  if (a.node_ == b.node_) return true;
  if (a.op() != b.op() || a.node_count() != b.node_count()) return false;
  switch (a.op()) {
  case Op::Const: return a.value() == b.value();
  case Op::Var: return a.name() == b.name();
  case Op::BitNot:
  case Op::Neg: return a.child() == b.child();
  default: return a.lhs() == b.lhs() && a.rhs() == b.rhs();
  }
}

bool is_valid_identifier(std::string_view name) noexcept {
  if (name.empty()) return false;
  auto head = static_cast<unsigned char>(name[0]);
  if (!(std::isalpha(head) || head == '_')) return false;
  return std::all_of(name.begin() + 1, name.end(), [](char c) {
    auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || u == '_';
  });
}

// ---------------------------------------------------------------------------
// Parser

namespace {

enum class Tok { Number, Ident, Op, LParen, RParen, End };

struct Token {
  Tok kind;
  std::size_t pos;
  std::string_view text;
};

class Lexer {
public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < src_.size()) {
      auto c = static_cast<unsigned char>(src_[i]);
      if (std::isspace(c)) {
        ++i;
        continue;
      }
      std::size_t start = i;
      if (std::isdigit(c)) {
        if (c == '0' && i + 1 < src_.size() && (src_[i + 1] == 'x' || src_[i + 1] == 'X')) {
          i += 2;
          while (i < src_.size() && std::isxdigit(static_cast<unsigned char>(src_[i]))) ++i;
          if (i == start + 2) throw SyntaxError(start, "hex literal without digits");
        } else {
          while (i < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i]))) ++i;
        }
        if (i < src_.size() && (std::isalpha(static_cast<unsigned char>(src_[i])) || src_[i] == '_'))
          throw SyntaxError(i, "unexpected character after number");
        out.push_back({Tok::Number, start, src_.substr(start, i - start)});
        continue;
      }
      if (std::isalpha(c) || c == '_') {
        while (i < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[i])) || src_[i] == '_'))
          ++i;
        out.push_back({Tok::Ident, start, src_.substr(start, i - start)});
        continue;
      }
      switch (c) {
      case '~':
      case '-':
      case '+':
      case '*':
      case '&':
      case '^':
      case '|':
        out.push_back({Tok::Op, start, src_.substr(start, 1)});
        break;
      case '(':
        out.push_back({Tok::LParen, start, src_.substr(start, 1)});
        break;
      case ')':
        out.push_back({Tok::RParen, start, src_.substr(start, 1)});
        break;
      default:
        throw SyntaxError(start, std::string("unexpected character '") + src_[i] + "'");
      }
      ++i;
    }
    out.push_back({Tok::End, src_.size(), {}});
    return out;
  }

private:
  std::string_view src_;
};

// Wrapping accumulation is exact modulo 2^64, hence modulo any 2^n.
std::uint64_t literal_value(std::string_view text) {
  std::uint64_t v = 0;
  if (text.size() > 1 && (text[1] == 'x' || text[1] == 'X')) {
    for (char c : text.substr(2)) {
      unsigned d = std::isdigit(static_cast<unsigned char>(c))
                       ? unsigned(c - '0')
                       : unsigned(std::tolower(static_cast<unsigned char>(c)) - 'a' + 10);
      v = v * 16 + d;
    }
  } else {
    for (char c : text) v = v * 10 + unsigned(c - '0');
  }
  return v;
}

class Parser {
public:
  Parser(std::vector<Token> toks, Width width) : toks_(std::move(toks)), width_(width) {}

  Expr parse_all() {
    if (peek().kind == Tok::End) throw SyntaxError(peek().pos, "empty expression");
    Expr e = parse_or();
    if (peek().kind != Tok::End) {
      if (peek().kind == Tok::RParen) throw SyntaxError(peek().pos, "unbalanced ')'");
      throw SyntaxError(peek().pos, "unexpected '" + std::string(peek().text) + "'");
    }
    return e;
  }

private:
  const Token& peek() const { return toks_[pos_]; }
  bool at_op(char c) const {
    return peek().kind == Tok::Op && peek().text[0] == c;
  }

  Expr parse_or() {
    Expr e = parse_xor();
    while (at_op('|')) {
      ++pos_;
      e = Expr::binary(Op::Or, std::move(e), parse_xor());
    }
    return e;
  }
  Expr parse_xor() {
    Expr e = parse_and();
    while (at_op('^')) {
      ++pos_;
      e = Expr::binary(Op::Xor, std::move(e), parse_and());
    }
    return e;
  }
  Expr parse_and() {
    Expr e = parse_additive();
    while (at_op('&')) {
      ++pos_;
      e = Expr::binary(Op::And, std::move(e), parse_additive());
    }
    return e;
  }
  Expr parse_additive() {
    Expr e = parse_mul();
    while (at_op('+') || at_op('-')) {
      Op op = at_op('+') ? Op::Add : Op::Sub;
      ++pos_;
      e = Expr::binary(op, std::move(e), parse_mul());
    }
    return e;
  }
  Expr parse_mul() {
    Expr e = parse_unary();
    while (at_op('*')) {
      ++pos_;
      e = Expr::binary(Op::Mul, std::move(e), parse_unary());
    }
    return e;
  }
  Expr parse_unary() {
    if (at_op('~')) {
      ++pos_;
      return Expr::unary(Op::BitNot, parse_unary());
    }
    if (at_op('-')) {
      ++pos_;
      if (peek().kind == Tok::Number) {
        auto v = literal_value(peek().text);
        ++pos_;
        return Expr::constant(width_.neg(width_.reduce(v)));
      }
      return Expr::unary(Op::Neg, parse_unary());
    }
    return parse_primary();
  }
  Expr parse_primary() {
    const Token& t = peek();
    switch (t.kind) {
    case Tok::Number:
      ++pos_;
      return Expr::constant(width_.reduce(literal_value(t.text)));
    case Tok::Ident:
      ++pos_;
      return Expr::var(std::string(t.text));
    case Tok::LParen: {
      ++pos_;
      if (peek().kind == Tok::RParen) throw SyntaxError(peek().pos, "empty parentheses");
      Expr e = parse_or();
      if (peek().kind != Tok::RParen) throw SyntaxError(peek().pos, "expected ')'");
      ++pos_;
      return e;
    }
    case Tok::End:
      throw SyntaxError(t.pos, "unexpected end of input");
    default:
      throw SyntaxError(t.pos, "unexpected '" + std::string(t.text) + "'");
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  Width width_;
};

} // namespace

Expr parse(std::string_view text, Width width) {
  return Parser(Lexer(text).run(), width).parse_all();
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

constexpr int kPrecOr = 1, kPrecXor = 2, kPrecAnd = 3, kPrecAdd = 4, kPrecMul = 5,
              kPrecUnary = 6, kPrecAtom = 7;

int precedence(const Expr& e, Width w) {
  switch (e.op()) {
  case Op::Or: return kPrecOr;
  case Op::Xor: return kPrecXor;
  case Op::And: return kPrecAnd;
  case Op::Add:
  case Op::Sub: return kPrecAdd;
  case Op::Mul: return kPrecMul;
  case Op::BitNot:
  case Op::Neg: return kPrecUnary;
  case Op::Const: return w.is_negative(e.value()) ? kPrecUnary : kPrecAtom;
  case Op::Var: return kPrecAtom;
  }
  return kPrecAtom;
}

void render_into(std::string& out, const Expr& e, Width w);

void render_wrapped(std::string& out, const Expr& e, Width w, bool parens) {
  if (parens) out += '(';
  render_into(out, e, w);
  if (parens) out += ')';
}

void render_into(std::string& out, const Expr& e, Width w) {
  switch (e.op()) {
  case Op::Const:
    if (w.is_negative(e.value())) {
      out += '-';
      out += std::to_string(w.neg(e.value()));
    } else {
      out += std::to_string(e.value());
    }
    return;
  case Op::Var:
    out += e.name();
    return;
  case Op::BitNot:
  case Op::Neg: {
    out += symbol(e.op());
    const Expr& c = e.child();
    // "-5" would reparse as a folded constant, so a negated literal keeps parens.
    bool parens = precedence(c, w) < kPrecUnary ||
                  (e.op() == Op::Neg && c.is_const() && !w.is_negative(c.value()));
    render_wrapped(out, c, w, parens);
    return;
  }
  default: {
    int p = precedence(e, w);
    render_wrapped(out, e.lhs(), w, precedence(e.lhs(), w) < p);
    out += symbol(e.op());
    render_wrapped(out, e.rhs(), w, precedence(e.rhs(), w) <= p);
    return;
  }
  }
}

} // namespace

std::string render(const Expr& e, Width width) {
  std::string out;
  render_into(out, e, width);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

void collect_vars(const Expr& e, std::vector<std::string>& out,
                  std::unordered_set<std::string>& seen) {
  switch (e.op()) {
  case Op::Const: return;
  case Op::Var:
    if (seen.insert(e.name()).second) out.push_back(e.name());
    return;
  case Op::BitNot:
  case Op::Neg: collect_vars(e.child(), out, seen); return;
  default:
    collect_vars(e.lhs(), out, seen);
    collect_vars(e.rhs(), out, seen);
  }
}

} // namespace

std::vector<std::string> variables(const Expr& e) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  collect_vars(e, out, seen);
  return out;
}

Expr substitute(const Expr& e, const std::vector<std::pair<std::string, std::string>>& rename) {
  switch (e.op()) {
  case Op::Const: return e;
  case Op::Var:
    for (const auto& [from, to] : rename)
      if (from == e.name()) return Expr::var(to);
    return e;
  case Op::BitNot:
  case Op::Neg: return Expr::unary(e.op(), substitute(e.child(), rename));
  default:
    return Expr::binary(e.op(), substitute(e.lhs(), rename), substitute(e.rhs(), rename));
  }
}

Expr build_sum(const std::vector<Summand>& summands, Width width) {
  std::optional<Expr> acc;
  for (const auto& s : summands) {
    std::uint64_t c = width.reduce(s.coefficient);
    if (c == 0) continue;
    bool negative = width.is_negative(c);
    std::uint64_t mag = negative ? width.neg(c) : c;
    if (!acc) {
      if (!s.bitwise) acc = Expr::constant(c);
      else if (c == 1) acc = *s.bitwise;
      else if (c == width.mask()) acc = -*s.bitwise;
      else acc = Expr::constant(c) * *s.bitwise;
      continue;
    }
    Expr term = !s.bitwise ? Expr::constant(mag)
                : mag == 1 ? *s.bitwise
                           : Expr::constant(mag) * *s.bitwise;
    acc = negative ? *acc - term : *acc + term;
  }
  return acc ? *acc : Expr::constant(0);
}

std::size_t term_count(const Expr& e) {
  if (e.op() == Op::Add || e.op() == Op::Sub) return term_count(e.lhs()) + term_count(e.rhs());
  return 1;
}

} // namespace linmba
