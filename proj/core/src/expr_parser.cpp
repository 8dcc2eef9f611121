#include <array>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <optional>
#include <utility>

#include "evolve/expr/expr.hpp"

namespace evolve::expr {

namespace {

constexpr int kMaxExponent = 64;

struct FunctionInfo {
  std::string_view name;
  Function function;
  int arity;
};

constexpr std::array<FunctionInfo, 10> kFunctions{{
    {"det", Function::det, 1},
    {"tr", Function::tr, 1},
    {"transpose", Function::transpose, 1},
    {"inv", Function::inv, 1},
    {"dot", Function::dot, 2},
    {"exp", Function::exp, 1},
    {"log", Function::log, 1},
    {"sin", Function::sin, 1},
    {"cos", Function::cos, 1},
    {"sqrt", Function::sqrt, 1},
}};

std::optional<FunctionInfo> lookup_function(std::string_view name) {
  for (const auto& info : kFunctions) {
    if (info.name == name) return info;
  }
  return std::nullopt;
}

enum class TokenType { number, identifier, plus, minus, star, slash, caret, lparen, rparen, comma, end };

struct Token {
  TokenType type = TokenType::end;
  std::string_view text;
  SourceSpan span;
};

class Lexer {
 public:
  explicit Lexer(std::string_view source) : source_(source) {}

  Token next() {
    skip_whitespace();
    Token token;
    token.span = here();
    if (pos_ >= source_.size()) {
      token.type = TokenType::end;
      return token;
    }
    const char c = source_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && pos_ + 1 < source_.size() &&
                                                        std::isdigit(static_cast<unsigned char>(source_[pos_ + 1])))) {
      return lex_number(token);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < source_.size() &&
             (std::isalnum(static_cast<unsigned char>(source_[pos_])) || source_[pos_] == '_')) {
        advance();
      }
      token.type = TokenType::identifier;
      token.text = source_.substr(start, pos_ - start);
      token.span.length = pos_ - start;
      return token;
    }
    switch (c) {
      case '+': token.type = TokenType::plus; break;
      case '-': token.type = TokenType::minus; break;
      case '*': token.type = TokenType::star; break;
      case '/': token.type = TokenType::slash; break;
      case '^': token.type = TokenType::caret; break;
      case '(': token.type = TokenType::lparen; break;
      case ')': token.type = TokenType::rparen; break;
      case ',': token.type = TokenType::comma; break;
      default:
        token.span.length = 1;
        throw ExprError(ErrorCode::syntax, std::string("unexpected character '") + c + "'", token.span);
    }
    token.text = source_.substr(pos_, 1);
    token.span.length = 1;
    advance();
    return token;
  }

 private:
  SourceSpan here() const { return SourceSpan{pos_, 0, line_, column_}; }

  void advance() {
    if (source_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_whitespace() {
    while (pos_ < source_.size() && std::isspace(static_cast<unsigned char>(source_[pos_]))) advance();
  }

  bool digit_at(std::size_t i) const {
    return i < source_.size() && std::isdigit(static_cast<unsigned char>(source_[i]));
  }

  Token lex_number(Token token) {
    const std::size_t start = pos_;
    while (digit_at(pos_)) advance();
    if (pos_ < source_.size() && source_[pos_] == '.') {
      advance();
      while (digit_at(pos_)) advance();
    }
    if (pos_ < source_.size() && (source_[pos_] == 'e' || source_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < source_.size() && (source_[look] == '+' || source_[look] == '-')) ++look;
      if (digit_at(look)) {
        while (pos_ < look) advance();
        while (digit_at(pos_)) advance();
      }
    }
    token.type = TokenType::number;
    token.text = source_.substr(start, pos_ - start);
    token.span.length = pos_ - start;
    return token;
  }

  std::string_view source_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

bool is_integer_literal(std::string_view text) {
  for (char c : text) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return !text.empty();
}

std::shared_ptr<Node> make_node(NodeType type, Kind kind, SourceSpan span) {
  auto node = std::make_shared<Node>();
  node->type = type;
  node->kind = kind;
  node->span = span;
  return node;
}

std::string mismatch(std::string_view what, Kind a, Kind b) {
  return std::string(what) + " of " + to_string(a) + " and " + to_string(b) + " is not defined";
}

class Parser {
 public:
  Parser(std::string_view source, const Declarations& declarations)
      : lexer_(source), declarations_(declarations) {
    current_ = lexer_.next();
  }

  NodePtr parse_all() {
    NodePtr root = parse_expr();
    if (current_.type != TokenType::end) {
      throw ExprError(ErrorCode::syntax, "unexpected '" + std::string(current_.text) + "'", span_of(current_));
    }
    return root;
  }

 private:
  static SourceSpan span_of(const Token& token) {
    SourceSpan s = token.span;
    if (s.length == 0) s.length = 1;
    return s;
  }

  Token consume() {
    Token t = current_;
    current_ = lexer_.next();
    return t;
  }

  Token expect(TokenType type, const char* what) {
    if (current_.type != type) {
      const std::string found = current_.type == TokenType::end ? "end of input" : "'" + std::string(current_.text) + "'";
      throw ExprError(ErrorCode::syntax, std::string("expected ") + what + ", found " + found, span_of(current_));
    }
    return consume();
  }

  NodePtr parse_expr() {
    NodePtr left = parse_term();
    while (current_.type == TokenType::plus || current_.type == TokenType::minus) {
      const Token op = consume();
      NodePtr right = parse_term();
      if (left->kind != right->kind) {
        throw ExprError(ErrorCode::dimension_mismatch,
                        mismatch(op.type == TokenType::plus ? "sum" : "difference", left->kind, right->kind),
                        op.span);
      }
      auto node = make_node(op.type == TokenType::plus ? NodeType::add : NodeType::subtract, left->kind, op.span);
      node->children = {std::move(left), std::move(right)};
      left = std::move(node);
    }
    return left;
  }

  NodePtr parse_term() {
    NodePtr left = parse_factor();
    while (current_.type == TokenType::star || current_.type == TokenType::slash) {
      const Token op = consume();
      NodePtr right = parse_factor();
      Kind kind;
      if (op.type == TokenType::star) {
        kind = product_kind(left->kind, right->kind, op.span);
      } else {
        if (right->kind != Kind::scalar) {
          throw ExprError(ErrorCode::dimension_mismatch, mismatch("quotient", left->kind, right->kind), op.span);
        }
        kind = left->kind;
      }
      auto node = make_node(op.type == TokenType::star ? NodeType::multiply : NodeType::divide, kind, op.span);
      node->children = {std::move(left), std::move(right)};
      left = std::move(node);
    }
    return left;
  }

  static Kind product_kind(Kind a, Kind b, const SourceSpan& span) {
    if (a == Kind::scalar) return b;
    if (b == Kind::scalar) return a;
    if (a == Kind::matrix && b == Kind::matrix) return Kind::matrix;
    if (a == Kind::matrix && b == Kind::vector) return Kind::vector;
    throw ExprError(ErrorCode::dimension_mismatch, mismatch("product", a, b), span);
  }

  NodePtr parse_factor() {
    NodePtr base = parse_atom();
    if (current_.type != TokenType::caret) return base;
    const Token op = consume();
    bool negative = false;
    if (current_.type == TokenType::minus) {
      consume();
      negative = true;
    }
    const Token exponent = expect(TokenType::number, "integer exponent");
    if (!is_integer_literal(exponent.text)) {
      throw ExprError(ErrorCode::syntax, "exponent must be an integer", span_of(exponent));
    }
    int value = 0;
    const auto [ptr, ec] = std::from_chars(exponent.text.data(), exponent.text.data() + exponent.text.size(), value);
    if (ec != std::errc() || value > kMaxExponent) {
      throw ExprError(ErrorCode::syntax, "exponent out of range", span_of(exponent));
    }
    if (base->kind == Kind::vector) {
      throw ExprError(ErrorCode::dimension_mismatch, "power of a vector is not defined", op.span);
    }
    auto node = make_node(NodeType::power, base->kind, op.span);
    node->exponent = negative ? -value : value;
    node->children = {std::move(base)};
    return node;
  }

  NodePtr parse_atom() {
    switch (current_.type) {
      case TokenType::number: {
        const Token tok = consume();
        auto node = make_node(NodeType::number, Kind::scalar, tok.span);
        node->number = std::strtod(std::string(tok.text).c_str(), nullptr);
        return node;
      }
      case TokenType::minus: {
        const Token op = consume();
        NodePtr operand = parse_atom();
        auto node = make_node(NodeType::negate, operand->kind, op.span);
        node->children = {std::move(operand)};
        return node;
      }
      case TokenType::lparen: {
        consume();
        NodePtr inner = parse_expr();
        expect(TokenType::rparen, "')'");
        return inner;
      }
      case TokenType::identifier:
        return parse_identifier();
      default: {
        const std::string found =
            current_.type == TokenType::end ? "end of input" : "'" + std::string(current_.text) + "'";
        throw ExprError(ErrorCode::syntax, "expected an operand, found " + found, span_of(current_));
      }
    }
  }

  NodePtr parse_identifier() {
    const Token ident = consume();
    if (auto fn = lookup_function(ident.text)) {
      if (current_.type != TokenType::lparen) {
        throw ExprError(ErrorCode::syntax, "function '" + std::string(ident.text) + "' requires arguments",
                        ident.span);
      }
      consume();
      std::vector<NodePtr> args;
      args.push_back(parse_expr());
      while (current_.type == TokenType::comma) {
        consume();
        args.push_back(parse_expr());
      }
      expect(TokenType::rparen, "')'");
      if (static_cast<int>(args.size()) != fn->arity) {
        throw ExprError(ErrorCode::syntax,
                        "function '" + std::string(ident.text) + "' takes " + std::to_string(fn->arity) +
                            " argument(s), got " + std::to_string(args.size()),
                        ident.span);
      }
      auto node = make_node(NodeType::call, call_kind(*fn, args, ident.span), ident.span);
      node->function = fn->function;
      node->name = std::string(ident.text);
      node->children = std::move(args);
      return node;
    }
    if (current_.type == TokenType::lparen) {
      throw ExprError(ErrorCode::unknown_identifier, "unknown function '" + std::string(ident.text) + "'",
                      ident.span);
    }
    if (ident.text == "t") {
      auto node = make_node(NodeType::time, Kind::scalar, ident.span);
      node->name = "t";
      return node;
    }
    if (ident.text == "F") {
      auto node = make_node(NodeType::frame, Kind::matrix, ident.span);
      node->name = "F";
      return node;
    }
    const auto it = declarations_.find(ident.text);
    if (it == declarations_.end()) {
      throw ExprError(ErrorCode::unknown_identifier, "unknown identifier '" + std::string(ident.text) + "'",
                      ident.span);
    }
    auto node = make_node(NodeType::constant, it->second, ident.span);
    node->name = std::string(ident.text);
    return node;
  }

  static Kind call_kind(const FunctionInfo& fn, const std::vector<NodePtr>& args, const SourceSpan& span) {
    const auto require = [&](const NodePtr& arg, Kind kind) {
      if (arg->kind != kind) {
        throw ExprError(ErrorCode::dimension_mismatch,
                        std::string(fn.name) + " expects a " + to_string(kind) + " argument, got " +
                            to_string(arg->kind),
                        span);
      }
    };
    switch (fn.function) {
      case Function::det:
      case Function::tr:
        require(args[0], Kind::matrix);
        return Kind::scalar;
      case Function::transpose:
      case Function::inv:
        require(args[0], Kind::matrix);
        return Kind::matrix;
      case Function::dot:
        require(args[0], Kind::vector);
        require(args[1], Kind::vector);
        return Kind::scalar;
      case Function::exp:
      case Function::log:
      case Function::sin:
      case Function::cos:
      case Function::sqrt:
        require(args[0], Kind::scalar);
        return Kind::scalar;
    }
    return Kind::scalar;
  }

  Lexer lexer_;
  const Declarations& declarations_;
  Token current_;
};

bool node_uses_frame(const Node& node) {
  if (node.type == NodeType::frame) return true;
  for (const auto& child : node.children) {
    if (node_uses_frame(*child)) return true;
  }
  return false;
}

}  // namespace

const char* to_string(Kind kind) noexcept {
  switch (kind) {
    case Kind::scalar: return "scalar";
    case Kind::vector: return "vector";
    case Kind::matrix: return "matrix";
  }
  return "?";
}

const char* to_string(Function fn) noexcept {
  for (const auto& info : kFunctions) {
    if (info.function == fn) return info.name.data();
  }
  return "?";
}

bool is_reserved_identifier(std::string_view name) {
  return name == "t" || name == "F" || lookup_function(name).has_value();
}

Kind kind_of(const ConstantValue& value) {
  if (std::holds_alternative<double>(value)) return Kind::scalar;
  if (std::holds_alternative<Vec3>(value)) return Kind::vector;
  return Kind::matrix;
}

Declarations declarations_for(const Constants& constants) {
  Declarations decls;
  for (const auto& [name, value] : constants) decls.emplace(name, kind_of(value));
  return decls;
}

bool structurally_equal(const Node& a, const Node& b) {
  if (a.type != b.type || a.kind != b.kind || a.children.size() != b.children.size()) return false;
  switch (a.type) {
    case NodeType::number:
      if (a.number != b.number) return false;
      break;
    case NodeType::power:
      if (a.exponent != b.exponent) return false;
      break;
    case NodeType::call:
      if (a.function != b.function) return false;
      break;
    case NodeType::constant:
      if (a.name != b.name) return false;
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (!structurally_equal(*a.children[i], *b.children[i])) return false;
  }
  return true;
}

bool Expression::uses_frame() const { return root_ && node_uses_frame(*root_); }

Expression parse(std::string_view source, const Declarations& declarations) {
  Parser parser(source, declarations);
  return Expression(parser.parse_all(), std::string(source));
}

}  // namespace evolve::expr
