#include <charconv>
#include <string>

#include "evolve/expr/expr.hpp"

namespace evolve::expr {

namespace {

// Precedence levels of the grammar: sum < product < power < atom.
constexpr int kSum = 1;
constexpr int kProduct = 2;
constexpr int kPower = 3;
constexpr int kAtom = 4;

int precedence(const Node& node) {
  switch (node.type) {
    case NodeType::add:
    case NodeType::subtract:
      return kSum;
    case NodeType::multiply:
    case NodeType::divide:
      return kProduct;
    case NodeType::power:
      return kPower;
    default:
      return kAtom;
  }
}

std::string format_number(double value) {
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

void print(const Node& node, int context, std::string& out) {
  const bool wrap = precedence(node) < context;
  if (wrap) out += '(';
  switch (node.type) {
    case NodeType::number:
      out += format_number(node.number);
      break;
    case NodeType::time:
    case NodeType::frame:
    case NodeType::constant:
      out += node.name;
      break;
    case NodeType::negate:
      out += '-';
      print(*node.children[0], kAtom, out);
      break;
    case NodeType::add:
    case NodeType::subtract:
      print(*node.children[0], kSum, out);
      out += node.type == NodeType::add ? " + " : " - ";
      print(*node.children[1], kProduct, out);
      break;
    case NodeType::multiply:
    case NodeType::divide:
      print(*node.children[0], kProduct, out);
      out += node.type == NodeType::multiply ? " * " : " / ";
      print(*node.children[1], kPower, out);
      break;
    case NodeType::power:
      print(*node.children[0], kAtom, out);
      out += '^';
      out += std::to_string(node.exponent);
      break;
    case NodeType::call:
      out += to_string(node.function);
      out += '(';
      for (std::size_t i = 0; i < node.children.size(); ++i) {
        if (i > 0) out += ", ";
        print(*node.children[i], kSum, out);
      }
      out += ')';
      break;
  }
  if (wrap) out += ')';
}

}  // namespace

std::string pretty_print(const Node& node) {
  std::string out;
  print(node, kSum, out);
  return out;
}

std::string pretty_print(const Expression& expression) { return pretty_print(expression.root()); }

}  // namespace evolve::expr
