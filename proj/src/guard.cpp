#include "fm/guard.hpp"

#include <utility>

namespace fm {

struct Guard::Node {
  enum class Type { And, Or, Not, Cmp };

  Type type = Type::Cmp;
  Cmp cmp = Cmp::Eq;
  Operand lhs;
  Operand rhs;
  std::shared_ptr<const Node> a;
  std::shared_ptr<const Node> b;
};

namespace {

using Node = Guard::Node;

long long operand_value(const Guard::Operand& op, const Guard::Counters& counters) {
  if (!op.is_counter) return op.value;
  auto it = counters.find(op.counter);
  return it == counters.end() ? 0 : it->second;
}

bool eval_node(const Node& n, const Guard::Counters& counters) {
  switch (n.type) {
    case Node::Type::And:
      return eval_node(*n.a, counters) && eval_node(*n.b, counters);
    case Node::Type::Or:
      return eval_node(*n.a, counters) || eval_node(*n.b, counters);
    case Node::Type::Not:
      return !eval_node(*n.a, counters);
    case Node::Type::Cmp: {
      long long l = operand_value(n.lhs, counters);
      long long r = operand_value(n.rhs, counters);
      switch (n.cmp) {
        case Guard::Cmp::Eq: return l == r;
        case Guard::Cmp::Ne: return l != r;
        case Guard::Cmp::Lt: return l < r;
        case Guard::Cmp::Le: return l <= r;
        case Guard::Cmp::Gt: return l > r;
        case Guard::Cmp::Ge: return l >= r;
      }
      return false;
    }
  }
  return false;
}

std::string operand_text(const Guard::Operand& op) {
  return op.is_counter ? op.counter : std::to_string(op.value);
}

// Precedence: or < and < not < comparison. Parentheses appear only where a
// child binds looser than its context, so the text re-parses to the same tree.
int precedence(const Node& n) {
  switch (n.type) {
    case Node::Type::Or: return 0;
    case Node::Type::And: return 1;
    case Node::Type::Not: return 2;
    case Node::Type::Cmp: return 3;
  }
  return 3;
}

std::string render(const Node& n, int parent_prec) {
  std::string out;
  switch (n.type) {
    case Node::Type::Or:
      out = render(*n.a, 0) + " or " + render(*n.b, 0);
      break;
    case Node::Type::And:
      out = render(*n.a, 1) + " and " + render(*n.b, 1);
      break;
    case Node::Type::Not:
      out = "not " + render(*n.a, 2);
      break;
    case Node::Type::Cmp:
      out = operand_text(n.lhs) + " " + to_string(n.cmp) + " " + operand_text(n.rhs);
      break;
  }
  if (precedence(n) < parent_prec) return "(" + out + ")";
  return out;
}

bool node_equal(const Node& x, const Node& y) {
  if (x.type != y.type) return false;
  switch (x.type) {
    case Node::Type::And:
    case Node::Type::Or:
      return node_equal(*x.a, *y.a) && node_equal(*x.b, *y.b);
    case Node::Type::Not:
      return node_equal(*x.a, *y.a);
    case Node::Type::Cmp:
      return x.cmp == y.cmp && x.lhs == y.lhs && x.rhs == y.rhs;
  }
  return false;
}

}  // namespace

Guard::Operand Guard::counter_ref(std::string name) {
  Operand op;
  op.is_counter = true;
  op.counter = std::move(name);
  return op;
}

Guard::Operand Guard::literal(long long value) {
  Operand op;
  op.value = value;
  return op;
}

Guard Guard::compare(Operand lhs, Cmp op, Operand rhs) {
  auto n = std::make_shared<Node>();
  n->type = Node::Type::Cmp;
  n->cmp = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return Guard(std::move(n));
}

Guard Guard::counter_cmp(std::string counter, Cmp op, long long value) {
  return compare(counter_ref(std::move(counter)), op, literal(value));
}

Guard Guard::conj(Guard a, Guard b) {
  auto n = std::make_shared<Node>();
  n->type = Node::Type::And;
  n->a = std::move(a.root_);
  n->b = std::move(b.root_);
  return Guard(std::move(n));
}

Guard Guard::disj(Guard a, Guard b) {
  auto n = std::make_shared<Node>();
  n->type = Node::Type::Or;
  n->a = std::move(a.root_);
  n->b = std::move(b.root_);
  return Guard(std::move(n));
}

Guard Guard::negate(Guard inner) {
  auto n = std::make_shared<Node>();
  n->type = Node::Type::Not;
  n->a = std::move(inner.root_);
  return Guard(std::move(n));
}

bool Guard::eval(const Counters& counters) const { return eval_node(*root_, counters); }

std::string Guard::text() const { return render(*root_, 0); }

bool operator==(const Guard& a, const Guard& b) { return node_equal(*a.root_, *b.root_); }

std::string to_string(Guard::Cmp op) {
  switch (op) {
    case Guard::Cmp::Eq: return "==";
    case Guard::Cmp::Ne: return "!=";
    case Guard::Cmp::Lt: return "<";
    case Guard::Cmp::Le: return "<=";
    case Guard::Cmp::Gt: return ">";
    case Guard::Cmp::Ge: return ">=";
  }
  return "==";
}

}  // namespace fm
