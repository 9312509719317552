#include "fracvar/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace fracvar {

namespace {

std::shared_ptr<ExprNode> node(NodeType t) {
  auto n = std::make_shared<ExprNode>();
  n->type = t;
  return n;
}

bool is_const(const ExprPtr& e, double v) {
  return e->type == NodeType::Constant && e->value == v;
}

}  // namespace

ExprPtr make_const(double v) {
  auto n = node(NodeType::Constant);
  n->value = v == 0.0 ? 0.0 : v;  // no negative zero: "-0" would not round-trip
  return n;
}

ExprPtr make_var_x() {
  auto n = node(NodeType::Var);
  n->var_kind = VarKind::X;
  return n;
}

ExprPtr make_var_y(std::size_t i) {
  auto n = node(NodeType::Var);
  n->var_kind = VarKind::Y;
  n->index = i;
  return n;
}

ExprPtr make_var_v(std::size_t i) {
  auto n = node(NodeType::Var);
  n->var_kind = VarKind::V;
  n->index = i;
  return n;
}

ExprPtr make_param(std::string name) {
  auto n = node(NodeType::Var);
  n->var_kind = VarKind::Param;
  n->name = std::move(name);
  return n;
}

ExprPtr make_unary(UnaryOp op, ExprPtr operand) {
  auto n = node(NodeType::Unary);
  n->uop = op;
  n->lhs = std::move(operand);
  return n;
}

ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs) {
  auto n = node(NodeType::Binary);
  n->bop = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

// ---------------------------------------------------------------------------
// Parser: recursive descent over
//   expr  := term (('+'|'-') term)*
//   term  := unary (('*'|'/') unary)*
//   unary := '-' unary | power
//   power := atom ('^' unary)?
//   atom  := number | ident | ident '(' expr ')' | '(' expr ')'
// ---------------------------------------------------------------------------

namespace {

struct Parser {
  const std::string& text;
  std::size_t pos = 0;
  std::size_t dims;
  const std::set<std::string>& params;

  [[noreturn]] void fail(const std::string& msg, std::size_t at) const {
    throw ParseError(msg + " at position " + std::to_string(at), at);
  }

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  ExprPtr parse_expr() {
    ExprPtr e = parse_term();
    for (;;) {
      if (eat('+'))
        e = make_binary(BinaryOp::Add, e, parse_term());
      else if (eat('-'))
        e = make_binary(BinaryOp::Sub, e, parse_term());
      else
        return e;
    }
  }

  ExprPtr parse_term() {
    ExprPtr e = parse_unary();
    for (;;) {
      if (eat('*'))
        e = make_binary(BinaryOp::Mul, e, parse_unary());
      else if (eat('/'))
        e = make_binary(BinaryOp::Div, e, parse_unary());
      else
        return e;
    }
  }

  ExprPtr parse_unary() {
    if (eat('-')) {
      ExprPtr inner = parse_unary();
      // fold a negated literal into a negative constant
      if (inner->type == NodeType::Constant) return make_const(-inner->value);
      return make_unary(UnaryOp::Neg, inner);
    }
    return parse_power();
  }

  ExprPtr parse_power() {
    ExprPtr base = parse_atom();
    if (eat('^')) return make_binary(BinaryOp::Pow, base, parse_unary());
    return base;
  }

  ExprPtr parse_atom() {
    skip_ws();
    if (pos >= text.size()) fail("unexpected end of expression", pos);
    const char c = text[pos];
    if (c == '(') {
      ++pos;
      ExprPtr e = parse_expr();
      if (!eat(')')) fail("expected ')'", pos);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
    fail(std::string("unexpected character '") + c + "'", pos);
  }

  ExprPtr parse_number() {
    const std::size_t start = pos;
    std::size_t consumed = 0;
    double v = 0.0;
    try {
      v = std::stod(text.substr(start), &consumed);
    } catch (const std::exception&) {
      fail("malformed number", start);
    }
    pos = start + consumed;
    return make_const(v);
  }

  ExprPtr parse_ident() {
    const std::size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    const std::string name = text.substr(start, pos - start);

    static const std::map<std::string, UnaryOp> kFunctions = {
        {"sin", UnaryOp::Sin},   {"cos", UnaryOp::Cos}, {"exp", UnaryOp::Exp},
        {"log", UnaryOp::Log},   {"sqrt", UnaryOp::Sqrt}, {"abs", UnaryOp::Abs},
        {"sign", UnaryOp::Sign}};
    if (auto it = kFunctions.find(name); it != kFunctions.end()) {
      if (!eat('(')) fail("expected '(' after function '" + name + "'", pos);
      ExprPtr arg = parse_expr();
      if (!eat(')')) fail("expected ')'", pos);
      return make_unary(it->second, arg);
    }

    if (name == "x") return make_var_x();
    if ((name == "y" || name == "v") && dims == 1)
      return name == "y" ? make_var_y(1) : make_var_v(1);
    if ((name[0] == 'y' || name[0] == 'v') && name.size() > 1 &&
        std::all_of(name.begin() + 1, name.end(),
                    [](char d) { return std::isdigit(static_cast<unsigned char>(d)); })) {
      const std::size_t idx = std::stoul(name.substr(1));
      if (idx < 1 || idx > dims)
        fail("component index " + name + " outside declared dimension " +
                 std::to_string(dims),
             start);
      return name[0] == 'y' ? make_var_y(idx) : make_var_v(idx);
    }
    if (params.count(name)) return make_param(name);
    fail("unknown identifier '" + name + "'", start);
  }
};

}  // namespace

ExprAst parse(const std::string& text, std::size_t n_dims,
              const std::set<std::string>& param_names) {
  Parser p{text, 0, n_dims, param_names};
  p.skip_ws();
  if (p.pos >= text.size()) p.fail("empty expression", 0);
  ExprPtr root = p.parse_expr();
  p.skip_ws();
  if (p.pos < text.size()) p.fail("trailing input", p.pos);
  return ExprAst{root, n_dims};
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace {

double eval_node(const ExprPtr& e, const Bindings& b, std::size_t dims) {
  switch (e->type) {
    case NodeType::Constant:
      return e->value;
    case NodeType::Var:
      switch (e->var_kind) {
        case VarKind::X:
          return b.x;
        case VarKind::Y:
          if (e->index > b.y.size())
            throw EvalError("binding dimension mismatch for y" +
                            std::to_string(e->index));
          return b.y[e->index - 1];
        case VarKind::V:
          if (e->index > b.v.size())
            throw EvalError("binding dimension mismatch for v" +
                            std::to_string(e->index));
          return b.v[e->index - 1];
        case VarKind::Param: {
          auto it = b.params.find(e->name);
          if (it == b.params.end())
            throw EvalError("unbound parameter '" + e->name + "'");
          return it->second;
        }
      }
      throw EvalError("corrupt variable node");
    case NodeType::Unary: {
      const double u = eval_node(e->lhs, b, dims);
      switch (e->uop) {
        case UnaryOp::Neg:
          return -u;
        case UnaryOp::Sin:
          return std::sin(u);
        case UnaryOp::Cos:
          return std::cos(u);
        case UnaryOp::Exp:
          return std::exp(u);
        case UnaryOp::Log:
          if (!(u > 0.0)) throw EvalError("log of nonpositive value");
          return std::log(u);
        case UnaryOp::Sqrt:
          if (u < 0.0) throw EvalError("sqrt of negative value");
          return std::sqrt(u);
        case UnaryOp::Abs:
          return std::abs(u);
        case UnaryOp::Sign:
          if (u == 0.0) throw EvalError("sign(0) is undefined");
          return u > 0.0 ? 1.0 : -1.0;
      }
      throw EvalError("corrupt unary node");
    }
    case NodeType::Binary: {
      const double l = eval_node(e->lhs, b, dims);
      const double r = eval_node(e->rhs, b, dims);
      switch (e->bop) {
        case BinaryOp::Add:
          return l + r;
        case BinaryOp::Sub:
          return l - r;
        case BinaryOp::Mul:
          return l * r;
        case BinaryOp::Div:
          if (r == 0.0) throw EvalError("division by zero");
          return l / r;
        case BinaryOp::Pow: {
          if (l == 0.0 && r < 0.0) throw EvalError("zero raised to negative power");
          if (l < 0.0 && r != std::floor(r))
            throw EvalError("negative base with non-integer exponent");
          const double p = std::pow(l, r);
          if (!std::isfinite(p)) throw EvalError("power overflow");
          return p;
        }
      }
      throw EvalError("corrupt binary node");
    }
  }
  throw EvalError("corrupt expression node");
}

}  // namespace

double eval(const ExprAst& ast, const Bindings& b) {
  const bool sized = b.y.size() == ast.dims && b.v.size() == ast.dims;
  const bool empty_ok =
      b.y.empty() && b.v.empty() && !depends_on_trajectory(ast);
  if (!sized && !empty_ok) throw EvalError("binding dimension mismatch");
  return eval_node(ast.root, b, ast.dims);
}

// ---------------------------------------------------------------------------
// Differentiation
// ---------------------------------------------------------------------------

namespace {

bool var_matches(const ExprNode& n, VarId var) {
  if (n.type != NodeType::Var) return false;
  if (n.var_kind != var.kind) return false;
  return var.kind == VarKind::X || n.index == var.index;
}

ExprPtr diff_node(const ExprPtr& e, VarId var) {
  switch (e->type) {
    case NodeType::Constant:
      return make_const(0.0);
    case NodeType::Var:
      return make_const(var_matches(*e, var) ? 1.0 : 0.0);
    case NodeType::Unary: {
      ExprPtr du = diff_node(e->lhs, var);
      const ExprPtr& u = e->lhs;
      switch (e->uop) {
        case UnaryOp::Neg:
          return make_unary(UnaryOp::Neg, du);
        case UnaryOp::Sin:
          return make_binary(BinaryOp::Mul, make_unary(UnaryOp::Cos, u), du);
        case UnaryOp::Cos:
          return make_unary(
              UnaryOp::Neg,
              make_binary(BinaryOp::Mul, make_unary(UnaryOp::Sin, u), du));
        case UnaryOp::Exp:
          return make_binary(BinaryOp::Mul, make_unary(UnaryOp::Exp, u), du);
        case UnaryOp::Log:
          return make_binary(BinaryOp::Div, du, u);
        case UnaryOp::Sqrt:
          return make_binary(
              BinaryOp::Div, du,
              make_binary(BinaryOp::Mul, make_const(2.0),
                          make_unary(UnaryOp::Sqrt, u)));
        case UnaryOp::Abs:
          // kept symbolic; evaluating the sign at 0 errors
          return make_binary(BinaryOp::Mul, make_unary(UnaryOp::Sign, u), du);
        case UnaryOp::Sign:
          return make_const(0.0);  // zero almost everywhere
      }
      break;
    }
    case NodeType::Binary: {
      const ExprPtr& u = e->lhs;
      const ExprPtr& w = e->rhs;
      ExprPtr du = diff_node(u, var);
      ExprPtr dw = diff_node(w, var);
      switch (e->bop) {
        case BinaryOp::Add:
          return make_binary(BinaryOp::Add, du, dw);
        case BinaryOp::Sub:
          return make_binary(BinaryOp::Sub, du, dw);
        case BinaryOp::Mul:
          return make_binary(BinaryOp::Add, make_binary(BinaryOp::Mul, du, w),
                             make_binary(BinaryOp::Mul, u, dw));
        case BinaryOp::Div:
          return make_binary(
              BinaryOp::Div,
              make_binary(BinaryOp::Sub, make_binary(BinaryOp::Mul, du, w),
                          make_binary(BinaryOp::Mul, u, dw)),
              make_binary(BinaryOp::Pow, w, make_const(2.0)));
        case BinaryOp::Pow:
          if (w->type == NodeType::Constant) {
            // d(u^c) = c * u^(c-1) * du
            return make_binary(
                BinaryOp::Mul,
                make_binary(BinaryOp::Mul, make_const(w->value),
                            make_binary(BinaryOp::Pow, u,
                                        make_const(w->value - 1.0))),
                du);
          }
          // d(u^w) = u^w * (dw*log(u) + w*du/u)
          return make_binary(
              BinaryOp::Mul, make_binary(BinaryOp::Pow, u, w),
              make_binary(
                  BinaryOp::Add,
                  make_binary(BinaryOp::Mul, dw, make_unary(UnaryOp::Log, u)),
                  make_binary(BinaryOp::Div, make_binary(BinaryOp::Mul, w, du),
                              u)));
      }
      break;
    }
  }
  throw std::logic_error("diff: corrupt expression node");
}

}  // namespace

ExprAst diff(const ExprAst& ast, VarId var) {
  if ((var.kind == VarKind::Y || var.kind == VarKind::V) &&
      (var.index < 1 || var.index > ast.dims))
    throw std::invalid_argument("diff: variable index outside declared range");
  if (var.kind == VarKind::Param)
    throw std::invalid_argument("diff: cannot differentiate by a parameter");
  return simplify(ExprAst{diff_node(ast.root, var), ast.dims});
}

// ---------------------------------------------------------------------------
// Simplification
// ---------------------------------------------------------------------------

namespace {

ExprPtr simplify_node(const ExprPtr& e) {
  switch (e->type) {
    case NodeType::Constant:
    case NodeType::Var:
      return e;
    case NodeType::Unary: {
      ExprPtr u = simplify_node(e->lhs);
      if (u->type == NodeType::Constant) {
        Bindings none;
        try {
          return make_const(eval_node(make_unary(e->uop, u), none, 1));
        } catch (const EvalError&) {
          // fold only where evaluation is defined (e.g. not sign(0))
        }
      }
      if (e->uop == UnaryOp::Neg && u->type == NodeType::Unary &&
          u->uop == UnaryOp::Neg)
        return u->lhs;
      return u == e->lhs ? e : make_unary(e->uop, u);
    }
    case NodeType::Binary: {
      ExprPtr l = simplify_node(e->lhs);
      ExprPtr r = simplify_node(e->rhs);
      if (l->type == NodeType::Constant && r->type == NodeType::Constant) {
        Bindings none;
        try {
          return make_const(eval_node(make_binary(e->bop, l, r), none, 1));
        } catch (const EvalError&) {
        }
      }
      switch (e->bop) {
        case BinaryOp::Add:
          if (is_const(l, 0.0)) return r;
          if (is_const(r, 0.0)) return l;
          break;
        case BinaryOp::Sub:
          if (is_const(r, 0.0)) return l;
          if (is_const(l, 0.0)) {
            if (r->type == NodeType::Constant) return make_const(-r->value);
            return make_unary(UnaryOp::Neg, r);
          }
          break;
        case BinaryOp::Mul:
          if (is_const(l, 0.0) || is_const(r, 0.0)) return make_const(0.0);
          if (is_const(l, 1.0)) return r;
          if (is_const(r, 1.0)) return l;
          break;
        case BinaryOp::Div:
          if (is_const(r, 1.0)) return l;
          if (is_const(l, 0.0) && !is_const(r, 0.0)) return make_const(0.0);
          break;
        case BinaryOp::Pow:
          if (is_const(r, 1.0)) return l;
          if (is_const(r, 0.0)) return make_const(1.0);
          break;
      }
      if (l == e->lhs && r == e->rhs) return e;
      return make_binary(e->bop, l, r);
    }
  }
  throw std::logic_error("simplify: corrupt expression node");
}

}  // namespace

ExprAst simplify(const ExprAst& ast) {
  return ExprAst{simplify_node(ast.root), ast.dims};
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

namespace {

int precedence(const ExprPtr& e) {
  switch (e->type) {
    case NodeType::Constant:
      return e->value < 0.0 ? 3 : 5;  // negative literal binds like unary minus
    case NodeType::Var:
      return 5;
    case NodeType::Unary:
      return e->uop == UnaryOp::Neg ? 3 : 5;  // named functions are atoms
    case NodeType::Binary:
      switch (e->bop) {
        case BinaryOp::Add:
        case BinaryOp::Sub:
          return 1;
        case BinaryOp::Mul:
        case BinaryOp::Div:
          return 2;
        case BinaryOp::Pow:
          return 4;
      }
  }
  return 5;
}

const char* function_name(UnaryOp op) {
  switch (op) {
    case UnaryOp::Sin: return "sin";
    case UnaryOp::Cos: return "cos";
    case UnaryOp::Exp: return "exp";
    case UnaryOp::Log: return "log";
    case UnaryOp::Sqrt: return "sqrt";
    case UnaryOp::Abs: return "abs";
    case UnaryOp::Sign: return "sign";
    case UnaryOp::Neg: break;
  }
  return "?";
}

void print_node(const ExprPtr& e, std::string& out);

void print_child(const ExprPtr& child, int min_prec, std::string& out) {
  if (precedence(child) < min_prec) {
    out += '(';
    print_node(child, out);
    out += ')';
  } else {
    print_node(child, out);
  }
}

void print_node(const ExprPtr& e, std::string& out) {
  switch (e->type) {
    case NodeType::Constant: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", e->value);
      out += buf;
      return;
    }
    case NodeType::Var:
      switch (e->var_kind) {
        case VarKind::X: out += 'x'; return;
        case VarKind::Y: out += 'y' + std::to_string(e->index); return;
        case VarKind::V: out += 'v' + std::to_string(e->index); return;
        case VarKind::Param: out += e->name; return;
      }
      return;
    case NodeType::Unary:
      if (e->uop == UnaryOp::Neg) {
        out += '-';
        print_child(e->lhs, 3, out);
      } else {
        out += function_name(e->uop);
        out += '(';
        print_node(e->lhs, out);
        out += ')';
      }
      return;
    case NodeType::Binary: {
      const int p = precedence(e);
      const char* op = nullptr;
      int lmin = p, rmin = p + 1;
      switch (e->bop) {
        case BinaryOp::Add: op = "+"; break;
        case BinaryOp::Sub: op = "-"; break;
        case BinaryOp::Mul: op = "*"; break;
        case BinaryOp::Div: op = "/"; break;
        case BinaryOp::Pow:
          op = "^";
          lmin = p + 1;  // right-associative
          rmin = 3;      // exponent may be a unary minus
          break;
      }
      print_child(e->lhs, lmin, out);
      out += op;
      print_child(e->rhs, rmin, out);
      return;
    }
  }
}

}  // namespace

std::string print(const ExprAst& ast) {
  std::string out;
  print_node(ast.root, out);
  return out;
}

bool structurally_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (a->type != b->type) return false;
  switch (a->type) {
    case NodeType::Constant:
      return a->value == b->value;
    case NodeType::Var:
      return a->var_kind == b->var_kind && a->index == b->index &&
             a->name == b->name;
    case NodeType::Unary:
      return a->uop == b->uop && structurally_equal(a->lhs, b->lhs);
    case NodeType::Binary:
      return a->bop == b->bop && structurally_equal(a->lhs, b->lhs) &&
             structurally_equal(a->rhs, b->rhs);
  }
  return false;
}

bool depends_on_trajectory(const ExprAst& ast) {
  struct Walker {
    static bool walk(const ExprPtr& e) {
      switch (e->type) {
        case NodeType::Constant:
          return false;
        case NodeType::Var:
          return e->var_kind == VarKind::Y || e->var_kind == VarKind::V;
        case NodeType::Unary:
          return walk(e->lhs);
        case NodeType::Binary:
          return walk(e->lhs) || walk(e->rhs);
      }
      return false;
    }
  };
  return Walker::walk(ast.root);
}

}  // namespace fracvar
