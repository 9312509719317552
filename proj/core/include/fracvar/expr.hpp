#pragma once

#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracvar {

// Expression language for Lagrangians and constraint integrands over
// (x, y1..yN, v1..vN) plus named parameters. v_i stands for the value of the
// combined fractional operator applied to y_i.

enum class NodeType { Constant, Var, Unary, Binary };

enum class VarKind { X, Y, V, Param };

enum class UnaryOp { Neg, Sin, Cos, Exp, Log, Sqrt, Abs, Sign };

enum class BinaryOp { Add, Sub, Mul, Div, Pow };

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  NodeType type;
  double value = 0.0;           // Constant
  VarKind var_kind = VarKind::X;
  std::size_t index = 0;        // 1-based for Y/V
  std::string name;             // Param
  UnaryOp uop = UnaryOp::Neg;
  BinaryOp bop = BinaryOp::Add;
  ExprPtr lhs, rhs;             // Unary uses lhs only
};

ExprPtr make_const(double v);
ExprPtr make_var_x();
ExprPtr make_var_y(std::size_t i);
ExprPtr make_var_v(std::size_t i);
ExprPtr make_param(std::string name);
ExprPtr make_unary(UnaryOp op, ExprPtr operand);
ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs);

/// Parsed expression with its declared trajectory dimension.
struct ExprAst {
  ExprPtr root;
  std::size_t dims = 1;
};

/// Point at which an expression is evaluated.
struct Bindings {
  double x = 0.0;
  std::vector<double> y;
  std::vector<double> v;
  std::map<std::string, double> params;
};

struct ParseError : std::runtime_error {
  std::size_t position;
  ParseError(const std::string& msg, std::size_t pos)
      : std::runtime_error(msg), position(pos) {}
};

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parses an infix expression over x, y1..yN, v1..vN (y/v aliases allowed
/// for N = 1) and the given parameter names; n_dims = 0 admits expressions
/// of x only. Precedence, loosest to tightest: + -, * /, unary minus,
/// ^ (right-associative). Unknown identifiers and out-of-range indices are
/// parse errors with a position.
ExprAst parse(const std::string& text, std::size_t n_dims,
              const std::set<std::string>& param_names = {});

/// IEEE double evaluation. Division by zero, log of a nonpositive value,
/// sqrt of a negative value, sign(0) and invalid powers raise EvalError.
double eval(const ExprAst& ast, const Bindings& b);

/// Variable identifier for differentiation.
struct VarId {
  VarKind kind;        // X, Y or V
  std::size_t index;   // 1-based, ignored for X
};

/// Exact symbolic derivative with constant folding. d|u|/du is kept
/// symbolic as sign(u).
ExprAst diff(const ExprAst& ast, VarId var);

/// Constant folding plus the 0/1 arithmetic identities. Idempotent;
/// evaluation-equivalent to the input away from error points.
ExprAst simplify(const ExprAst& ast);

/// Canonical text form; reparses to a structurally equal AST.
std::string print(const ExprAst& ast);

bool structurally_equal(const ExprPtr& a, const ExprPtr& b);

/// True if the expression references y_i or v_i anywhere.
bool depends_on_trajectory(const ExprAst& ast);

}  // namespace fracvar
