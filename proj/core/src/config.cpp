#include "fracvar/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fracvar/oracle.hpp"

namespace fracvar {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::string& path,
                         const std::set<std::string>& allowed) {
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key))
      throw ConfigError(path.empty() ? key : path + "." + key, "unknown key");
}

const json& member(const json& obj, const std::string& path,
                   const std::string& key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(path + key, "missing required field");
  return *it;
}

double number_at(const json& v, const std::string& field) {
  if (!v.is_number()) throw ConfigError(field, "expected a number");
  return v.get<double>();
}

std::size_t count_at(const json& v, const std::string& field) {
  if (!v.is_number_unsigned())
    throw ConfigError(field, "expected a non-negative integer");
  return v.get<std::size_t>();
}

std::string string_at(const json& v, const std::string& field) {
  if (!v.is_string()) throw ConfigError(field, "expected a string");
  return v.get<std::string>();
}

ExprAst parse_at(const std::string& text, std::size_t dims,
                 const std::set<std::string>& names, const std::string& field) {
  try {
    return parse(text, dims, names);
  } catch (const ParseError& e) {
    throw ConfigError(field, std::string(e.what()) + " (column " +
                                 std::to_string(e.position + 1) + ")");
  }
}

BoundaryCondition boundary_at(const json& v, const std::string& field) {
  BoundaryCondition bc;
  if (!v.is_object()) throw ConfigError(field, "expected an object");
  reject_unknown_keys(v, field, {"left", "right"});
  bc.left = number_at(member(v, field + ".", "left"), field + ".left");
  const json& r = member(v, field + ".", "right");
  const std::string rf = field + ".right";
  if (r.is_number()) {
    bc.right_kind = RightBoundaryKind::Fixed;
    bc.right = r.get<double>();
  } else if (r.is_string() && r.get<std::string>() == "free") {
    bc.right_kind = RightBoundaryKind::Free;
  } else if (r.is_object()) {
    reject_unknown_keys(r, rf, {"upper"});
    bc.right_kind = RightBoundaryKind::UpperBounded;
    bc.right = number_at(member(r, rf + ".", "upper"), rf + ".upper");
  } else {
    throw ConfigError(rf, "expected a number, \"free\", or {\"upper\": ...}");
  }
  return bc;
}

void apply_solver_overrides(const json& v, SolverOptions& opt) {
  reject_unknown_keys(v, "solver",
                      {"tol_g", "tol_r_scale", "tol_v", "tol_c", "tol_cs",
                       "tol_t", "tol_reg", "max_iter", "outer_max_iter",
                       "lbfgs_memory"});
  auto num = [&](const char* key, double& slot) {
    if (v.contains(key)) slot = number_at(v[key], std::string("solver.") + key);
  };
  auto cnt = [&](const char* key, std::size_t& slot) {
    if (v.contains(key)) slot = count_at(v[key], std::string("solver.") + key);
  };
  num("tol_g", opt.tol_g);
  num("tol_r_scale", opt.tol_r_scale);
  num("tol_v", opt.tol_v);
  num("tol_c", opt.tol_c);
  num("tol_cs", opt.tol_cs);
  num("tol_t", opt.tol_t);
  num("tol_reg", opt.tol_reg);
  cnt("max_iter", opt.max_iter);
  cnt("outer_max_iter", opt.outer_max_iter);
  cnt("lbfgs_memory", opt.lbfgs_memory);
}

SampledFunction resolve_grid_param(const GridParamSpec& spec, const Grid& grid,
                                   const FracParams& p,
                                   const std::string& field) {
  const ExprAst ast = parse_at(spec.expression, 0, {}, field + ".expression");
  const SampledFunction base = SampledFunction::sample(grid, [&](double x) {
    Bindings b;
    b.x = x;
    return eval(ast, b);
  });
  if (spec.op == "none") return base;
  try {
    return apply_named_operator(spec.op, base, p);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(field + ".operator", e.what());
  }
}

}  // namespace

ProblemConfig parse_problem_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("(document)", e.what());
  }
  if (!doc.is_object()) throw ConfigError("(document)", "expected an object");
  reject_unknown_keys(doc, "",
                      {"interval", "orders", "grid", "dims", "lagrangian",
                       "parameters", "grid_parameters", "boundary",
                       "constraints", "solver", "oracle"});

  const json& interval = member(doc, "", "interval");
  if (!interval.is_object()) throw ConfigError("interval", "expected an object");
  reject_unknown_keys(interval, "interval", {"a", "b"});
  const double a = number_at(member(interval, "interval.", "a"), "interval.a");
  const double b = number_at(member(interval, "interval.", "b"), "interval.b");
  if (!(a < b)) throw ConfigError("interval", "requires a < b");

  const json& orders = member(doc, "", "orders");
  if (!orders.is_object()) throw ConfigError("orders", "expected an object");
  reject_unknown_keys(orders, "orders", {"alpha", "beta", "gamma"});
  FracParams params = [&] {
    try {
      return FracParams(
          number_at(member(orders, "orders.", "alpha"), "orders.alpha"),
          number_at(member(orders, "orders.", "beta"), "orders.beta"),
          number_at(member(orders, "orders.", "gamma"), "orders.gamma"));
    } catch (const std::domain_error& e) {
      throw ConfigError("orders", e.what());
    }
  }();

  const json& grid = member(doc, "", "grid");
  if (!grid.is_object()) throw ConfigError("grid", "expected an object");
  reject_unknown_keys(grid, "grid", {"n"});
  const std::size_t n = count_at(member(grid, "grid.", "n"), "grid.n");
  if (n < 3) throw ConfigError("grid.n", "needs at least 3 nodes");

  const std::size_t dims = count_at(member(doc, "", "dims"), "dims");
  if (dims == 0) throw ConfigError("dims", "must be positive");

  ProblemConfig cfg{Problem{params, Grid(a, b, n), dims, ExprAst{}}, {}, {}};
  Problem& prob = cfg.problem;

  std::set<std::string> param_names;
  if (doc.contains("parameters")) {
    const json& pars = doc["parameters"];
    if (!pars.is_object()) throw ConfigError("parameters", "expected an object");
    for (const auto& [key, val] : pars.items()) {
      prob.parameters[key] = number_at(val, "parameters." + key);
      param_names.insert(key);
    }
  }
  if (doc.contains("grid_parameters")) {
    const json& gps = doc["grid_parameters"];
    if (!gps.is_object())
      throw ConfigError("grid_parameters", "expected an object");
    for (const auto& [key, val] : gps.items()) {
      const std::string field = "grid_parameters." + key;
      if (!val.is_object()) throw ConfigError(field, "expected an object");
      reject_unknown_keys(val, field, {"operator", "expression"});
      GridParamSpec spec{
          key, string_at(member(val, field + ".", "operator"), field + ".operator"),
          string_at(member(val, field + ".", "expression"),
                    field + ".expression")};
      prob.grid_parameters.emplace(
          key, resolve_grid_param(spec, prob.grid, params, field));
      cfg.grid_param_specs.push_back(std::move(spec));
      param_names.insert(key);
    }
  }

  prob.lagrangian = parse_at(string_at(member(doc, "", "lagrangian"),
                                       "lagrangian"),
                             dims, param_names, "lagrangian");

  const json& bnd = member(doc, "", "boundary");
  if (!bnd.is_array()) throw ConfigError("boundary", "expected an array");
  if (bnd.size() != dims)
    throw ConfigError("boundary", "needs one entry per component (" +
                                      std::to_string(dims) + ")");
  for (std::size_t i = 0; i < bnd.size(); ++i)
    prob.boundary.push_back(
        boundary_at(bnd[i], "boundary[" + std::to_string(i) + "]"));

  if (doc.contains("constraints")) {
    const json& cons = doc["constraints"];
    if (!cons.is_array()) throw ConfigError("constraints", "expected an array");
    for (std::size_t i = 0; i < cons.size(); ++i) {
      const std::string field = "constraints[" + std::to_string(i) + "]";
      const json& c = cons[i];
      if (!c.is_object()) throw ConfigError(field, "expected an object");
      reject_unknown_keys(c, field, {"integrand", "relation", "target"});
      Constraint out;
      out.integrand = parse_at(
          string_at(member(c, field + ".", "integrand"), field + ".integrand"),
          dims, param_names, field + ".integrand");
      const std::string rel =
          string_at(member(c, field + ".", "relation"), field + ".relation");
      if (rel == "eq")
        out.relation = ConstraintRelation::Equality;
      else if (rel == "le")
        out.relation = ConstraintRelation::InequalityLe;
      else
        throw ConfigError(field + ".relation", "expected \"eq\" or \"le\"");
      out.target =
          number_at(member(c, field + ".", "target"), field + ".target");
      prob.constraints.push_back(std::move(out));
    }
  }

  if (doc.contains("solver")) {
    const json& s = doc["solver"];
    if (!s.is_object()) throw ConfigError("solver", "expected an object");
    apply_solver_overrides(s, prob.options);
  }

  if (doc.contains("oracle")) {
    const json& o = doc["oracle"];
    if (!o.is_object()) throw ConfigError("oracle", "expected an object");
    reject_unknown_keys(o, "oracle", {"tag", "expression"});
    OracleSpec spec;
    if (o.contains("tag")) spec.tag = string_at(o["tag"], "oracle.tag");
    if (o.contains("expression"))
      spec.expression = string_at(o["expression"], "oracle.expression");
    if (spec.tag.empty() == spec.expression.empty())
      throw ConfigError("oracle", "needs exactly one of tag or expression");
    if (!spec.expression.empty())
      parse_at(spec.expression, 0, {}, "oracle.expression");
    cfg.oracle = std::move(spec);
  }

  try {
    prob.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("(document)", e.what());
  }
  return cfg;
}

ProblemConfig load_problem_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("(file)", "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem_config(buf.str());
}

ProblemConfig with_grid_size(const ProblemConfig& cfg, std::size_t n) {
  ProblemConfig out = cfg;
  Problem& prob = out.problem;
  prob.grid = Grid(prob.grid.a(), prob.grid.b(), n);
  prob.grid_parameters.clear();
  for (const auto& spec : out.grid_param_specs)
    prob.grid_parameters.emplace(
        spec.name, resolve_grid_param(spec, prob.grid, prob.params,
                                      "grid_parameters." + spec.name));
  return out;
}

OperatorKind operator_kind_from_name(const std::string& name) {
  if (name == "rlfi-left") return OperatorKind::RlfiLeft;
  if (name == "rlfi-right") return OperatorKind::RlfiRight;
  if (name == "rlfd-left") return OperatorKind::RlfdLeft;
  if (name == "rlfd-right") return OperatorKind::RlfdRight;
  if (name == "cfd-left") return OperatorKind::CfdLeft;
  if (name == "cfd-right") return OperatorKind::CfdRight;
  if (name == "combined-caputo") return OperatorKind::CombinedCaputo;
  if (name == "dual-rl") return OperatorKind::DualRl;
  throw std::invalid_argument("unknown operator '" + name + "'");
}

SampledFunction apply_named_operator(const std::string& name,
                                     const SampledFunction& f,
                                     const FracParams& p) {
  switch (operator_kind_from_name(name)) {
    case OperatorKind::RlfiLeft: return rlfi_left(f, p.alpha);
    case OperatorKind::RlfiRight: return rlfi_right(f, p.beta);
    case OperatorKind::RlfdLeft: return rlfd_left(f, p.alpha);
    case OperatorKind::RlfdRight: return rlfd_right(f, p.beta);
    case OperatorKind::CfdLeft: return cfd_left(f, p.alpha);
    case OperatorKind::CfdRight: return cfd_right(f, p.beta);
    case OperatorKind::CombinedCaputo: return combined_caputo(f, p);
    case OperatorKind::DualRl: return dual_rl(f, p);
  }
  throw std::logic_error("apply_named_operator: corrupt kind");
}

Trajectory sample_oracle(const ProblemConfig& cfg, const Grid& grid) {
  if (!cfg.oracle)
    throw std::invalid_argument("sample_oracle: config declares no oracle");
  const OracleSpec& spec = *cfg.oracle;
  if (!spec.expression.empty()) {
    const ExprAst ast = parse(spec.expression, 0);
    return Trajectory::sample(grid, cfg.problem.dims,
                              [&](std::size_t, double x) {
                                Bindings b;
                                b.x = x;
                                return eval(ast, b);
                              });
  }
  const Problem& prob = cfg.problem;
  double y0 = prob.boundary.empty() ? 0.0 : prob.boundary[0].left;
  double y1 = prob.boundary.empty() ? 1.0 : prob.boundary[0].right;
  double c = prob.constraints.empty() ? 1.0 : prob.constraints[0].target;
  return oracle::classical_limit_solution(spec.tag, grid, y0, y1, c);
}

}  // namespace fracvar
