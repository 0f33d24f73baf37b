#include "gsisio/scenario.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gsisio/errors.hpp"
#include "gsisio/mixed_monotone.hpp"

namespace gsisio {

namespace {

using nlohmann::json;

class Reader {
 public:
  explicit Reader(std::map<std::string, double> constants) : constants_(std::move(constants)) {}

  [[noreturn]] static void fail(const std::string& key, const std::string& msg) {
    throw ConfigError("config key '" + key + "': " + msg);
  }

  static const json& at(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) fail(path.empty() ? key : path + "." + key, "missing");
    return j.at(key);
  }

  double number(const json& j, const std::string& key) const {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
      try {
        return Expression::parse(j.get<std::string>(), ExpressionSymbols{0, false, constants_}).evaluate(Vector{});
      } catch (const ConfigError& e) {
        fail(key, e.what());
      }
    }
    fail(key, "expected a number or constant expression");
  }

  static std::size_t count(const json& j, const std::string& key) {
    if (!j.is_number_integer() || j.get<long long>() < 0) fail(key, "expected a non-negative integer");
    return j.get<std::size_t>();
  }

  Vector vector(const json& j, const std::string& key, std::size_t n) const {
    if (!j.is_array()) fail(key, "expected an array");
    if (j.size() != n) fail(key, "expected " + std::to_string(n) + " entries, got " + std::to_string(j.size()));
    Vector v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = number(j[i], key + "[" + std::to_string(i) + "]");
    return v;
  }

  Matrix matrix(const json& j, const std::string& key, std::size_t rows, std::size_t cols) const {
    if (!j.is_array()) fail(key, "expected an array of rows");
    if (j.size() != rows) fail(key, "expected " + std::to_string(rows) + " rows, got " + std::to_string(j.size()));
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
      const std::string rk = key + "[" + std::to_string(i) + "]";
      const Vector r = vector(j[i], rk, cols);
      for (std::size_t c = 0; c < cols; ++c) m(i, c) = r[c];
    }
    return m;
  }

  IntervalVector box(const json& j, const std::string& key, std::size_t n) const {
    const Vector lo = vector(at(j, "lower", key), key + ".lower", n);
    const Vector hi = vector(at(j, "upper", key), key + ".upper", n);
    try {
      return IntervalVector(lo, hi);
    } catch (const Error& e) {
      fail(key, e.what());
    }
  }

  static std::vector<std::string> strings(const json& j, const std::string& key, std::size_t n) {
    if (!j.is_array() || j.size() != n) fail(key, "expected an array of " + std::to_string(n) + " expressions");
    std::vector<std::string> out;
    for (const auto& e : j) {
      if (!e.is_string()) fail(key, "expected expression strings");
      out.push_back(e.get<std::string>());
    }
    return out;
  }

  JacobianSpec jacobian(const json& j, const std::string& key, std::size_t rows, std::size_t cols) const {
    JacobianSpec s;
    if (j.contains("estimate")) {
      const json& e = j.at("estimate");
      s.estimate = true;
      s.estimate_box = box(e, key + ".estimate", cols);
      if (e.contains("grid")) s.grid = count(e.at("grid"), key + ".estimate.grid");
      if (e.contains("margin")) s.margin = number(e.at("margin"), key + ".estimate.margin");
      if (s.grid < 2) fail(key + ".estimate.grid", "must be >= 2");
      if (s.margin < 0) fail(key + ".estimate.margin", "must be >= 0");
      return s;
    }
    s.lower = matrix(at(j, "lower", key), key + ".lower", rows, cols);
    s.upper = matrix(at(j, "upper", key), key + ".upper", rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c)
        if (s.lower(r, c) > s.upper(r, c)) fail(key, "lower exceeds upper at (" + std::to_string(r + 1) + "," +
                                                          std::to_string(c + 1) + ")");
    return s;
  }

  std::optional<double> lipschitz(const json& j, const std::string& key) const {
    if (j.is_string() && j.get<std::string>() == "jacobian") return std::nullopt;
    const double v = number(j, key);
    if (!(v > 0)) fail(key, "must be > 0");
    return v;
  }

 private:
  std::map<std::string, double> constants_;
};

void check_expressions(const std::vector<std::string>& src, const ExpressionSymbols& sym, const std::string& key) {
  for (std::size_t i = 0; i < src.size(); ++i) {
    try {
      (void)Expression::parse(src[i], sym);
    } catch (const ConfigError& e) {
      Reader::fail(key + "[" + std::to_string(i) + "]", e.what());
    }
  }
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");

  ScenarioConfig c;
  try {
    if (doc.contains("constants")) {
      const json& k = doc.at("constants");
      if (!k.is_object()) Reader::fail("constants", "expected an object");
      for (const auto& [name, val] : k.items()) {
        if (!val.is_number()) Reader::fail("constants." + name, "expected a number");
        c.constants[name] = val.get<double>();
      }
    }
    const Reader r(c.constants);
    if (doc.contains("name")) c.name = doc.at("name").get<std::string>();
    const json& dims = Reader::at(doc, "dimensions", "");
    c.n = Reader::count(Reader::at(dims, "n", "dimensions"), "dimensions.n");
    c.m = dims.contains("m") ? Reader::count(dims.at("m"), "dimensions.m") : 0;
    c.p = Reader::count(Reader::at(dims, "p", "dimensions"), "dimensions.p");
    c.l = Reader::count(Reader::at(dims, "l", "dimensions"), "dimensions.l");
    if (c.n == 0 || c.p == 0 || c.l == 0) Reader::fail("dimensions", "n, p and l must be positive");

    c.G = r.matrix(Reader::at(doc, "G", ""), "G", c.n, c.p);
    c.H = r.matrix(Reader::at(doc, "H", ""), "H", c.l, c.p);
    c.B = c.m == 0 && !doc.contains("B") ? Matrix(c.n, 0) : r.matrix(Reader::at(doc, "B", ""), "B", c.n, c.m);
    c.D = c.m == 0 && !doc.contains("D") ? Matrix(c.l, 0) : r.matrix(Reader::at(doc, "D", ""), "D", c.l, c.m);

    const ExpressionSymbols state{c.n, false, c.constants};
    const ExpressionSymbols time{0, true, c.constants};
    c.f_src = Reader::strings(Reader::at(doc, "f", ""), "f", c.n);
    c.g_src = Reader::strings(Reader::at(doc, "g", ""), "g", c.l);
    check_expressions(c.f_src, state, "f");
    check_expressions(c.g_src, state, "g");
    c.d_src = Reader::strings(Reader::at(doc, "unknown_input", ""), "unknown_input", c.p);
    check_expressions(c.d_src, time, "unknown_input");
    if (doc.contains("control")) {
      c.u_src = Reader::strings(doc.at("control"), "control", c.m);
    } else {
      c.u_src.assign(c.m, "0");
    }
    check_expressions(c.u_src, time, "control");

    const json& jac = Reader::at(doc, "jacobian", "");
    c.jac_f = r.jacobian(Reader::at(jac, "f", "jacobian"), "jacobian.f", c.n, c.n);
    c.jac_g = r.jacobian(Reader::at(jac, "g", "jacobian"), "jacobian.g", c.l, c.n);

    if (doc.contains("lipschitz")) {
      const json& lip = doc.at("lipschitz");
      if (lip.contains("f")) c.lipschitz_f = r.lipschitz(lip.at("f"), "lipschitz.f");
      if (lip.contains("g")) c.lipschitz_g = r.lipschitz(lip.at("g"), "lipschitz.g");
      if (lip.contains("reported")) {
        const json& rep = lip.at("reported");
        if (rep.contains("f")) c.reported_lipschitz_f = r.number(rep.at("f"), "lipschitz.reported.f");
        if (rep.contains("g")) c.reported_lipschitz_g = r.number(rep.at("g"), "lipschitz.reported.g");
      }
    }

    const json& noise = Reader::at(doc, "noise", "");
    c.w_bounds = r.box(Reader::at(noise, "w", "noise"), "noise.w", c.n);
    c.v_bounds = r.box(Reader::at(noise, "v", "noise"), "noise.v", c.l);
    c.x0_bounds = r.box(Reader::at(doc, "x0", ""), "x0", c.n);

    if (doc.contains("horizon")) c.horizon = Reader::count(doc.at("horizon"), "horizon");
    if (doc.contains("seed")) {
      if (!doc.at("seed").is_number_unsigned()) Reader::fail("seed", "expected a non-negative integer");
      c.seed = doc.at("seed").get<std::uint64_t>();
    }

    if (doc.contains("bounding")) {
      const json& b = doc.at("bounding");
      if (b.contains("affine")) {
        if (!b.at("affine").is_boolean()) Reader::fail("bounding.affine", "expected true or false");
        c.bounding.use_affine = b.at("affine").get<bool>();
      }
      if (b.contains("sigma")) {
        const json& s = b.at("sigma");
        if (s.is_string()) {
          if (s.get<std::string>() != "lipschitz") Reader::fail("bounding.sigma", "expected \"lipschitz\" or an object");
        } else {
          c.bounding.sigma_policy = SigmaPolicy::kFixed;
          c.bounding.sigma_f = r.vector(Reader::at(s, "f", "bounding.sigma"), "bounding.sigma.f", c.n);
          c.bounding.sigma_g = r.vector(Reader::at(s, "g", "bounding.sigma"), "bounding.sigma.g", c.l);
          for (double v : c.bounding.sigma_f)
            if (v < 0) Reader::fail("bounding.sigma.f", "entries must be >= 0");
          for (double v : c.bounding.sigma_g)
            if (v < 0) Reader::fail("bounding.sigma.g", "entries must be >= 0");
        }
      }
    }
    if (doc.contains("output")) {
      const json& o = doc.at("output");
      if (o.contains("csv")) c.csv_path = o.at("csv").get<std::string>();
      if (o.contains("svg_prefix")) c.svg_prefix = o.at("svg_prefix").get<std::string>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config has a value of the wrong type: ") + e.what());
  }
  return c;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

const std::string& reference_scenario_text() {
  static const std::string text = R"json({
  // Two-state nonlinear plant with a rank-one feedthrough matrix.
  "name": "reference",
  "dimensions": {"n": 2, "m": 1, "p": 2, "l": 2},
  "constants": {"eps": 1e-6},
  "B": [[0], [0]],
  "D": [[0], [0]],
  "G": [[0, -0.1], [0.2, -0.2]],
  "H": [[-0.1, 0.3], [0.25, -0.75]],
  "f": ["0.6*x1 - 0.12*x2 + 1.1*sin(0.3*x2 - 0.2*x1)",
        "-0.2*x1 - 0.14*x2"],
  "g": ["0.2*x1 + 0.65*x2 + 0.8*sin(0.3*x1 + 0.2*x2)",
        "sin(x1)"],
  "jacobian": {
    "f": {"lower": [[0.38, -0.52], ["-0.2 - eps", "-0.14 - eps"]],
          "upper": [[0.82, 0.21], ["-0.2 + eps", "-0.14 + eps"]]},
    "g": {"lower": [[-0.04, 0.49], [-1, "-eps"]],
          "upper": [[0.44, 0.81], [1, "eps"]]}
  },
  // Certified constants follow from the Jacobian bounds; the commonly quoted
  // values are kept for comparison only.
  "lipschitz": {"f": "jacobian", "g": "jacobian", "reported": {"f": 0.35, "g": 0.74}},
  "noise": {"w": {"lower": [-0.2, -0.2], "upper": [0.2, 0.2]},
            "v": {"lower": [-0.2, -0.2], "upper": [0.2, 0.2]}},
  "x0": {"lower": [-1.1, -2], "upper": [2, 1.1]},
  "unknown_input": ["0.5*sin(0.1*k)", "0.5*cos(0.07*k) + 0.2"],
  "control": ["0"],
  "horizon": 200,
  "seed": 1,
  "bounding": {"affine": true, "sigma": "lipschitz"}
}
)json";
  return text;
}

Vector Scenario::input_at(std::size_t k) const {
  Vector d(d_expr.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = d_expr[i].evaluate(Vector{}, static_cast<double>(k));
  return d;
}

Vector Scenario::control_at(std::size_t k) const {
  Vector u(u_expr.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = u_expr[i].evaluate(Vector{}, static_cast<double>(k));
  return u;
}

namespace {

NonlinearField compile_field(const std::vector<std::string>& src, std::size_t n, const JacobianSpec& jac,
                             std::optional<double> lipschitz, const std::map<std::string, double>& constants) {
  std::vector<Expression> exprs;
  for (const std::string& s : src) exprs.push_back(Expression::parse(s, ExpressionSymbols{n, false, constants}));
  NonlinearField q;
  q.dim_in = n;
  q.dim_out = src.size();
  q.evaluate = [exprs](const Vector& x) {
    Vector y(exprs.size());
    for (std::size_t i = 0; i < exprs.size(); ++i) y[i] = exprs[i].evaluate(x);
    return y;
  };
  if (jac.estimate) {
    const JacobianBounds b = estimate_jacobian_bounds(q.evaluate, *jac.estimate_box, jac.grid, jac.margin);
    q.jacobian_lower = b.lower;
    q.jacobian_upper = b.upper;
  } else {
    q.jacobian_lower = jac.lower;
    q.jacobian_upper = jac.upper;
  }
  q.lipschitz = lipschitz ? *lipschitz : jacobian_lipschitz_bound(q.jacobian_lower, q.jacobian_upper);
  return q;
}

}  // namespace

Scenario build_scenario(const ScenarioConfig& cfg) {
  Scenario s;
  s.config = cfg;
  SystemModel& m = s.model;
  m.n = cfg.n;
  m.m = cfg.m;
  m.p = cfg.p;
  m.l = cfg.l;
  m.B = cfg.B;
  m.D = cfg.D;
  m.G = cfg.G;
  m.H = cfg.H;
  m.f = compile_field(cfg.f_src, cfg.n, cfg.jac_f, cfg.lipschitz_f, cfg.constants);
  m.g = compile_field(cfg.g_src, cfg.n, cfg.jac_g, cfg.lipschitz_g, cfg.constants);
  m.w_bounds = cfg.w_bounds;
  m.v_bounds = cfg.v_bounds;
  m.x0_bounds = cfg.x0_bounds;
  m.bounding = cfg.bounding;
  const ExpressionSymbols time{0, true, cfg.constants};
  for (const std::string& e : cfg.d_src) s.d_expr.push_back(Expression::parse(e, time));
  for (const std::string& e : cfg.u_src) s.u_expr.push_back(Expression::parse(e, time));
  m.validate();
  return s;
}

}  // namespace gsisio
