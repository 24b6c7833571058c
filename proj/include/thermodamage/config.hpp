#pragma once

// Run configuration: a flat key = value file with [sections].
//
//   preset = sens-notch        (optional, first line; later keys override)
//   [mesh]      domain, kind, n, notch_length, notch_thickness, notch_height
//   [material]  lambda, mu (Pa), rho, kappa, ell (or ell_over_h > 0), Gc (Pa),
//               gamma0, conductivity = constant|power_law, K, c0, c1, c2, beta
//   [time]      T (s), M
//   [data]      f_x, f_y, gamma, u0_x, u0_y, v0_x, v0_y, phi0, theta0
//   [bc]        <field>.<tag> = dirichlet|neumann <expr> [<expr>]
//   [solver]    newton_tol, newton_max_iter, line_search, linear_solver,
//               clip_damage, freeze_damage, freeze_momentum, freeze_heat
//   [analysis]  ellipticity = coercive|inverse, exact = none|mms-elastic|mms-heat
//   [output]    dir, snapshot_stride, vtk
//
// Expressions come from a fixed catalog: zero, const(c), monomial(c,a,b),
// sinsin(c), coscos(c), ramp(c), step_ramp(c), mms_elastic_fx, mms_elastic_fy,
// mms_heat_source, and free (boundary components only).

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "thermodamage/mesh.hpp"
#include "thermodamage/model.hpp"
#include "thermodamage/stepper.hpp"

namespace thermodamage {

class ConfigError : public std::runtime_error {
public:
  ConfigError(int line, int column, const std::string& msg)
      : std::runtime_error("config:" + std::to_string(line) + ":" + std::to_string(column) + ": " + msg), line(line), column(column) {}
  int line;
  int column;
};

struct MeshConfig {
  std::string domain = "notched";  // notched | unit_square
  CellKind kind = CellKind::quadrilateral;
  int n = 8;
  NotchGeometry notch{};
  bool operator==(const MeshConfig& o) const {
    return domain == o.domain && kind == o.kind && n == o.n && notch.length == o.notch.length &&
           notch.thickness == o.notch.thickness && notch.height == o.notch.height;
  }
};

struct MaterialConfig {
  double lambda = 1.0, mu = 1.0;
  double rho = 1.0;
  double kappa = 1e-8;
  double ell = 1.0;
  double ell_over_h = 0.0;  // > 0: ell = ell_over_h * h of the mesh
  double Gc = 1.0;
  double gamma0 = 1e4;
  std::string conductivity = "constant";
  double K = 1.0;
  double c0 = 1.0, c1 = 1.0, c2 = 1.0;
  double beta = 1.5;
  bool operator==(const MaterialConfig&) const = default;
};

struct TimeConfig {
  double T = 1.0;
  int M = 1;
  bool operator==(const TimeConfig&) const = default;
};

struct DataConfig {
  std::string f_x = "zero", f_y = "zero", gamma = "zero";
  std::string u0_x = "zero", u0_y = "zero", v0_x = "zero", v0_y = "zero";
  std::string phi0 = "const(1)", theta0 = "zero";
  bool operator==(const DataConfig&) const = default;
};

struct BCEntry {
  std::string field;  // u | phi | theta
  std::string tag;
  std::string kind;   // dirichlet | neumann
  std::vector<std::string> values;
  bool operator==(const BCEntry&) const = default;
};

struct SolverConfig {
  double newton_tol = 1e-8;
  int newton_max_iter = 50;
  std::string line_search = "auto";
  std::string linear_solver = "direct";
  bool clip_damage = false;
  bool freeze_damage = false;
  bool freeze_momentum = false;
  bool freeze_heat = false;
  bool operator==(const SolverConfig&) const = default;
};

struct AnalysisConfig {
  std::string ellipticity = "coercive";
  std::string exact = "none";
  bool operator==(const AnalysisConfig&) const = default;
};

struct OutputConfig {
  std::string dir = "out";
  int snapshot_stride = 10;
  bool vtk = true;
  bool operator==(const OutputConfig&) const = default;
};

struct RunConfig {
  MeshConfig mesh;
  MaterialConfig material;
  TimeConfig time;
  DataConfig data;
  std::vector<BCEntry> bc;
  SolverConfig solver;
  AnalysisConfig analysis;
  OutputConfig output;
  bool operator==(const RunConfig&) const = default;
};

// ---------------------------------------------------------------------------
// Expression catalog
// ---------------------------------------------------------------------------

struct Expr {
  std::string name;
  std::vector<double> args;
};

/// Parses "name" or "name(a, b, ...)". Returns the offset of the first bad
/// character through `err_at` on failure.
inline bool parse_expr(const std::string& s, Expr& out, std::size_t& err_at, std::string& msg) {
  out = {};
  std::size_t i = 0;
  while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
  out.name = s.substr(0, i);
  if (out.name.empty()) {
    err_at = 0;
    msg = "expected an expression name";
    return false;
  }
  if (i == s.size()) return true;
  if (s[i] != '(') {
    err_at = i;
    msg = "unexpected character '" + std::string(1, s[i]) + "'";
    return false;
  }
  ++i;
  while (true) {
    while (i < s.size() && s[i] == ' ') ++i;
    const char* b = s.c_str() + i;
    char* e = nullptr;
    const double v = std::strtod(b, &e);
    if (e == b) {
      err_at = i;
      msg = "expected a number";
      return false;
    }
    out.args.push_back(v);
    i += static_cast<std::size_t>(e - b);
    while (i < s.size() && s[i] == ' ') ++i;
    if (i < s.size() && s[i] == ',') {
      ++i;
      continue;
    }
    if (i < s.size() && s[i] == ')') {
      ++i;
      break;
    }
    err_at = i;
    msg = "expected ',' or ')'";
    return false;
  }
  if (i != s.size()) {
    err_at = i;
    msg = "trailing characters after ')'";
    return false;
  }
  return true;
}

inline int catalog_arity(const std::string& name) {
  static const std::map<std::string, int> arity{
      {"zero", 0},         {"const", 1},          {"monomial", 3},      {"sinsin", 1},          {"coscos", 1},
      {"ramp", 1},         {"step_ramp", 1},      {"mms_elastic_fx", 0}, {"mms_elastic_fy", 0}, {"mms_heat_source", 0},
      {"free", 0}};
  auto it = arity.find(name);
  return it == arity.end() ? -1 : it->second;
}

/// Values the catalog needs beyond (x, t).
struct CatalogContext {
  ModelParams params;
  TimeGrid grid;
};

/// Manufactured elastic forcing for u = (s, s), s = sin(pi x) sin(pi y), with
/// stiffness coefficient 1 + kappa: f = -(1+kappa)[mu lap u + (lambda+mu) grad div u].
inline std::array<double, 2> mms_elastic_force(const ModelParams& p, const Point& x) {
  const double pi = M_PI;
  const double s = std::sin(pi * x[0]) * std::sin(pi * x[1]);
  const double c = std::cos(pi * x[0]) * std::cos(pi * x[1]);
  const double lam = p.moduli.lambda, mu = p.moduli.mu, coef = 1.0 + p.kappa;
  const double fi = coef * (2.0 * pi * pi * mu * s - (lam + mu) * pi * pi * (c - s));
  return {fi, fi};
}

inline SpaceTimeFunction make_function(const std::string& text, const CatalogContext& ctx) {
  Expr e;
  std::size_t at = 0;
  std::string msg;
  if (!parse_expr(text, e, at, msg)) throw std::invalid_argument("bad expression '" + text + "': " + msg);
  const int ar = catalog_arity(e.name);
  if (ar < 0) throw std::invalid_argument("unknown catalog entry '" + e.name + "'");
  if (static_cast<int>(e.args.size()) != ar) throw std::invalid_argument("wrong argument count for '" + e.name + "'");
  const auto& a = e.args;
  const double pi = M_PI;
  if (e.name == "free") return {};
  if (e.name == "zero") return [](const Point&, double) { return 0.0; };
  if (e.name == "const") return [c = a[0]](const Point&, double) { return c; };
  if (e.name == "monomial") {
    return [c = a[0], p = a[1], q = a[2]](const Point& x, double) { return c * std::pow(x[0], p) * std::pow(x[1], q); };
  }
  if (e.name == "sinsin") return [c = a[0], pi](const Point& x, double) { return c * std::sin(pi * x[0]) * std::sin(pi * x[1]); };
  if (e.name == "coscos") return [c = a[0], pi](const Point& x, double) { return c * std::cos(pi * x[0]) * std::cos(pi * x[1]); };
  if (e.name == "ramp") return [c = a[0]](const Point&, double t) { return c * t; };
  if (e.name == "step_ramp") return [c = a[0], tau = ctx.grid.tau](const Point&, double t) { return c * std::round(t / tau); };
  if (e.name == "mms_elastic_fx") return [p = ctx.params](const Point& x, double) { return mms_elastic_force(p, x)[0]; };
  if (e.name == "mms_elastic_fy") return [p = ctx.params](const Point& x, double) { return mms_elastic_force(p, x)[1]; };
  if (e.name == "mms_heat_source") {
    return [K = ctx.params.conductivity.K_const, pi](const Point& x, double) {
      return 2.0 * pi * pi * K * std::cos(pi * x[0]) * std::cos(pi * x[1]);
    };
  }
  throw std::invalid_argument("unknown catalog entry '" + e.name + "'");
}

// ---------------------------------------------------------------------------
// Parsing and serialization
// ---------------------------------------------------------------------------

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline RunConfig preset_config(const std::string& name);

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Cursor {
  int line;
  int column;  // 1-based column of the value
};

inline double to_double(const std::string& v, Cursor c) {
  const char* b = v.c_str();
  char* e = nullptr;
  const double d = std::strtod(b, &e);
  if (e == b || *e != '\0') throw ConfigError(c.line, c.column + static_cast<int>(e - b), "expected a number, got '" + v + "'");
  return d;
}

inline int to_int(const std::string& v, Cursor c) {
  const char* b = v.c_str();
  char* e = nullptr;
  const long d = std::strtol(b, &e, 10);
  if (e == b || *e != '\0') throw ConfigError(c.line, c.column + static_cast<int>(e - b), "expected an integer, got '" + v + "'");
  return static_cast<int>(d);
}

inline bool to_bool(const std::string& v, Cursor c) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(c.line, c.column, "expected true or false, got '" + v + "'");
}

inline void check_expr(const std::string& v, Cursor c, bool allow_free) {
  Expr e;
  std::size_t at = 0;
  std::string msg;
  if (!parse_expr(v, e, at, msg)) throw ConfigError(c.line, c.column + static_cast<int>(at), msg);
  const int ar = catalog_arity(e.name);
  if (ar < 0) throw ConfigError(c.line, c.column, "unknown catalog entry '" + e.name + "'");
  if (static_cast<int>(e.args.size()) != ar) {
    throw ConfigError(c.line, c.column, "'" + e.name + "' takes " + std::to_string(ar) + " argument(s)");
  }
  if (e.name == "free" && !allow_free) throw ConfigError(c.line, c.column, "'free' is only allowed in boundary conditions");
}

inline void set_key(RunConfig& cfg, const std::string& section, const std::string& key, const std::string& v, Cursor c) {
  const auto bad = [&] { throw ConfigError(c.line, 1, "unknown key '" + key + "' in section [" + section + "]"); };
  if (section == "mesh") {
    if (key == "domain") {
      if (v != "notched" && v != "unit_square") throw ConfigError(c.line, c.column, "domain must be notched or unit_square");
      cfg.mesh.domain = v;
    } else if (key == "kind") {
      try {
        cfg.mesh.kind = parse_cell_kind(v);
      } catch (const std::exception& e) {
        throw ConfigError(c.line, c.column, e.what());
      }
    } else if (key == "n") {
      cfg.mesh.n = to_int(v, c);
    } else if (key == "notch_length") {
      cfg.mesh.notch.length = to_double(v, c);
    } else if (key == "notch_thickness") {
      cfg.mesh.notch.thickness = to_double(v, c);
    } else if (key == "notch_height") {
      cfg.mesh.notch.height = to_double(v, c);
    } else {
      bad();
    }
  } else if (section == "material") {
    auto& m = cfg.material;
    const std::map<std::string, double*> nums{{"lambda", &m.lambda}, {"mu", &m.mu},         {"rho", &m.rho}, {"kappa", &m.kappa},
                                              {"ell", &m.ell},       {"ell_over_h", &m.ell_over_h}, {"Gc", &m.Gc}, {"gamma0", &m.gamma0},
                                              {"K", &m.K},           {"c0", &m.c0},         {"c1", &m.c1},   {"c2", &m.c2},
                                              {"beta", &m.beta}};
    if (auto it = nums.find(key); it != nums.end()) {
      *it->second = to_double(v, c);
    } else if (key == "conductivity") {
      if (v != "constant" && v != "power_law") throw ConfigError(c.line, c.column, "conductivity must be constant or power_law");
      m.conductivity = v;
    } else {
      bad();
    }
  } else if (section == "time") {
    if (key == "T") {
      cfg.time.T = to_double(v, c);
    } else if (key == "M") {
      cfg.time.M = to_int(v, c);
    } else {
      bad();
    }
  } else if (section == "data") {
    auto& d = cfg.data;
    const std::map<std::string, std::string*> fields{{"f_x", &d.f_x},   {"f_y", &d.f_y},   {"gamma", &d.gamma},
                                                     {"u0_x", &d.u0_x}, {"u0_y", &d.u0_y}, {"v0_x", &d.v0_x},
                                                     {"v0_y", &d.v0_y}, {"phi0", &d.phi0}, {"theta0", &d.theta0}};
    auto it = fields.find(key);
    if (it == fields.end()) bad();
    check_expr(v, c, false);
    *it->second = v;
  } else if (section == "bc") {
    const auto dot = key.find('.');
    if (dot == std::string::npos) throw ConfigError(c.line, 1, "boundary key must be <field>.<tag>");
    BCEntry e;
    e.field = key.substr(0, dot);
    e.tag = key.substr(dot + 1);
    if (e.field != "u" && e.field != "phi" && e.field != "theta") throw ConfigError(c.line, 1, "unknown field '" + e.field + "'");
    if (e.tag.empty()) throw ConfigError(c.line, static_cast<int>(dot) + 2, "empty boundary tag");
    // split on blanks outside parentheses
    std::vector<std::pair<std::string, int>> toks;
    int depth = 0;
    std::string cur;
    int start = 0;
    for (std::size_t i = 0; i <= v.size(); ++i) {
      const char ch = i < v.size() ? v[i] : ' ';
      if ((ch == ' ' || ch == '\t') && depth == 0) {
        if (!cur.empty()) toks.emplace_back(cur, c.column + start);
        cur.clear();
        continue;
      }
      if (cur.empty()) start = static_cast<int>(i);
      if (ch == '(') ++depth;
      if (ch == ')') --depth;
      if (ch != ' ') cur += ch;
    }
    if (toks.empty()) throw ConfigError(c.line, c.column, "missing boundary condition kind");
    e.kind = toks[0].first;
    if (e.kind != "dirichlet" && e.kind != "neumann") throw ConfigError(c.line, toks[0].second, "kind must be dirichlet or neumann");
    const std::size_t ncomp = e.field == "u" ? 2 : 1;
    if (toks.size() != ncomp + 1) {
      throw ConfigError(c.line, c.column, "field " + e.field + " needs " + std::to_string(ncomp) + " value expression(s)");
    }
    for (std::size_t i = 1; i < toks.size(); ++i) {
      check_expr(toks[i].first, {c.line, toks[i].second}, true);
      e.values.push_back(toks[i].first);
    }
    for (auto& old : cfg.bc) {
      if (old.field == e.field && old.tag == e.tag) {
        old = e;
        return;
      }
    }
    cfg.bc.push_back(e);
  } else if (section == "solver") {
    auto& s = cfg.solver;
    if (key == "newton_tol") {
      s.newton_tol = to_double(v, c);
    } else if (key == "newton_max_iter") {
      s.newton_max_iter = to_int(v, c);
    } else if (key == "line_search") {
      try {
        parse_line_search(v);
      } catch (const std::exception& e) {
        throw ConfigError(c.line, c.column, e.what());
      }
      s.line_search = v;
    } else if (key == "linear_solver") {
      if (v != "direct" && v != "cg") throw ConfigError(c.line, c.column, "linear_solver must be direct or cg");
      s.linear_solver = v;
    } else if (key == "clip_damage") {
      s.clip_damage = to_bool(v, c);
    } else if (key == "freeze_damage") {
      s.freeze_damage = to_bool(v, c);
    } else if (key == "freeze_momentum") {
      s.freeze_momentum = to_bool(v, c);
    } else if (key == "freeze_heat") {
      s.freeze_heat = to_bool(v, c);
    } else {
      bad();
    }
  } else if (section == "analysis") {
    if (key == "ellipticity") {
      if (v != "coercive" && v != "inverse") throw ConfigError(c.line, c.column, "ellipticity must be coercive or inverse");
      cfg.analysis.ellipticity = v;
    } else if (key == "exact") {
      if (v != "none" && v != "mms-elastic" && v != "mms-heat") {
        throw ConfigError(c.line, c.column, "exact must be none, mms-elastic or mms-heat");
      }
      cfg.analysis.exact = v;
    } else {
      bad();
    }
  } else if (section == "output") {
    if (key == "dir") {
      cfg.output.dir = v;
    } else if (key == "snapshot_stride") {
      cfg.output.snapshot_stride = to_int(v, c);
    } else if (key == "vtk") {
      cfg.output.vtk = to_bool(v, c);
    } else {
      bad();
    }
  } else {
    bad();
  }
}

}  // namespace detail

/// Parses configuration text. Errors carry 1-based line and column.
inline RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream is(text);
  std::string raw;
  std::string section;
  int line = 0;
  bool seen_content = false;
  while (std::getline(is, raw)) {
    ++line;
    std::string s = raw;
    if (auto h = s.find('#'); h != std::string::npos) s = s.substr(0, h);
    const std::string t = detail::trim(s);
    if (t.empty()) continue;
    const int indent = static_cast<int>(s.find_first_not_of(" \t"));
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError(line, indent + static_cast<int>(t.size()), "expected ']'");
      section = detail::trim(t.substr(1, t.size() - 2));
      static const std::vector<std::string> known{"mesh", "material", "time", "data", "bc", "solver", "analysis", "output"};
      if (std::find(known.begin(), known.end(), section) == known.end()) {
        throw ConfigError(line, indent + 2, "unknown section [" + section + "]");
      }
      seen_content = true;
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(line, indent + 1, "expected 'key = value'");
    const std::string key = detail::trim(s.substr(0, eq));
    const std::string value = detail::trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError(line, indent + 1, "empty key");
    const auto vpos = s.find_first_not_of(" \t", eq + 1);
    const int vcol = vpos == std::string::npos ? static_cast<int>(eq) + 2 : static_cast<int>(vpos) + 1;
    if (value.empty()) throw ConfigError(line, vcol, "missing value for '" + key + "'");
    if (section.empty()) {
      if (key != "preset") throw ConfigError(line, indent + 1, "key '" + key + "' outside of a section");
      if (seen_content) throw ConfigError(line, indent + 1, "preset must come before any other setting");
      try {
        cfg = preset_config(value);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(line, vcol, e.what());
      }
      seen_content = true;
      continue;
    }
    detail::set_key(cfg, section, key, value, {line, vcol});
  }
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

/// Writes every setting explicitly; parse_config(serialize_config(c)) == c.
inline std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  const auto d = format_double;
  const auto b = [](bool v) { return v ? "true" : "false"; };
  os << "[mesh]\ndomain = " << c.mesh.domain << "\nkind = " << to_string(c.mesh.kind) << "\nn = " << c.mesh.n
     << "\nnotch_length = " << d(c.mesh.notch.length) << "\nnotch_thickness = " << d(c.mesh.notch.thickness)
     << "\nnotch_height = " << d(c.mesh.notch.height) << "\n\n";
  const auto& m = c.material;
  os << "[material]\nlambda = " << d(m.lambda) << "\nmu = " << d(m.mu) << "\nrho = " << d(m.rho) << "\nkappa = " << d(m.kappa)
     << "\nell = " << d(m.ell) << "\nell_over_h = " << d(m.ell_over_h) << "\nGc = " << d(m.Gc) << "\ngamma0 = " << d(m.gamma0)
     << "\nconductivity = " << m.conductivity << "\nK = " << d(m.K) << "\nc0 = " << d(m.c0) << "\nc1 = " << d(m.c1)
     << "\nc2 = " << d(m.c2) << "\nbeta = " << d(m.beta) << "\n\n";
  os << "[time]\nT = " << d(c.time.T) << "\nM = " << c.time.M << "\n\n";
  const auto& dt = c.data;
  os << "[data]\nf_x = " << dt.f_x << "\nf_y = " << dt.f_y << "\ngamma = " << dt.gamma << "\nu0_x = " << dt.u0_x
     << "\nu0_y = " << dt.u0_y << "\nv0_x = " << dt.v0_x << "\nv0_y = " << dt.v0_y << "\nphi0 = " << dt.phi0
     << "\ntheta0 = " << dt.theta0 << "\n\n";
  os << "[bc]\n";
  for (const auto& e : c.bc) {
    os << e.field << '.' << e.tag << " = " << e.kind;
    for (const auto& v : e.values) os << ' ' << v;
    os << '\n';
  }
  const auto& s = c.solver;
  os << "\n[solver]\nnewton_tol = " << d(s.newton_tol) << "\nnewton_max_iter = " << s.newton_max_iter
     << "\nline_search = " << s.line_search << "\nlinear_solver = " << s.linear_solver << "\nclip_damage = " << b(s.clip_damage)
     << "\nfreeze_damage = " << b(s.freeze_damage) << "\nfreeze_momentum = " << b(s.freeze_momentum)
     << "\nfreeze_heat = " << b(s.freeze_heat) << "\n\n";
  os << "[analysis]\nellipticity = " << c.analysis.ellipticity << "\nexact = " << c.analysis.exact << "\n\n";
  os << "[output]\ndir = " << c.output.dir << "\nsnapshot_stride = " << c.output.snapshot_stride << "\nvtk = " << b(c.output.vtk)
     << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

/// sens-notch: notched square with the experiment's material data.
/// zero: all data and initial fields zero.
/// mms-elastic / mms-heat: decoupled manufactured problems solved to a
/// steady state with one very long step.
inline RunConfig preset_config(const std::string& name) {
  RunConfig c;
  if (name == "sens-notch") {
    c.mesh = {"notched", CellKind::quadrilateral, 32, {0.5, 1e-3, 0.5}};
    c.material.lambda = 8.88e9;
    c.material.mu = 13.33e9;
    c.material.rho = 2e-6;
    c.material.kappa = 1e-8;
    c.material.ell_over_h = 2.0;
    c.material.Gc = 3.0e6;
    c.material.gamma0 = 1e4;
    c.material.conductivity = "constant";
    c.material.K = 0.158;
    c.time = {0.2, 200};
    c.data.phi0 = "const(1)";
    c.bc = {{"u", "bottom", "dirichlet", {"zero", "zero"}},
            {"u", "top", "dirichlet", {"zero", "step_ramp(1e-5)"}},
            {"theta", "notch_front", "neumann", {"const(300)"}}};
    c.output.dir = "out/sens-notch";
    return c;
  }
  if (name == "zero") {
    c.mesh = {"unit_square", CellKind::quadrilateral, 4, {}};
    c.time = {0.05, 5};
    c.data.phi0 = "zero";
    c.bc = {{"u", "bottom", "dirichlet", {"zero", "zero"}}};
    c.output.dir = "out/zero";
    c.output.snapshot_stride = 1;
    return c;
  }
  if (name == "mms-elastic") {
    c.mesh = {"unit_square", CellKind::quadrilateral, 8, {}};
    c.time = {1e6, 1};
    c.data.f_x = "mms_elastic_fx";
    c.data.f_y = "mms_elastic_fy";
    c.data.phi0 = "const(1)";
    c.bc = {{"u", "left", "dirichlet", {"zero", "zero"}},
            {"u", "right", "dirichlet", {"zero", "zero"}},
            {"u", "bottom", "dirichlet", {"zero", "zero"}},
            {"u", "top", "dirichlet", {"zero", "zero"}}};
    c.solver.freeze_damage = true;
    c.solver.freeze_heat = true;
    c.analysis.exact = "mms-elastic";
    c.output.dir = "out/mms-elastic";
    c.output.snapshot_stride = 1;
    return c;
  }
  if (name == "mms-heat") {
    c.mesh = {"unit_square", CellKind::quadrilateral, 8, {}};
    c.time = {1e6, 1};
    c.data.gamma = "mms_heat_source";
    c.data.phi0 = "const(1)";
    c.solver.freeze_damage = true;
    c.solver.freeze_momentum = true;
    c.analysis.exact = "mms-heat";
    c.output.dir = "out/mms-heat";
    c.output.snapshot_stride = 1;
    return c;
  }
  throw std::invalid_argument("unknown preset '" + name + "' (sens-notch, zero, mms-elastic, mms-heat)");
}

}  // namespace thermodamage
