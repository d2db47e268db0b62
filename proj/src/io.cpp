#include "wulff/io.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"
#include "wulff/errors.hpp"

namespace wulff {

const char* to_string(Scenario scenario) {
  switch (scenario) {
    case Scenario::NormIdentities: return "norm_identities";
    case Scenario::WulffIdentities: return "wulff_identities";
    case Scenario::SolveAndVerify: return "solve_and_verify";
    case Scenario::Converse: return "converse";
    case Scenario::ConvergenceStudy: return "convergence_study";
  }
  return "unknown";
}

Scenario parse_scenario(const std::string& name) {
  for (Scenario s : {Scenario::NormIdentities, Scenario::WulffIdentities, Scenario::SolveAndVerify, Scenario::Converse,
                     Scenario::ConvergenceStudy}) {
    if (name == to_string(s)) return s;
  }
  throw InvalidInput("unknown scenario '" + name + "'");
}

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Walks a parsed document, turning yaml-cpp failures into ConfigError with
// the dot path of the field. Fields set by overrides report line 0.
class Reader {
 public:
  explicit Reader(std::set<std::string> overridden) : overridden_(std::move(overridden)) {}

  int line(const YAML::Node& node, const std::string& path) const {
    for (const auto& o : overridden_) {
      if (path == o || path.rfind(o + ".", 0) == 0) return 0;
    }
    if (!node.IsDefined()) return 0;
    const YAML::Mark m = node.Mark();
    return m.line >= 0 ? m.line + 1 : 0;
  }

  [[noreturn]] void fail(const YAML::Node& node, const std::string& path, const std::string& message) const {
    throw ConfigError(path, line(node, path), message);
  }

  void require_map(const YAML::Node& node, const std::string& path) const {
    if (!node.IsMap()) fail(node, path, "expected a mapping");
  }

  void allow_keys(const YAML::Node& node, const std::string& path, std::initializer_list<const char*> keys) const {
    for (const auto& kv : node) {
      const std::string key = kv.first.as<std::string>();
      const bool known = std::any_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; });
      if (!known) {
        const std::string sub = path.empty() ? key : path + "." + key;
        throw ConfigError(sub, line(kv.first, sub), "unknown field");
      }
    }
  }

  template <class T>
  T as(const YAML::Node& node, const std::string& path, const char* what) const {
    if (!node.IsScalar()) fail(node, path, std::string("expected ") + what);
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      fail(node, path, std::string("expected ") + what);
    }
  }

  double number(const YAML::Node& node, const std::string& path) const {
    const double v = as<double>(node, path, "a number");
    if (!std::isfinite(v)) fail(node, path, "expected a finite number");
    return v;
  }

  int integer(const YAML::Node& node, const std::string& path) const { return as<int>(node, path, "an integer"); }

  std::vector<double> numbers(const YAML::Node& node, const std::string& path) const {
    if (!node.IsSequence()) fail(node, path, "expected a list of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < node.size(); ++i) out.push_back(number(node[i], path + "[" + std::to_string(i) + "]"));
    return out;
  }

  Vec2 point(const YAML::Node& node, const std::string& path) const {
    const auto v = numbers(node, path);
    if (v.size() != 2) fail(node, path, "expected two coordinates");
    return {v[0], v[1]};
  }

  NormSpec norm(const YAML::Node& node, const std::string& path) const {
    require_map(node, path);
    allow_keys(node, path, {"family", "dimension", "A", "p", "fourier"});
    const YAML::Node fam = node["family"];
    if (!fam) fail(node, path + ".family", "missing required field");
    const std::string family = lower(as<std::string>(fam, path + ".family", "a family name"));
    int dim = 2;
    if (node["dimension"]) {
      dim = integer(node["dimension"], path + ".dimension");
      if (dim < 2 || dim > 3) fail(node["dimension"], path + ".dimension", "dimension must be 2 or 3");
    }
    try {
      if (family == "euclidean") return NormSpec::euclidean(dim);
      if (family == "quadratic") {
        const YAML::Node a = node["A"];
        if (!a) fail(node, path + ".A", "missing required field for quadratic norms");
        const auto v = numbers(a, path + ".A");
        const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(v.size()))));
        if (n * n != static_cast<int>(v.size()) || n < 2) fail(a, path + ".A", "expected n*n entries in row-major order");
        Mat m(n, n);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) m(i, j) = v[i * n + j];
        return NormSpec::quadratic(m);
      }
      if (family == "pnorm") {
        const YAML::Node p = node["p"];
        if (!p) fail(node, path + ".p", "missing required field for pnorm");
        return NormSpec::pnorm(number(p, path + ".p"), dim);
      }
      if (family == "fourier2d") {
        const YAML::Node f = node["fourier"];
        if (!f || !f.IsSequence()) fail(f ? f : node, path + ".fourier", "expected a list of [k, a, b] terms");
        std::vector<FourierTerm> terms;
        for (std::size_t i = 0; i < f.size(); ++i) {
          const std::string sub = path + ".fourier[" + std::to_string(i) + "]";
          const auto t = numbers(f[i], sub);
          if (t.size() < 2 || t.size() > 3) fail(f[i], sub, "expected [k, a] or [k, a, b]");
          if (t[0] != std::floor(t[0])) fail(f[i], sub, "harmonic index must be an integer");
          terms.push_back({static_cast<int>(t[0]), t[1], t.size() == 3 ? t[2] : 0.0});
        }
        return NormSpec::fourier2d(std::move(terms));
      }
    } catch (const InvalidInput& e) {
      fail(node, path, e.what());
    }
    fail(fam, path + ".family", "unknown family '" + family + "' (euclidean, quadratic, pnorm, fourier2d)");
  }

  DomainDescriptor domain(const YAML::Node& node, const std::string& path,
                          const std::optional<NormSpec>& default_norm) const {
    require_map(node, path);
    const YAML::Node kind_node = node["kind"];
    if (!kind_node) fail(node, path + ".kind", "missing required field");
    const std::string kind = lower(as<std::string>(kind_node, path + ".kind", "a domain kind"));
    Vec2 center = Vec2::Zero();
    if (node["center"]) center = point(node["center"], path + ".center");
    auto positive = [&](const char* key, double fallback) {
      const YAML::Node v = node[key];
      if (!v) return fallback;
      const double x = number(v, path + "." + key);
      if (x <= 0.0) fail(v, path + "." + key, "must be positive");
      return x;
    };
    if (kind == "square") {
      allow_keys(node, path, {"kind", "side", "center"});
      return square(positive("side", 1.0), center);
    }
    if (kind == "polygon") {
      allow_keys(node, path, {"kind", "vertices"});
      const YAML::Node v = node["vertices"];
      if (!v || !v.IsSequence()) fail(v ? v : node, path + ".vertices", "expected a list of [x, y] points");
      Polygon poly;
      for (std::size_t i = 0; i < v.size(); ++i) poly.vertices.push_back(point(v[i], path + ".vertices[" + std::to_string(i) + "]"));
      if (poly.vertices.size() < 3) fail(v, path + ".vertices", "a polygon needs at least three vertices");
      return poly;
    }
    if (kind == "disk") {
      allow_keys(node, path, {"kind", "radius", "center"});
      const double r = positive("radius", 1.0);
      return Ellipse{Mat2::Identity() / (r * r), center};
    }
    if (kind == "ellipse") {
      allow_keys(node, path, {"kind", "matrix", "center"});
      const YAML::Node m = node["matrix"];
      if (!m) fail(node, path + ".matrix", "missing required field");
      const auto v = numbers(m, path + ".matrix");
      if (v.size() != 4) fail(m, path + ".matrix", "expected four entries in row-major order");
      Mat2 mat;
      mat << v[0], v[1], v[2], v[3];
      return Ellipse{mat, center};
    }
    if (kind == "wulff_ball") {
      allow_keys(node, path, {"kind", "radius", "center", "norm"});
      const double r = positive("radius", 1.0);
      if (node["norm"]) return WulffBall{norm(node["norm"], path + ".norm"), r, center};
      if (!default_norm) fail(node, path + ".norm", "wulff_ball needs a norm");
      return WulffBall{*default_norm, r, center};
    }
    fail(kind_node, path + ".kind", "unknown kind '" + kind + "' (square, polygon, disk, ellipse, wulff_ball)");
  }

 private:
  std::set<std::string> overridden_;
};

YAML::Node load_yaml(const std::string& text) {
  try {
    return YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("<document>", e.mark.line + 1, e.msg);
  }
}

// Applies "a.b.c=value" to the tree; the value is parsed as YAML so lists work.
std::string apply_override(YAML::Node& root, const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError(text, 0, "override must have the form key=value");
  const std::string path = text.substr(0, eq);
  YAML::Node value;
  try {
    value = YAML::Load(text.substr(eq + 1));
  } catch (const YAML::Exception& e) {
    throw ConfigError(path, 0, "unparseable override value: " + e.msg);
  }
  std::vector<std::string> keys;
  std::stringstream ss(path);
  for (std::string k; std::getline(ss, k, '.');) {
    if (k.empty()) throw ConfigError(path, 0, "empty path segment");
    keys.push_back(k);
  }
  if (!root.IsMap() && !root.IsNull()) throw ConfigError(path, 0, "document root is not a mapping");
  std::vector<YAML::Node> chain{root};
  for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
    YAML::Node next = chain.back()[keys[i]];
    if (next.IsDefined() && !next.IsMap() && !next.IsNull()) throw ConfigError(path, 0, "'" + keys[i] + "' is not a mapping");
    chain.push_back(next);
  }
  chain.back()[keys.back()] = value;
  return path;
}

RunConfig read_config(const YAML::Node& root, const Reader& rd) {
  if (!root.IsMap()) throw ConfigError("<document>", 1, "expected a mapping at the top level");
  rd.allow_keys(root, "", {"scenario", "seed", "threads", "output_dir", "norm", "domain", "resolution", "solver",
                           "verifier", "study"});
  RunConfig c;
  const YAML::Node sc = root["scenario"];
  if (!sc) throw ConfigError("scenario", 0, "missing required field");
  try {
    c.scenario = parse_scenario(rd.as<std::string>(sc, "scenario", "a scenario name"));
  } catch (const InvalidInput& e) {
    rd.fail(sc, "scenario", e.what());
  }
  if (root["seed"]) {
    const long long s = rd.as<long long>(root["seed"], "seed", "an integer");
    if (s < 0) rd.fail(root["seed"], "seed", "must be non-negative");
    c.seed = static_cast<std::uint64_t>(s);
  }
  if (root["threads"]) {
    c.threads = rd.integer(root["threads"], "threads");
    if (c.threads < 1) rd.fail(root["threads"], "threads", "must be at least 1");
  }
  if (root["output_dir"]) c.output_dir = rd.as<std::string>(root["output_dir"], "output_dir", "a path");

  const YAML::Node norm = root["norm"];
  if (!norm) throw ConfigError("norm", 0, "missing required field");
  c.norm = rd.norm(norm, "norm");
  if (c.scenario != Scenario::NormIdentities && c.norm->dimension() != 2) {
    rd.fail(norm, "norm.dimension", "scenario " + std::string(to_string(c.scenario)) + " is planar only");
  }
  if (root["domain"]) {
    try {
      c.domain = rd.domain(root["domain"], "domain", c.norm);
    } catch (const InvalidInput& e) {
      rd.fail(root["domain"], "domain", e.what());
    }
  } else if (c.scenario == Scenario::Converse) {
    throw ConfigError("domain", 0, "missing required field for scenario converse");
  }

  if (const YAML::Node r = root["resolution"]) {
    rd.require_map(r, "resolution");
    rd.allow_keys(r, "resolution", {"grid_h", "source_nodes", "target_nodes", "boundary_nodes"});
    if (r["grid_h"]) c.resolution.grid_h = rd.number(r["grid_h"], "resolution.grid_h");
    if (r["source_nodes"]) c.resolution.source_nodes = rd.integer(r["source_nodes"], "resolution.source_nodes");
    if (r["target_nodes"]) c.resolution.target_nodes = rd.integer(r["target_nodes"], "resolution.target_nodes");
    if (r["boundary_nodes"]) c.resolution.boundary_nodes = rd.integer(r["boundary_nodes"], "resolution.boundary_nodes");
    if (c.resolution.grid_h <= 0.0) rd.fail(r["grid_h"], "resolution.grid_h", "must be positive");
    if (c.resolution.source_nodes <= 0) rd.fail(r["source_nodes"], "resolution.source_nodes", "must be positive");
    if (c.resolution.target_nodes < 100) rd.fail(r["target_nodes"], "resolution.target_nodes", "must be at least 100");
    if (c.resolution.boundary_nodes < 8) rd.fail(r["boundary_nodes"], "resolution.boundary_nodes", "must be at least 8");
  }
  c.solver.source_nodes = c.resolution.source_nodes;
  c.solver.target_nodes = c.resolution.target_nodes;

  if (const YAML::Node s = root["solver"]) {
    rd.require_map(s, "solver");
    rd.allow_keys(s, "solver", {"eps_final", "marginal_tol", "max_sweeps"});
    if (s["eps_final"]) c.solver.eps_final = rd.number(s["eps_final"], "solver.eps_final");
    if (s["marginal_tol"]) {
      c.solver.marginal_tol = rd.number(s["marginal_tol"], "solver.marginal_tol");
      if (c.solver.marginal_tol <= 0.0) rd.fail(s["marginal_tol"], "solver.marginal_tol", "must be positive");
    }
    if (s["max_sweeps"]) {
      c.solver.max_sweeps = rd.integer(s["max_sweeps"], "solver.max_sweeps");
      if (c.solver.max_sweeps < 1) rd.fail(s["max_sweeps"], "solver.max_sweeps", "must be positive");
    }
  }

  if (const YAML::Node v = root["verifier"]) {
    rd.require_map(v, "verifier");
    rd.allow_keys(v, "verifier", {"identity_points", "exclusion", "axis_band", "radial_target_nodes", "refine_factor"});
    auto& s = c.verifier;
    if (v["identity_points"]) s.identity_points = rd.integer(v["identity_points"], "verifier.identity_points");
    if (v["exclusion"]) s.exclusion = rd.number(v["exclusion"], "verifier.exclusion");
    if (v["axis_band"]) s.axis_band = rd.number(v["axis_band"], "verifier.axis_band");
    if (v["radial_target_nodes"]) s.radial_target_nodes = rd.integer(v["radial_target_nodes"], "verifier.radial_target_nodes");
    if (v["refine_factor"]) s.refine_factor = rd.number(v["refine_factor"], "verifier.refine_factor");
    if (s.identity_points < 1) rd.fail(v["identity_points"], "verifier.identity_points", "must be positive");
    if (s.exclusion < 0.0) rd.fail(v["exclusion"], "verifier.exclusion", "must be non-negative");
    if (s.radial_target_nodes < 100) rd.fail(v["radial_target_nodes"], "verifier.radial_target_nodes", "must be at least 100");
    if (s.refine_factor <= 1.0) rd.fail(v["refine_factor"], "verifier.refine_factor", "must exceed 1");
  }

  if (const YAML::Node st = root["study"]) {
    rd.require_map(st, "study");
    rd.allow_keys(st, "study", {"h"});
    if (st["h"]) {
      c.study_h = rd.numbers(st["h"], "study.h");
      for (double h : c.study_h) {
        if (h <= 0.0) rd.fail(st["h"], "study.h", "spacings must be positive");
      }
    }
  }
  if (c.scenario == Scenario::ConvergenceStudy && c.study_h.size() < 2) {
    throw ConfigError("study.h", rd.line(root["study"], "study.h"), "a convergence study needs at least two spacings");
  }
  return c;
}

void emit_norm(YAML::Emitter& out, const NormSpec& spec) {
  out << YAML::BeginMap;
  switch (spec.family()) {
    case NormFamily::Euclidean: out << YAML::Key << "family" << YAML::Value << "euclidean"; break;
    case NormFamily::Quadratic: {
      out << YAML::Key << "family" << YAML::Value << "quadratic";
      out << YAML::Key << "A" << YAML::Value << YAML::Flow << YAML::BeginSeq;
      const Mat& a = spec.matrix();
      for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) out << a(i, j);
      out << YAML::EndSeq;
      break;
    }
    case NormFamily::PNorm:
      out << YAML::Key << "family" << YAML::Value << "pnorm" << YAML::Key << "p" << YAML::Value << spec.p();
      break;
    case NormFamily::Fourier2D:
      out << YAML::Key << "family" << YAML::Value << "fourier2d";
      out << YAML::Key << "fourier" << YAML::Value << YAML::BeginSeq;
      for (const auto& t : spec.fourier_terms()) out << YAML::Flow << YAML::BeginSeq << t.k << t.a << t.b << YAML::EndSeq;
      out << YAML::EndSeq;
      break;
  }
  out << YAML::Key << "dimension" << YAML::Value << spec.dimension();
  out << YAML::EndMap;
}

void emit_point(YAML::Emitter& out, const Vec2& p) { out << YAML::Flow << YAML::BeginSeq << p.x() << p.y() << YAML::EndSeq; }

void emit_domain(YAML::Emitter& out, const DomainDescriptor& d) {
  out << YAML::BeginMap;
  if (const auto* poly = std::get_if<Polygon>(&d)) {
    out << YAML::Key << "kind" << YAML::Value << "polygon" << YAML::Key << "vertices" << YAML::Value << YAML::BeginSeq;
    for (const auto& v : poly->vertices) emit_point(out, v);
    out << YAML::EndSeq;
  } else if (const auto* ball = std::get_if<WulffBall>(&d)) {
    out << YAML::Key << "kind" << YAML::Value << "wulff_ball" << YAML::Key << "radius" << YAML::Value << ball->radius;
    out << YAML::Key << "center" << YAML::Value;
    emit_point(out, ball->center);
    out << YAML::Key << "norm" << YAML::Value;
    emit_norm(out, ball->norm);
  } else if (const auto* e = std::get_if<Ellipse>(&d)) {
    out << YAML::Key << "kind" << YAML::Value << "ellipse" << YAML::Key << "matrix" << YAML::Value << YAML::Flow
        << YAML::BeginSeq << e->matrix(0, 0) << e->matrix(0, 1) << e->matrix(1, 0) << e->matrix(1, 1) << YAML::EndSeq;
    out << YAML::Key << "center" << YAML::Value;
    emit_point(out, e->center);
  }
  out << YAML::EndMap;
}

std::string finish(const YAML::Emitter& out) {
  if (!out.good()) throw Error("YAML emitter failed: " + out.GetLastError());
  return std::string(out.c_str()) + "\n";
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
  YAML::Node root = load_yaml(text);
  if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  std::set<std::string> touched;
  for (const auto& o : overrides) touched.insert(apply_override(root, o));
  return read_config(root, Reader(std::move(touched)));
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides);
}

NormSpec norm_from_yaml(const std::string& text) { return Reader({}).norm(load_yaml(text), "norm"); }

DomainDescriptor domain_from_yaml(const std::string& text, const std::optional<NormSpec>& default_norm) {
  return Reader({}).domain(load_yaml(text), "domain", default_norm);
}

std::string to_yaml(const NormSpec& spec) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  emit_norm(out, spec);
  return finish(out);
}

std::string to_yaml(const DomainDescriptor& descriptor) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  emit_domain(out, descriptor);
  return finish(out);
}

std::string to_yaml(const RunConfig& c) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "scenario" << YAML::Value << to_string(c.scenario);
  out << YAML::Key << "seed" << YAML::Value << static_cast<unsigned long long>(c.seed);
  out << YAML::Key << "threads" << YAML::Value << c.threads;
  if (!c.output_dir.empty()) out << YAML::Key << "output_dir" << YAML::Value << c.output_dir;
  if (c.norm) {
    out << YAML::Key << "norm" << YAML::Value;
    emit_norm(out, *c.norm);
  }
  if (c.domain) {
    out << YAML::Key << "domain" << YAML::Value;
    emit_domain(out, *c.domain);
  }
  out << YAML::Key << "resolution" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "grid_h" << YAML::Value << c.resolution.grid_h;
  out << YAML::Key << "source_nodes" << YAML::Value << c.resolution.source_nodes;
  out << YAML::Key << "target_nodes" << YAML::Value << c.resolution.target_nodes;
  out << YAML::Key << "boundary_nodes" << YAML::Value << c.resolution.boundary_nodes;
  out << YAML::EndMap;
  out << YAML::Key << "solver" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "eps_final" << YAML::Value << c.solver.eps_final;
  out << YAML::Key << "marginal_tol" << YAML::Value << c.solver.marginal_tol;
  out << YAML::Key << "max_sweeps" << YAML::Value << c.solver.max_sweeps;
  out << YAML::EndMap;
  out << YAML::Key << "verifier" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "identity_points" << YAML::Value << c.verifier.identity_points;
  out << YAML::Key << "exclusion" << YAML::Value << c.verifier.exclusion;
  out << YAML::Key << "axis_band" << YAML::Value << c.verifier.axis_band;
  out << YAML::Key << "radial_target_nodes" << YAML::Value << c.verifier.radial_target_nodes;
  out << YAML::Key << "refine_factor" << YAML::Value << c.verifier.refine_factor;
  out << YAML::EndMap;
  out << YAML::Key << "study" << YAML::Value << YAML::BeginMap << YAML::Key << "h" << YAML::Value << YAML::Flow
      << YAML::BeginSeq;
  for (double h : c.study_h) out << h;
  out << YAML::EndSeq << YAML::EndMap;
  out << YAML::EndMap;
  return finish(out);
}

std::string grid_to_text(const GridFunction& grid) {
  const auto& g = grid.grid();
  std::string s = std::to_string(g.dimension());
  for (int a = 0; a < g.dimension(); ++a) s += " " + num(g.origin[a]);
  for (int a = 0; a < g.dimension(); ++a) s += " " + num(g.spacing[a]);
  for (int a = 0; a < g.dimension(); ++a) s += " " + std::to_string(g.shape[a]);
  s += "\n";
  for (std::size_t k = 0; k < grid.size(); ++k) s += num(grid[k]) + " " + (grid.masked(k) ? "1" : "0") + "\n";
  return s;
}

GridFunction grid_from_text(const std::string& text) {
  std::istringstream in(text);
  int dim = 0;
  if (!(in >> dim) || dim < 1 || dim > 3) throw InvalidInput("grid text: bad dimension in header");
  GridDescriptor g;
  g.origin.resize(dim);
  g.spacing.resize(dim);
  g.shape.resize(dim);
  for (int a = 0; a < dim; ++a) {
    if (!(in >> g.origin[a])) throw InvalidInput("grid text: bad origin in header");
  }
  for (int a = 0; a < dim; ++a) {
    if (!(in >> g.spacing[a])) throw InvalidInput("grid text: bad spacing in header");
  }
  for (int a = 0; a < dim; ++a) {
    if (!(in >> g.shape[a])) throw InvalidInput("grid text: bad shape in header");
  }
  const std::size_t n = g.size();
  std::vector<double> values(n);
  std::vector<std::uint8_t> mask(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::string v;
    int m = 0;
    if (!(in >> v >> m)) throw InvalidInput("grid text: expected " + std::to_string(n) + " value lines");
    try {
      values[k] = std::stod(v);
    } catch (const std::exception&) {
      throw InvalidInput("grid text: unreadable value '" + v + "'");
    }
    mask[k] = m != 0;
  }
  return GridFunction(std::move(g), std::move(values), std::move(mask));
}

DataTable grid_table(const std::string& name, const GridFunction& grid, const std::string& value_column) {
  DataTable t{name, {}, {}};
  const int dim = grid.dimension();
  static const char* axes[] = {"x", "y", "z"};
  for (int a = 0; a < dim; ++a) t.columns.push_back(axes[a]);
  t.columns.push_back(value_column);
  t.columns.push_back("mask");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Vec x = grid.node(k);
    std::vector<double> row(x.data(), x.data() + dim);
    row.push_back(grid[k]);
    row.push_back(grid.masked(k) ? 1.0 : 0.0);
    t.rows.push_back(std::move(row));
  }
  return t;
}

DataTable interior_table(const DiscreteDomain& domain) {
  DataTable t{"interior_nodes", {"x", "y", "w"}, {}};
  for (const auto& n : domain.interior()) t.rows.push_back({n.point.x(), n.point.y(), n.weight});
  return t;
}

DataTable boundary_table(const DiscreteDomain& domain) {
  DataTable t{"boundary_nodes", {"x", "y", "nx", "ny", "w"}, {}};
  for (const auto& n : domain.boundary()) t.rows.push_back({n.point.x(), n.point.y(), n.normal.x(), n.normal.y(), n.weight});
  return t;
}

DataTable trace_table(const std::string& name, const BoundaryStats& stats) {
  DataTable t{name, {"arc", "u", "H_grad_u"}, {}};
  for (const auto& r : stats.trace) t.rows.push_back({r.arc, r.u, r.h_grad});
  return t;
}

DataTable map_table(const TransportSolution& solution) {
  DataTable t{"transport_map", {"x", "y", "map_x", "map_y", "u"}, {}};
  const auto images = solution.source_map();
  const auto& pts = solution.source().points;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    t.rows.push_back({pts[i].x(), pts[i].y(), images[i].x(), images[i].y(), solution.potential(pts[i])});
  }
  return t;
}

DataTable convergence_table(const std::vector<double>& h, const std::vector<double>& error) {
  if (h.size() != error.size()) throw InvalidInput("convergence table: h and error differ in length");
  DataTable t{"convergence", {"h", "error", "order"}, {}};
  for (std::size_t k = 0; k < h.size(); ++k) {
    const double order = k == 0 ? std::numeric_limits<double>::quiet_NaN()
                                : std::log(error[k - 1] / error[k]) / std::log(h[k - 1] / h[k]);
    t.rows.push_back({h[k], error[k], order});
  }
  return t;
}

std::string to_csv(const DataTable& table) {
  std::string s;
  for (std::size_t c = 0; c < table.columns.size(); ++c) s += (c ? "," : "") + table.columns[c];
  s += "\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) s += (c ? "," : "") + num(row[c]);
    s += "\n";
  }
  return s;
}

std::string report_json(const ScenarioResult& result, const RunConfig& config) {
  using nlohmann::json;
  auto finite_or_null = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  json checks = json::array();
  for (const auto& c : result.checks) {
    checks.push_back({{"name", c.name},
                      {"lhs", finite_or_null(c.lhs)},
                      {"rhs", finite_or_null(c.rhs)},
                      {"relation", to_string(c.relation)},
                      {"abs_err", finite_or_null(c.abs_err)},
                      {"rel_err", finite_or_null(c.rel_err)},
                      {"tol", finite_or_null(c.tol)},
                      {"pass", c.pass},
                      {"notes", c.notes}});
  }
  json tables = json::array();
  for (const auto& t : result.tables) tables.push_back({{"name", t.name}, {"file", t.name + ".csv"}, {"rows", t.rows.size()}});
  json doc = {{"scenario", to_string(result.scenario)},
              {"pass", result.pass()},
              {"seed", config.seed},
              {"threads", config.threads},
              {"seconds", result.seconds},
              {"norm", config.norm ? to_string(config.norm->family()) : "none"},
              {"domain", config.domain ? kind_name(*config.domain) : "default"},
              {"checks", checks},
              {"tables", tables},
              {"notes", result.notes}};
  return doc.dump(2) + "\n";
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

}  // namespace

void write_outputs(const ScenarioResult& result, const RunConfig& config, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error("cannot create output directory '" + dir + "'");
  const fs::path base(dir);
  write_file(base / "report.json", report_json(result, config));
  write_file(base / "config.yaml", to_yaml(config));
  std::string checks = "name,relation,lhs,rhs,abs_err,rel_err,tol,pass,notes\n";
  std::string summary;
  for (const auto& c : result.checks) {
    checks += csv_field(c.name) + "," + to_string(c.relation) + "," + num(c.lhs) + "," + num(c.rhs) + "," +
              num(c.abs_err) + "," + num(c.rel_err) + "," + num(c.tol) + "," + (c.pass ? "1" : "0") + "," +
              csv_field(c.notes) + "\n";
    summary += summary_line(c) + "\n";
  }
  summary += std::string("RESULT ") + (result.pass() ? "PASS" : "FAIL") + " " + to_string(result.scenario) + "\n";
  write_file(base / "checks.csv", checks);
  write_file(base / "summary.txt", summary);
  for (const auto& t : result.tables) write_file(base / (t.name + ".csv"), to_csv(t));
}

}  // namespace wulff
