#pragma once
// Run configuration: a versioned JSON document selecting pipelines, the
// potential family or catalog surface, grids, the integration step, and
// tolerance overrides. Parsing is strict: duplicate keys are a ParseError,
// keys outside the documented schema are a ValidationError.

#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "liesphere/core.hpp"
#include "liesphere/errors.hpp"
#include "liesphere/potentials.hpp"

namespace liesphere::cli {

enum class Pipeline { check_gc, integrate, surface, landau, euclid_roundtrip, wilczynski };

inline constexpr std::array<const char*, 6> kPipelineNames = {
    "check-gc", "integrate", "surface", "landau", "euclid-roundtrip", "wilczynski"};

inline const char* pipeline_name(Pipeline p) {
  return kPipelineNames[static_cast<size_t>(p)];
}

inline std::optional<Pipeline> pipeline_from(const std::string& name) {
  for (size_t i = 0; i < kPipelineNames.size(); ++i)
    if (name == kPipelineNames[i]) return static_cast<Pipeline>(i);
  return std::nullopt;
}

// check names whose tolerances may be overridden via the "tolerances" object
inline const std::set<std::string>& known_checks() {
  static const std::set<std::string> names = {
      "gc-residual", "gram-drift", "det-drift",  "holonomy",         "theorem1",
      "canal-dv2",   "lie6",       "eigen-h",    "eigen-f",          "wronskian",
      "z0",          "r0",         "lie-quadric", "metric-roundtrip", "table",
      "plucker-system", "laplace", "magnetic-identity"};
  return names;
}

struct FamilyConfig {
  std::string kind = "c0";
  // quadratic-curve (c=0) family
  std::array<double, 3> eps{0.3, 0.7, -0.4};
  double alpha = 0;
  std::array<double, 2> rho{1, 1}, s{0, 0};
  std::array<double, 2> psi1{1, 0}, psi2{1, 0};
  double ode_step = kDefaultOdeStep;
  // sphere (c=1) family: metric polynomials in increasing degree
  std::vector<double> f1{0, -4, 0, 4}, f2{0, 4, 0, -4};
  // canal family
  double M = 1, lambda = 0.5, k = 1;
};

struct LandauConfig {
  double M = 1, lambda = 0.5, k = 1;
  bool closed_form = true;
  double ymin = -0.8, ymax = 0.8;
  int samples = 161;
  Rect window{-0.8, 0.8, 0.0, 1.0};  // operator grid, axes (y, x)
  int n1 = 41, n2 = 41;
};

struct EuclidConfig {
  std::string kind = "ellipsoid";
  std::vector<double> params{3, 2, 1};
  Rect domain{2.2, 2.8, 5.8, 7.2};
  int n1 = 41, n2 = 41;
  Rect extract_domain{1.9, 3.1, 5.3, 7.7};
  int extract_n1 = 61, extract_n2 = 61;
  double h = 5e-3;
};

struct WilczynskiConfig {
  Rect domain{0.5, 1.5, 0.5, 1.5};
  Rect window{0.5, 1.0, 0.5, 1.0};
  int n1 = 41, n2 = 41;
  double h = kDefaultOdeStep;
};

struct RunConfig {
  int schema = 1;
  std::vector<Pipeline> pipelines;
  FamilyConfig family;
  Rect domain{0.25, 1.25, 0.25, 1.25};
  int n1 = 41, n2 = 41;
  double h = kDefaultOdeStep;
  std::map<std::string, double> tolerances;
  LandauConfig landau;
  EuclidConfig euclid;
  WilczynskiConfig wilczynski;
  std::string out = "liesphere-out";
};

namespace detail {

using json = nlohmann::json;

// DOM builder that rejects duplicate object keys during the SAX walk
class StrictSax : public nlohmann::detail::json_sax_dom_parser<json> {
 public:
  explicit StrictSax(json& j) : nlohmann::detail::json_sax_dom_parser<json>(j, true) {}

  bool start_object(std::size_t n) {
    keys_.emplace_back();
    return nlohmann::detail::json_sax_dom_parser<json>::start_object(n);
  }
  bool end_object() {
    keys_.pop_back();
    return nlohmann::detail::json_sax_dom_parser<json>::end_object();
  }
  bool key(json::string_t& s) {
    if (!keys_.back().insert(s).second)
      throw ParseError("config: duplicate key '" + s + "'");
    return nlohmann::detail::json_sax_dom_parser<json>::key(s);
  }

 private:
  std::vector<std::set<std::string>> keys_;
};

// tracks which keys of an object were consumed; leftovers are schema errors
class ObjView {
 public:
  ObjView(const json& o, std::string path) : o_(o), path_(std::move(path)) {
    if (!o_.is_object())
      throw ValidationError("config: " + path_ + " must be an object");
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = o_.find(key);
    return it == o_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (const auto& item : o_.items())
      if (!seen_.count(item.key()))
        throw ValidationError("config: unknown key '" + item.key() + "' in " + path_);
  }

  const std::string& path() const { return path_; }

 private:
  const json& o_;
  std::string path_;
  std::set<std::string> seen_;
};

inline double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ValidationError("config: " + path + " must be a number");
  return v.get<double>();
}

inline int as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ValidationError("config: " + path + " must be an integer");
  return v.get<int>();
}

inline double number_or(ObjView& o, const std::string& key, double def) {
  const json* v = o.find(key);
  return v ? as_number(*v, o.path() + "." + key) : def;
}

inline int int_or(ObjView& o, const std::string& key, int def) {
  const json* v = o.find(key);
  return v ? as_int(*v, o.path() + "." + key) : def;
}

inline bool bool_or(ObjView& o, const std::string& key, bool def) {
  const json* v = o.find(key);
  if (!v) return def;
  if (!v->is_boolean())
    throw ValidationError("config: " + o.path() + "." + key + " must be a boolean");
  return v->get<bool>();
}

inline std::string string_or(ObjView& o, const std::string& key, const std::string& def) {
  const json* v = o.find(key);
  if (!v) return def;
  if (!v->is_string())
    throw ValidationError("config: " + o.path() + "." + key + " must be a string");
  return v->get<std::string>();
}

inline std::vector<double> numbers(const json& v, const std::string& path) {
  if (!v.is_array()) throw ValidationError("config: " + path + " must be an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (size_t i = 0; i < v.size(); ++i)
    out.push_back(as_number(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

template <size_t N>
std::array<double, N> fixed_or(ObjView& o, const std::string& key,
                               const std::array<double, N>& def) {
  const json* v = o.find(key);
  if (!v) return def;
  const auto vals = numbers(*v, o.path() + "." + key);
  if (vals.size() != N)
    throw ValidationError("config: " + o.path() + "." + key + " must have " +
                          std::to_string(N) + " entries");
  std::array<double, N> out;
  for (size_t i = 0; i < N; ++i) out[i] = vals[i];
  return out;
}

inline Rect rect_or(ObjView& o, const std::string& key, const Rect& def, bool* set = nullptr) {
  const json* v = o.find(key);
  if (!v) {
    if (set) *set = false;
    return def;
  }
  if (set) *set = true;
  const auto raw = numbers(*v, o.path() + "." + key);
  if (raw.size() != 4)
    throw ValidationError("config: " + o.path() + "." + key +
                          " must be [r1min, r1max, r2min, r2max]");
  Rect r{raw[0], raw[1], raw[2], raw[3]};
  if (r.span1() <= 0 || r.span2() <= 0)
    throw ValidationError("config: " + o.path() + "." + key + " must have positive spans");
  return r;
}

inline void grid_or(ObjView& o, const std::string& key, int& n1, int& n2) {
  const json* v = o.find(key);
  if (!v) return;
  const auto raw = numbers(*v, o.path() + "." + key);
  if (raw.size() != 2)
    throw ValidationError("config: " + o.path() + "." + key + " must be [n1, n2]");
  n1 = as_int((*v)[0], o.path() + "." + key + "[0]");
  n2 = as_int((*v)[1], o.path() + "." + key + "[1]");
}

}  // namespace detail

// whether the pipeline evaluates 4th-order stencils (and so needs >= 9 nodes
// per axis on its grid)
inline bool needs_stencil(Pipeline p) {
  switch (p) {
    case Pipeline::check_gc:
    case Pipeline::integrate: return false;
    default: return true;
  }
}

inline bool requested(const RunConfig& c, Pipeline p) {
  for (Pipeline q : c.pipelines)
    if (q == p) return true;
  return false;
}

// invariants that depend on the requested pipeline set; called by
// load_config and again after the command line narrows the selection
inline void validate_config(const RunConfig& c) {
  if (c.schema != 1)
    throw ValidationError("config: schema must be 1, got " + std::to_string(c.schema));
  std::set<Pipeline> seen;
  for (Pipeline p : c.pipelines)
    if (!seen.insert(p).second)
      throw ValidationError(std::string("config: pipeline '") + pipeline_name(p) +
                            "' listed twice");
  for (const auto& [name, value] : c.tolerances) {
    if (!known_checks().count(name))
      throw ValidationError("config: unknown check '" + name + "' in tolerances");
    if (!(value > 0))
      throw ValidationError("config: tolerance for '" + name + "' must be positive");
  }
  if (!(c.h > 0) || !(c.euclid.h > 0) || !(c.wilczynski.h > 0))
    throw ValidationError("config: integration steps must be positive");
  if (c.n1 < 2 || c.n2 < 2 || c.landau.n1 < 2 || c.landau.n2 < 2 || c.euclid.n1 < 2 ||
      c.euclid.n2 < 2 || c.euclid.extract_n1 < 2 || c.euclid.extract_n2 < 2 ||
      c.wilczynski.n1 < 2 || c.wilczynski.n2 < 2)
    throw ValidationError("config: grids need at least 2 nodes per axis");
  if (c.landau.samples < 2)
    throw ValidationError("config: landau.samples must be at least 2");
  if (!(c.landau.ymax > c.landau.ymin))
    throw ValidationError("config: landau profile range must have positive length");
  if (c.landau.closed_form && c.landau.lambda != 0.5)
    throw ValidationError("config: the closed-form landau basis exists at lambda = 1/2 only");

  auto stencil_grid = [](int n1, int n2, const std::string& what) {
    if (n1 < 9 || n2 < 9)
      throw ValidationError("config: " + what +
                            " runs 4th-order stencils and needs a grid of at least 9x9");
  };
  if (requested(c, Pipeline::surface)) stencil_grid(c.n1, c.n2, "surface");
  if (requested(c, Pipeline::landau))
    stencil_grid(c.landau.n1, c.landau.n2, "landau");
  if (requested(c, Pipeline::euclid_roundtrip)) {
    stencil_grid(c.euclid.n1, c.euclid.n2, "euclid-roundtrip");
    stencil_grid(c.euclid.extract_n1, c.euclid.extract_n2, "euclid-roundtrip extraction");
  }
  if (requested(c, Pipeline::wilczynski))
    stencil_grid(c.wilczynski.n1, c.wilczynski.n2, "wilczynski");

  if (!c.wilczynski.domain.contains(c.wilczynski.window, 1e-12))
    throw ValidationError("config: wilczynski.window must lie inside wilczynski.domain");
  if (!c.euclid.extract_domain.contains(c.euclid.domain, 1e-12))
    throw ValidationError("config: euclid.domain must lie inside euclid.extract-domain");

  static const std::map<std::string, size_t> kSurfaceArity = {
      {"ellipsoid", 3}, {"spheroid", 2}, {"torus", 2}, {"cyclide", 3}, {"cylinder", 1}};
  const auto it = kSurfaceArity.find(c.euclid.kind);
  if (it == kSurfaceArity.end())
    throw ValidationError("config: unknown surface kind '" + c.euclid.kind + "'");
  if (c.euclid.params.size() != it->second)
    throw ValidationError("config: surface '" + c.euclid.kind + "' takes " +
                          std::to_string(it->second) + " parameters");

  if (c.family.kind != "c0" && c.family.kind != "c1" && c.family.kind != "canal")
    throw ValidationError("config: unknown family kind '" + c.family.kind + "'");
  if (c.family.kind == "canal" && !(c.family.M > 0))
    throw ValidationError("config: canal family needs M > 0");
  if (c.family.kind == "c1" && (c.family.f1.empty() || c.family.f2.empty()))
    throw ValidationError("config: c=1 family needs nonempty f1, f2 coefficient lists");
}

inline RunConfig parse_config(const std::string& text) {
  detail::json doc;
  detail::StrictSax sax(doc);
  try {
    detail::json::sax_parse(text, &sax);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }

  RunConfig c;
  detail::ObjView root(doc, "config");

  if (const auto* v = root.find("schema"))
    c.schema = detail::as_int(*v, "config.schema");
  else
    throw ValidationError("config: missing required key 'schema'");

  if (const auto* v = root.find("pipeline")) {
    std::vector<std::string> names;
    if (v->is_string()) {
      names.push_back(v->get<std::string>());
    } else if (v->is_array()) {
      for (const auto& e : *v) {
        if (!e.is_string())
          throw ValidationError("config: pipeline entries must be strings");
        names.push_back(e.get<std::string>());
      }
    } else {
      throw ValidationError("config: pipeline must be a string or an array of strings");
    }
    for (const auto& n : names) {
      const auto p = pipeline_from(n);
      if (!p) throw ValidationError("config: unknown pipeline '" + n + "'");
      c.pipelines.push_back(*p);
    }
  }

  bool eps_set = false;
  if (const auto* v = root.find("family")) {
    detail::ObjView fam(*v, "config.family");
    c.family.kind = detail::string_or(fam, "kind", "c0");
    if (const auto* e = fam.find("eps")) {
      const auto vals = detail::numbers(*e, "config.family.eps");
      if (vals.size() != 3)
        throw ValidationError("config: family.eps must have 3 entries");
      for (size_t i = 0; i < 3; ++i) c.family.eps[i] = vals[i];
      eps_set = true;
    }
    c.family.alpha = detail::number_or(fam, "alpha", c.family.alpha);
    c.family.rho = detail::fixed_or<2>(fam, "rho", c.family.rho);
    c.family.s = detail::fixed_or<2>(fam, "s", c.family.s);
    c.family.psi1 = detail::fixed_or<2>(fam, "psi1", c.family.psi1);
    c.family.psi2 = detail::fixed_or<2>(fam, "psi2", c.family.psi2);
    c.family.ode_step = detail::number_or(fam, "ode-step", c.family.ode_step);
    if (const auto* f = fam.find("f1"))
      c.family.f1 = detail::numbers(*f, "config.family.f1");
    if (const auto* f = fam.find("f2"))
      c.family.f2 = detail::numbers(*f, "config.family.f2");
    c.family.M = detail::number_or(fam, "M", c.family.M);
    c.family.lambda = detail::number_or(fam, "lambda", c.family.lambda);
    c.family.k = detail::number_or(fam, "k", c.family.k);
    fam.finish();
  }
  if (c.family.kind == "c1" && !eps_set) c.family.eps = {0.2, -0.1, 0.4};

  // the family pipelines default to the catalog domain of the chosen family
  Rect family_default{0.25, 1.25, 0.25, 1.25};
  if (c.family.kind == "c1") family_default = {-0.8, -0.2, 0.2, 0.8};
  if (c.family.kind == "canal") family_default = {0.25, 0.85, 0.0, 0.6};
  c.domain = detail::rect_or(root, "domain", family_default);
  detail::grid_or(root, "grid", c.n1, c.n2);
  c.h = detail::number_or(root, "h", c.h);

  if (const auto* v = root.find("tolerances")) {
    detail::ObjView tol(*v, "config.tolerances");
    for (const auto& item : v->items()) {
      (void)tol.find(item.key());
      c.tolerances[item.key()] =
          detail::as_number(item.value(), "config.tolerances." + item.key());
    }
    tol.finish();
  }

  if (const auto* v = root.find("landau")) {
    detail::ObjView l(*v, "config.landau");
    c.landau.M = detail::number_or(l, "M", c.landau.M);
    c.landau.lambda = detail::number_or(l, "lambda", c.landau.lambda);
    c.landau.k = detail::number_or(l, "k", c.landau.k);
    c.landau.closed_form = detail::bool_or(l, "closed-form", c.landau.lambda == 0.5);
    if (const auto* p = l.find("profile")) {
      const auto vals = detail::numbers(*p, "config.landau.profile");
      if (vals.size() != 3)
        throw ValidationError("config: landau.profile must be [ymin, ymax, samples]");
      c.landau.ymin = vals[0];
      c.landau.ymax = vals[1];
      c.landau.samples = detail::as_int((*p)[2], "config.landau.profile[2]");
    }
    c.landau.window = detail::rect_or(l, "window", c.landau.window);
    detail::grid_or(l, "grid", c.landau.n1, c.landau.n2);
    l.finish();
  } else {
    c.landau.closed_form = true;
  }

  if (const auto* v = root.find("euclid")) {
    detail::ObjView e(*v, "config.euclid");
    bool domain_set = false, extract_set = false;
    if (const auto* s = e.find("surface")) {
      detail::ObjView sv(*s, "config.euclid.surface");
      c.euclid.kind = detail::string_or(sv, "kind", c.euclid.kind);
      if (const auto* pr = sv.find("params"))
        c.euclid.params = detail::numbers(*pr, "config.euclid.surface.params");
      else if (c.euclid.kind != "ellipsoid")
        throw ValidationError("config: surface '" + c.euclid.kind +
                              "' needs explicit params");
      sv.finish();
    }
    c.euclid.domain = detail::rect_or(e, "domain", c.euclid.domain, &domain_set);
    detail::grid_or(e, "grid", c.euclid.n1, c.euclid.n2);
    c.euclid.extract_domain =
        detail::rect_or(e, "extract-domain", c.euclid.extract_domain, &extract_set);
    detail::grid_or(e, "extract-grid", c.euclid.extract_n1, c.euclid.extract_n2);
    c.euclid.h = detail::number_or(e, "h", c.euclid.h);
    if (c.euclid.kind != "ellipsoid" && (!domain_set || !extract_set))
      throw ValidationError(
          "config: only the ellipsoid has default windows; surface '" + c.euclid.kind +
          "' needs explicit domain and extract-domain");
    e.finish();
  }

  if (const auto* v = root.find("wilczynski")) {
    detail::ObjView w(*v, "config.wilczynski");
    c.wilczynski.domain = detail::rect_or(w, "domain", c.wilczynski.domain);
    c.wilczynski.window = detail::rect_or(w, "window", c.wilczynski.window);
    detail::grid_or(w, "grid", c.wilczynski.n1, c.wilczynski.n2);
    c.wilczynski.h = detail::number_or(w, "h", c.wilczynski.h);
    w.finish();
  }

  c.out = detail::string_or(root, "out", c.out);
  root.finish();

  validate_config(c);
  return c;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("config: cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

// family construction: the potential field plus the descriptors the spectral
// checks need
struct FamilyHandles {
  std::string kind;
  potentials::PotentialField field;
  std::optional<potentials::C0Family> c0;
  std::optional<potentials::C1Params> c1;
  std::optional<potentials::CanalParams> canal;
};

inline FamilyHandles build_family(const RunConfig& c) {
  FamilyHandles out;
  out.kind = c.family.kind;
  if (c.family.kind == "c0") {
    potentials::C0Params prm;
    prm.eps0 = c.family.eps[0];
    prm.eps1 = c.family.eps[1];
    prm.eps2 = c.family.eps[2];
    prm.alpha = c.family.alpha;
    prm.rho1 = c.family.rho[0];
    prm.rho2 = c.family.rho[1];
    prm.s1 = c.family.s[0];
    prm.s2 = c.family.s[1];
    prm.psi1_value0 = c.family.psi1[0];
    prm.psi1_slope0 = c.family.psi1[1];
    prm.psi2_value0 = c.family.psi2[0];
    prm.psi2_slope0 = c.family.psi2[1];
    prm.domain = c.domain;
    prm.ode_step = c.family.ode_step;
    out.c0 = potentials::make_c0_family(prm);
    out.field = out.c0->field;
  } else if (c.family.kind == "c1") {
    potentials::C1Params prm;
    prm.f1 = Fn1::polynomial(c.family.f1);
    prm.f2 = Fn1::polynomial(c.family.f2);
    prm.eps0 = c.family.eps[0];
    prm.eps1 = c.family.eps[1];
    prm.eps2 = c.family.eps[2];
    prm.domain = c.domain;
    out.c1 = prm;
    out.field = potentials::make_c1_family(prm);
  } else {
    potentials::CanalParams prm;
    prm.M = c.family.M;
    prm.lambda = c.family.lambda;
    prm.k = c.family.k;
    prm.domain = c.domain;
    out.canal = prm;
    out.field = potentials::make_canal_landau(prm);
  }
  return out;
}

}  // namespace liesphere::cli
