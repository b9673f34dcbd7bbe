#include "batik/scene_io.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <numbers>
#include <set>

#include <json.hpp>

#include "batik/spherical.hpp"

namespace batik {
namespace {

using nlohmann::json;

constexpr std::size_t kMaxDimension = 32768;
constexpr std::size_t kMaxCurveSamples = 1'000'000;
constexpr double kMaxThetaMax = 2000.0 * std::numbers::pi;
constexpr std::size_t kMaxGridCount = 64;

// Messages may quote user bytes; never let invalid UTF-8 abort serialization.
std::string dump(const json& j, int indent = -1) { return j.dump(indent, ' ', false, json::error_handler_t::replace); }

json parse_object(std::string_view text, const char* what) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string(what) + " is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw SchemaError(std::string(what) + " must be a JSON object");
  return j;
}

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw SchemaError("unknown key '" + key + "' in " + where);
    }
  }
}

const json* find(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double finite_number(const json& v, const std::string& where) {
  if (!v.is_number()) throw SchemaError(where + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw SchemaError(where + " must be finite");
  return d;
}

double positive_number(const json& v, const std::string& where) {
  const double d = finite_number(v, where);
  if (!(d > 0.0)) throw SchemaError(where + " must be positive");
  return d;
}

std::size_t integer_in(const json& v, std::size_t lo, std::size_t hi, const std::string& where) {
  const std::string range = " must be an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]";
  if (v.is_number_unsigned()) {
    const auto n = v.get<std::uint64_t>();
    if (n < lo || n > hi) throw SchemaError(where + range);
    return static_cast<std::size_t>(n);
  }
  if (v.is_number_integer()) throw SchemaError(where + range);  // negative
  throw SchemaError(where + range);
}

bool boolean(const json& v, const std::string& where) {
  if (!v.is_boolean()) throw SchemaError(where + " must be true or false");
  return v.get<bool>();
}

const std::string& string_value(const json& v, const std::string& where) {
  if (!v.is_string()) throw SchemaError(where + " must be a string");
  return v.get_ref<const std::string&>();
}

Rgb color_value(const json& v, const std::string& where) {
  const std::string& s = string_value(v, where);
  const auto c = parse_hex_color(s);
  if (!c || s.size() != 7) throw SchemaError(where + " must be a color \"#rrggbb\"");
  return *c;
}

std::string quoted_names(const std::vector<std::string>& names) {
  std::string out;
  for (const std::string& n : names) out += (out.empty() ? "'" : ", '") + n + "'";
  return out;
}

json stats_json(const RenderStats& s) {
  return {{"pixels", s.pixels},
          {"hits", s.hits},
          {"eval_errors", s.eval_errors},
          {"wall_ms", s.wall_ms},
          {"threads", s.threads},
          {"backend", std::string(kernels::backend_name(s.backend))}};
}

CurveSpec curve_spec(const json& obj, std::optional<std::size_t> samples, std::optional<double> theta_max) {
  const json* a = find(obj, "a");
  const json* b = find(obj, "b");
  if (a == nullptr || b == nullptr) throw SchemaError("curve needs both 'a' and 'b'");
  const double av = positive_number(*a, "'a'"), bv = positive_number(*b, "'b'");
  try {
    return CurveSpec(av, bv, samples, theta_max);
  } catch (const std::invalid_argument& e) {
    throw SchemaError(e.what());
  }
}

}  // namespace

SceneDocument parse_scene_document(std::string_view json_text) {
  const json j = parse_object(json_text, "scene");
  check_keys(j,
             {"preset", "equation", "params", "ranges", "zoom", "width", "height", "colors", "steps", "shading",
              "supersample", "layout", "palette"},
             "scene");

  SceneDocument doc;
  ParamBinding preset_params;
  if (const json* p = find(j, "preset")) {
    const std::string& name = string_value(*p, "'preset'");
    const Preset* preset = nullptr;
    try {
      preset = &find_preset(name);
    } catch (const UnknownPresetError& e) {
      throw EquationError(e.what());
    }
    doc.preset = name;
    doc.equation_text = preset->equation;
    doc.scene = preset->scene(doc.scene.width, doc.scene.height);
    for (const ParamSpec& s : preset->params) {
      preset_params[s.name] = s.value;
      doc.ranges[s.name] = {s.min, s.max};
    }
  }
  if (const json* e = find(j, "equation")) {
    doc.equation_text = string_value(*e, "'equation'");
  } else if (!doc.preset) {
    throw SchemaError("scene needs an 'equation' or a 'preset'");
  }

  // Schema checks on every field come before any equation semantics.
  if (const json* v = find(j, "zoom")) doc.scene.zoom = positive_number(*v, "'zoom'");
  if (const json* v = find(j, "width")) doc.scene.width = integer_in(*v, 1, kMaxDimension, "'width'");
  if (const json* v = find(j, "height")) doc.scene.height = integer_in(*v, 1, kMaxDimension, "'height'");
  if (const json* v = find(j, "steps")) doc.scene.steps = static_cast<unsigned>(integer_in(*v, 1, kMaxMarchSteps, "'steps'"));
  if (const json* v = find(j, "shading")) {
    const auto s = parse_shading(string_value(*v, "'shading'"));
    if (!s) throw SchemaError("'shading' must be \"flat\" or \"lit\"");
    doc.scene.shading = *s;
  }
  if (const json* v = find(j, "supersample")) doc.scene.supersample = boolean(*v, "'supersample'");
  if (const json* c = find(j, "colors")) {
    if (!c->is_object()) throw SchemaError("'colors' must be an object");
    check_keys(*c, {"front", "back", "background"}, "'colors'");
    if (const json* v = find(*c, "front")) doc.scene.front = color_value(*v, "'colors.front'");
    if (const json* v = find(*c, "back")) doc.scene.back = color_value(*v, "'colors.back'");
    if (const json* v = find(*c, "background")) doc.scene.background = color_value(*v, "'colors.background'");
  }
  const Scene& s = doc.scene;
  if (s.front == s.back || s.front == s.background || s.back == s.background) {
    throw SchemaError("scene colors must be pairwise distinct");
  }

  ParamBinding given;
  if (const json* p = find(j, "params")) {
    if (!p->is_object()) throw SchemaError("'params' must be an object");
    for (const auto& [name, value] : p->items()) given[name] = finite_number(value, "parameter '" + name + "'");
  }
  std::map<std::string, std::pair<double, double>> given_ranges;
  if (const json* r = find(j, "ranges")) {
    if (!r->is_object()) throw SchemaError("'ranges' must be an object");
    for (const auto& [name, value] : r->items()) {
      const std::string where = "range of '" + name + "'";
      if (!value.is_array() || value.size() != 2) throw SchemaError(where + " must be [min, max]");
      const double lo = finite_number(value[0], where), hi = finite_number(value[1], where);
      if (!(lo < hi)) throw SchemaError(where + " must have min < max");
      given_ranges[name] = {lo, hi};
    }
  }

  if (const json* l = find(j, "layout")) {
    if (!l->is_object()) throw SchemaError("'layout' must be an object");
    check_keys(*l, {"mode", "n", "mirror", "width", "height"}, "'layout'");
    const json* mode = find(*l, "mode");
    if (mode == nullptr) throw SchemaError("'layout' needs a 'mode'");
    const auto m = parse_layout_mode(string_value(*mode, "'layout.mode'"));
    if (!m) throw SchemaError("'layout.mode' must be \"fib\" or \"grid\"");
    MotifLayout layout;
    layout.mode = *m;
    if (const json* v = find(*l, "n")) {
      layout.count = integer_in(*v, 1, *m == LayoutMode::Grid ? kMaxGridCount : 40, "'layout.n'");
    }
    if (const json* v = find(*l, "mirror")) layout.mirror = boolean(*v, "'layout.mirror'");
    if (const json* v = find(*l, "width")) layout.canvas_w = integer_in(*v, 1, kMaxDimension, "'layout.width'");
    if (const json* v = find(*l, "height")) layout.canvas_h = integer_in(*v, 1, kMaxDimension, "'layout.height'");
    doc.layout = layout;
  }

  if (const json* p = find(j, "palette")) {
    if (!p->is_object()) throw SchemaError("'palette' must be an object");
    if (s.shading != Shading::Flat || s.supersample) {
      throw SchemaError("'palette' needs flat shading without supersampling");
    }
    for (const auto& [from, to] : p->items()) {
      const auto key = parse_hex_color(from);
      if (!key || from.size() != 7) throw SchemaError("palette key '" + from + "' must be a color \"#rrggbb\"");
      doc.palette[*key] = color_value(to, "palette entry '" + from + "'");
    }
    std::set<Rgb> targets;
    for (Rgb c : {s.front, s.back, s.background}) {
      const auto it = doc.palette.find(c);
      if (it == doc.palette.end()) throw SchemaError("'palette' must map scene color " + to_hex(c));
      targets.insert(it->second);
    }
    if (targets.size() != 3) throw SchemaError("'palette' must keep the three scene colors distinct");
  }

  // Equation semantics.
  try {
    doc.scene.equation = parse(doc.equation_text);
  } catch (const ParseError& e) {
    throw EquationError("equation: " + std::string(e.what()), e.offset());
  } catch (const std::invalid_argument& e) {
    throw EquationError("equation: " + std::string(e.what()));
  }
  const std::vector<std::string> free = free_parameters(doc.scene.equation);
  const auto is_free = [&](const std::string& n) { return std::binary_search(free.begin(), free.end(), n); };
  for (const auto& [name, value] : given) {
    if (!is_free(name)) throw EquationError("parameter '" + name + "' does not appear in the equation");
  }
  for (const auto& [name, range] : given_ranges) {
    if (!is_free(name)) throw EquationError("range for '" + name + "' names no parameter of the equation");
  }
  doc.scene.params.clear();
  std::map<std::string, std::pair<double, double>> ranges;
  std::vector<std::string> unbound;
  for (const std::string& name : free) {
    if (const auto it = given.find(name); it != given.end()) {
      doc.scene.params[name] = it->second;
    } else if (const auto pt = preset_params.find(name); pt != preset_params.end()) {
      doc.scene.params[name] = pt->second;
    } else {
      unbound.push_back(name);
    }
    if (const auto it = given_ranges.find(name); it != given_ranges.end()) {
      ranges[name] = it->second;
    } else if (const auto rt = doc.ranges.find(name); rt != doc.ranges.end()) {
      ranges[name] = rt->second;
    } else {
      ranges[name] = {0.0, 1.0};
    }
  }
  if (!unbound.empty()) throw EquationError("unbound parameters: " + quoted_names(unbound));
  doc.ranges = std::move(ranges);

  try {
    doc.scene.validate();
  } catch (const std::invalid_argument& e) {
    throw SchemaError(e.what());
  }
  return doc;
}

std::string scene_document_to_json(const SceneDocument& doc) {
  const Scene& s = doc.scene;
  json j;
  if (doc.preset) j["preset"] = *doc.preset;
  j["equation"] = doc.equation_text.empty() ? print(s.equation) : doc.equation_text;
  json params = json::object(), ranges = json::object();
  for (const auto& [name, value] : s.params) params[name] = value;
  for (const auto& [name, range] : doc.ranges) ranges[name] = {range.first, range.second};
  j["params"] = params;
  j["ranges"] = ranges;
  j["zoom"] = s.zoom;
  j["width"] = s.width;
  j["height"] = s.height;
  j["colors"] = {{"front", to_hex(s.front)}, {"back", to_hex(s.back)}, {"background", to_hex(s.background)}};
  j["steps"] = s.steps;
  j["shading"] = std::string(shading_name(s.shading));
  j["supersample"] = s.supersample;
  if (doc.layout) {
    const MotifLayout& l = *doc.layout;
    json lj = {{"mode", std::string(layout_mode_name(l.mode))}, {"n", l.count}, {"mirror", l.mirror}};
    if (l.canvas_w != 0) lj["width"] = l.canvas_w;
    if (l.canvas_h != 0) lj["height"] = l.canvas_h;
    j["layout"] = lj;
  }
  if (!doc.palette.empty()) {
    json pj = json::object();
    for (const auto& [from, to] : doc.palette) pj[to_hex(from)] = to_hex(to);
    j["palette"] = pj;
  }
  return dump(j, 2);
}

MotifRender render_document(const SceneDocument& doc, const RenderOptions& options) {
  RenderResult r = render_scene(doc.scene, options);
  MotifRender out{std::move(r.image), r.stats};
  if (!doc.palette.empty()) out.image = apply_palette(out.image, doc.palette);
  if (doc.layout) out.image = compose_motif(out.image, *doc.layout);
  return out;
}

Diagnostics diagnose(std::string_view equation_text) {
  Diagnostics d;
  try {
    const Expr e = parse(equation_text);
    d.free_params = free_parameters(e);
    d.degree = degree(e);
  } catch (const ParseError& e) {
    d.errors.push_back({std::min(e.offset(), equation_text.size()), e.what()});
  } catch (const std::exception& e) {
    d.errors.push_back({0, e.what()});
  }
  return d;
}

std::string diagnostics_to_json(const Diagnostics& d) {
  json errors = json::array();
  for (const Diagnostic& e : d.errors) errors.push_back({{"offset", e.offset}, {"message", e.message}});
  json j = {{"ok", d.errors.empty()}, {"errors", errors}, {"free_params", d.free_params}};
  j["degree"] = d.degree ? json(*d.degree) : json(nullptr);
  if (d.render) j["render"] = stats_json(*d.render);
  return dump(j);
}

CurveRequest parse_curve_request(std::string_view json_text) {
  const json j = parse_object(json_text, "curve request");
  check_keys(j, {"a", "b", "samples", "theta_max", "color"}, "curve request");
  std::optional<std::size_t> samples;
  std::optional<double> theta_max;
  if (const json* v = find(j, "samples")) samples = integer_in(*v, 2, kMaxCurveSamples, "'samples'");
  if (const json* v = find(j, "theta_max")) {
    theta_max = positive_number(*v, "'theta_max'");
    if (*theta_max > kMaxThetaMax) throw SchemaError("'theta_max' must not exceed 2000 pi");
  }
  CurveRequest req{curve_spec(j, samples, theta_max)};
  if (req.spec.samples() > kMaxCurveSamples) {
    throw SchemaError("curve needs more than " + std::to_string(kMaxCurveSamples) + " samples; set 'samples'");
  }
  if (const json* v = find(j, "color")) req.color = to_hex(color_value(*v, "'color'"));
  return req;
}

LiftRequest parse_lift_request(std::string_view json_text) {
  const json j = parse_object(json_text, "lift request");
  check_keys(j, {"a", "b", "ntheta", "nphi", "phi_min", "format"}, "lift request");
  const json* nt = find(j, "ntheta");
  const json* np = find(j, "nphi");
  if (nt == nullptr || np == nullptr) throw SchemaError("lift needs 'ntheta' and 'nphi'");
  LiftRequest req{curve_spec(j, std::nullopt, std::nullopt)};
  req.n_theta = integer_in(*nt, 2, kMaxLiftVertices, "'ntheta'");
  req.n_phi = integer_in(*np, 2, kMaxLiftVertices, "'nphi'");
  if (req.n_theta > kMaxLiftVertices / req.n_phi) {
    throw SchemaError("lift mesh exceeds " + std::to_string(kMaxLiftVertices) + " vertices");
  }
  req.phi_min = kDefaultPhiMin;
  if (const json* v = find(j, "phi_min")) {
    req.phi_min = positive_number(*v, "'phi_min'");
    if (req.phi_min > std::numbers::pi / 2) throw SchemaError("'phi_min' must lie in (0, pi/2]");
  }
  if (const json* v = find(j, "format")) {
    const std::string& f = string_value(*v, "'format'");
    if (f != "obj" && f != "json") throw SchemaError("'format' must be \"obj\" or \"json\"");
    req.json = f == "json";
  }
  return req;
}

}  // namespace batik
