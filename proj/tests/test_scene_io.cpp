#include <doctest.h>

#include <string>

#include <json.hpp>

#include "batik/scene_io.hpp"

using namespace batik;
using nlohmann::json;

namespace {

const char* kSphere = R"({"equation": "x^2+y^2+z^2-1", "zoom": 1, "width": 32, "height": 24})";

template <class E>
std::string error_of(const std::string& text) {
  try {
    parse_scene_document(text);
  } catch (const E& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("minimal scene document") {
  const SceneDocument d = parse_scene_document(kSphere);
  CHECK(d.equation_text == "x^2+y^2+z^2-1");
  CHECK(d.scene.width == 32);
  CHECK(d.scene.height == 24);
  CHECK(d.scene.zoom == 1.0);
  CHECK(d.scene.params.empty());
  CHECK_FALSE(d.preset.has_value());
  CHECK_FALSE(d.layout.has_value());
  CHECK(d.palette.empty());
  const Scene defaults;
  CHECK(d.scene.front == defaults.front);
  CHECK(d.scene.steps == defaults.steps);
}

TEST_CASE("full scene document round-trips") {
  const std::string text = R"({
    "equation": "x^2+y^2+z^2-a",
    "params": {"a": 0.7},
    "ranges": {"a": [0.1, 2]},
    "zoom": 0.8, "width": 40, "height": 30,
    "colors": {"front": "#112233", "back": "#445566", "background": "#ffeedd"},
    "steps": 300, "shading": "flat", "supersample": false,
    "layout": {"mode": "fib", "n": 4, "width": 90, "height": 70},
    "palette": {"#112233": "#000001", "#445566": "#000002", "#ffeedd": "#000003", "#abcdef": "#000004"}
  })";
  const SceneDocument a = parse_scene_document(text);
  CHECK(a.scene.params.at("a") == 0.7);
  CHECK(a.ranges.at("a") == std::pair{0.1, 2.0});
  CHECK(a.scene.front == Rgb{0x11, 0x22, 0x33});
  CHECK(a.scene.steps == 300);
  REQUIRE(a.layout.has_value());
  CHECK(a.layout->mode == LayoutMode::Fibonacci);
  CHECK(a.layout->count == 4);
  CHECK(a.layout->canvas_w == 90);
  CHECK(a.palette.size() == 4);

  const SceneDocument b = parse_scene_document(scene_document_to_json(a));
  CHECK(b.equation_text == a.equation_text);
  CHECK(b.scene.equation == a.scene.equation);
  CHECK(b.scene.params == a.scene.params);
  CHECK(b.ranges == a.ranges);
  CHECK(b.scene.zoom == a.scene.zoom);
  CHECK(b.scene.width == a.scene.width);
  CHECK(b.scene.height == a.scene.height);
  CHECK(b.scene.front == a.scene.front);
  CHECK(b.scene.back == a.scene.back);
  CHECK(b.scene.background == a.scene.background);
  CHECK(b.scene.steps == a.scene.steps);
  CHECK(b.scene.shading == a.scene.shading);
  CHECK(b.layout->mode == a.layout->mode);
  CHECK(b.layout->count == a.layout->count);
  CHECK(b.layout->canvas_h == a.layout->canvas_h);
  CHECK(b.palette == a.palette);
  CHECK(scene_document_to_json(b) == scene_document_to_json(a));
}

TEST_CASE("awkward doubles survive the round trip") {
  SceneDocument d = parse_scene_document(R"({"equation": "x^2+y^2+z^2-a", "params": {"a": 0.1}, "zoom": 0.3})");
  d.scene.zoom = 1.0 / 3.0;
  d.scene.params["a"] = 2.0 / 7.0;
  const SceneDocument back = parse_scene_document(scene_document_to_json(d));
  CHECK(back.scene.zoom == d.scene.zoom);
  CHECK(back.scene.params.at("a") == d.scene.params.at("a"));
}

TEST_CASE("preset documents take the preset defaults") {
  const SceneDocument d = parse_scene_document(R"({"preset": "cylinder-cross"})");
  const Preset& p = find_preset("cylinder-cross");
  CHECK(d.preset == "cylinder-cross");
  CHECK(d.equation_text == p.equation);
  CHECK(d.scene.zoom == p.zoom);
  CHECK(d.scene.params.at("a") == 0.26);
  CHECK(d.scene.params.at("b") == 0.56);
  CHECK(d.scene.front == p.front);
  CHECK(d.ranges.at("b") == std::pair{0.0, 1.0});

  const SceneDocument o = parse_scene_document(R"({"preset": "atom-fish", "params": {"a": 0.3}, "zoom": 2})");
  CHECK(o.scene.params.at("a") == 0.3);
  CHECK(o.scene.zoom == 2.0);

  // Overriding the equation keeps only the preset parameters it still uses.
  const SceneDocument e = parse_scene_document(R"({"preset": "cylinder-cross", "equation": "x^2+y^2+z^2-b"})");
  CHECK(e.scene.params.size() == 1);
  CHECK(e.scene.params.at("b") == 0.56);
}

TEST_CASE("free parameters get default ranges") {
  const SceneDocument d = parse_scene_document(R"({"equation": "x^2+y^2+z^2-a-b", "params": {"a": 0.5, "b": 0.2}})");
  CHECK(d.ranges.at("a") == std::pair{0.0, 1.0});
  CHECK(d.ranges.at("b") == std::pair{0.0, 1.0});
}

TEST_CASE("schema violations") {
  const char* bad[] = {
      "",
      "not json",
      "[]",
      "42",
      R"({})",
      R"({"equation": 5})",
      R"({"equation": "x", "zoom": 0})",
      R"({"equation": "x", "zoom": -1})",
      R"({"equation": "x", "zoom": "big"})",
      R"({"equation": "x", "width": 0})",
      R"({"equation": "x", "width": 1.5})",
      R"({"equation": "x", "width": -3})",
      R"({"equation": "x", "height": 40000})",
      R"({"equation": "x", "steps": 0})",
      R"({"equation": "x", "steps": 70000})",
      R"({"equation": "x", "shading": "glossy"})",
      R"({"equation": "x", "supersample": 1})",
      R"({"equation": "x", "colors": {"front": "red"}})",
      R"({"equation": "x", "colors": {"front": "#12345"}})",
      R"({"equation": "x", "colors": {"rim": "#123456"}})",
      R"({"equation": "x", "colors": {"front": "#000000", "back": "#000000"}})",
      R"({"equation": "x", "colors": []})",
      R"({"equation": "x", "extra": 1})",
      R"({"equation": "x", "params": []})",
      R"({"equation": "x-a", "params": {"a": "one"}})",
      R"({"equation": "x-a", "params": {"a": 0.5}, "ranges": {"a": [1, 0]}})",
      R"({"equation": "x-a", "params": {"a": 0.5}, "ranges": {"a": [0]}})",
      R"({"equation": "x", "layout": {"n": 3}})",
      R"({"equation": "x", "layout": {"mode": "spiral"}})",
      R"({"equation": "x", "layout": {"mode": "grid", "n": 0}})",
      R"({"equation": "x", "layout": {"mode": "fib", "n": 41}})",
      R"({"equation": "x", "layout": {"mode": "grid", "rows": 2}})",
      R"({"equation": "x", "palette": {"#d98c1f": "#000000"}})",
      R"({"equation": "x", "shading": "lit", "palette": {}})",
      R"({"equation": "x", "palette": {"#d98c1f": "#000001", "#5a2e12": "#000001", "#f5ebd7": "#000002"}})",
      R"({"equation": "x", "palette": {"d98c1f": "#000001"}})",
      R"({"preset": 7})",
  };
  for (const char* text : bad) {
    CAPTURE(std::string(text));
    CHECK_THROWS_AS(parse_scene_document(text), SchemaError);
  }
}

TEST_CASE("equation errors") {
  CHECK_THROWS_AS(parse_scene_document(R"({"equation": "x^2+*y"})"), EquationError);
  try {
    parse_scene_document(R"({"equation": "x^2+*y"})");
  } catch (const EquationError& e) {
    CHECK(e.offset() == 4u);
  }
  CHECK(error_of<EquationError>(R"({"equation": "x^2+y^2+z^2-a"})").find("'a'") != std::string::npos);
  CHECK(error_of<EquationError>(R"({"equation": "x^2", "params": {"q": 1}})").find("'q'") != std::string::npos);
  CHECK_THROWS_AS(parse_scene_document(R"({"equation": "x", "ranges": {"q": [0, 1]}})"), EquationError);
  CHECK(error_of<EquationError>(R"({"preset": "nope"})").find("ding-dong") != std::string::npos);
  CHECK_THROWS_AS(parse_scene_document(R"({"equation": "x^999"})"), EquationError);
  CHECK_THROWS_AS(parse_scene_document(R"({"equation": ""})"), EquationError);
}

TEST_CASE("render_document applies palette and layout") {
  const SceneDocument plain = parse_scene_document(kSphere);
  const Image base = render_document(plain).image;
  CHECK(base == render_scene(plain.scene).image);

  const SceneDocument d = parse_scene_document(R"({"equation": "x^2+y^2+z^2-1", "width": 32, "height": 24,
      "palette": {"#d98c1f": "#000001", "#5a2e12": "#000002", "#f5ebd7": "#000003"},
      "layout": {"mode": "grid", "n": 2, "mirror": true}})");
  const MotifRender r = render_document(d);
  CHECK(r.image == grid_tile(apply_palette(base, d.palette), 2, 2, true));
  CHECK(r.stats.pixels == 32 * 24);
}

TEST_CASE("diagnostics") {
  const Diagnostics ok = diagnose("x^2+y^2+z^2-1");
  CHECK(ok.errors.empty());
  CHECK(ok.degree == 2u);
  CHECK(ok.free_params.empty());

  const Diagnostics fish = diagnose(find_preset("atom-fish").equation);
  CHECK(fish.free_params == std::vector<std::string>{"a"});
  CHECK(fish.degree == 7u);

  const Diagnostics bad = diagnose("x^2+*y");
  REQUIRE(bad.errors.size() == 1);
  CHECK(bad.errors[0].offset == 4);
  CHECK_FALSE(bad.degree.has_value());

  CHECK_FALSE(diagnose("1/x").degree.has_value());
  CHECK(diagnose("1/x").errors.empty());

  for (const char* text : {"", "(", "x^", "\xff\xfe", "x^2+", "((((", "x y z", "2*", "x^100"}) {
    const Diagnostics d = diagnose(text);
    CHECK(d.errors.size() == 1);
    CHECK(d.errors[0].offset <= std::string(text).size());
    CHECK(json::parse(diagnostics_to_json(d)).is_object());
  }

  const json j = json::parse(diagnostics_to_json(bad));
  CHECK(j.at("ok") == false);
  CHECK(j.at("errors").at(0).at("offset") == 4);
  CHECK(j.at("degree").is_null());
  CHECK_FALSE(j.contains("render"));

  Diagnostics with_stats = ok;
  with_stats.render = RenderStats{100, 40, 2, 1.5, 3, kernels::Backend::Scalar};
  const json s = json::parse(diagnostics_to_json(with_stats));
  CHECK(s.at("render").at("hits") == 40);
  CHECK(s.at("render").at("eval_errors") == 2);
  CHECK(s.at("render").at("wall_ms") == 1.5);
  CHECK(s.at("render").at("backend") == "scalar");
}

TEST_CASE("curve requests") {
  const CurveRequest c = parse_curve_request(R"({"a": 2, "b": 1})");
  CHECK(c.spec.a() == 2.0);
  CHECK(c.spec.b() == 1.0);
  CHECK(c.color == "#3b1f0e");
  const CurveRequest d = parse_curve_request(R"({"a": 1, "b": 2, "samples": 50, "theta_max": 3, "color": "#ABCDEF"})");
  CHECK(d.spec.samples() == 50);
  CHECK(d.spec.theta_max() == 3.0);
  CHECK(d.color == "#abcdef");
  for (const char* bad : {R"({"a": 2})", R"({"a": 0, "b": 1})", R"({"a": 2, "b": 1, "samples": 1})",
                          R"({"a": 2, "b": 1, "theta_max": -1})", R"({"a": 2, "b": 1, "theta_max": 1e9})",
                          R"({"a": 2, "b": 1, "color": "<x>"})", R"({"a": 2, "b": 1, "z": 0})", "[1]"}) {
    CAPTURE(std::string(bad));
    CHECK_THROWS_AS(parse_curve_request(bad), SchemaError);
  }
}

TEST_CASE("lift requests") {
  const LiftRequest l = parse_lift_request(R"({"a": 2, "b": 1, "ntheta": 40, "nphi": 10})");
  CHECK(l.n_theta == 40);
  CHECK(l.n_phi == 10);
  CHECK(l.phi_min == 1e-2);
  CHECK_FALSE(l.json);
  CHECK(parse_lift_request(R"({"a": 2, "b": 1, "ntheta": 4, "nphi": 4, "format": "json", "phi_min": 0.2})").json);
  for (const char* bad : {R"({"a": 2, "b": 1, "ntheta": 40})", R"({"a": 2, "b": 1, "ntheta": 1, "nphi": 4})",
                          R"({"a": 2, "b": 1, "ntheta": 100000, "nphi": 100000})",
                          R"({"a": 2, "b": 1, "ntheta": 4, "nphi": 4, "phi_min": 2})",
                          R"({"a": 2, "b": 1, "ntheta": 4, "nphi": 4, "format": "stl"})"}) {
    CAPTURE(std::string(bad));
    CHECK_THROWS_AS(parse_lift_request(bad), SchemaError);
  }
}
