// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Every tolerance and workload size is pinned below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include <httplib.h>
#include <json.hpp>

#include "batik/curve.hpp"
#include "batik/expr.hpp"
#include "batik/motif.hpp"
#include "batik/program.hpp"
#include "batik/render.hpp"
#include "batik/scene_io.hpp"
#include "batik/service.hpp"
#include "batik/spherical.hpp"
#include "support/disk_area.hpp"
#include "support/polynomial_oracle.hpp"
#include "support/random_expr.hpp"
#include "support/reference_equations.hpp"

#ifndef BATIK_CLI_PATH
#error "BATIK_CLI_PATH must name the batik executable"
#endif

namespace {

using namespace batik;
namespace ref = batik::testing;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

// 1. Parser round-trip.
constexpr int kRoundTripTrees = 10'000;
constexpr int kRoundTripDepth = 8;
constexpr double kRoundTripSeconds = 10.0;
// 2. Gradient vs central differences.
constexpr int kGradientPoints = 1000;
constexpr double kGradientRelTol = 1e-5;
// 4. Sphere identity.
constexpr int kIdentitySamples = 10'000;
constexpr double kIdentityTol = 1e-9;
// 5. Curve closure and bound.
constexpr double kClosureGapTol = 1e-9;
constexpr int kBoundSamples = 100'000;
// 6. Ray casting.
constexpr int kSphereRays = 1000;
constexpr double kRootTol = 1e-7;
constexpr double kAreaRelTol = 0.02;
constexpr double kSphereRenderSeconds = 1.0;
// 7. Presets.
constexpr double kMinCoverage = 0.005;
constexpr std::size_t kMaxFlatColors = 3;
constexpr double kPokePlanetSeconds = 5.0;
// 8. Shell.
constexpr int kShellPoints = 100'000;
constexpr double kShellEpsilon = 0.0026;
// 9. Facade.
constexpr int kFuzzDocuments = 1000;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Extended-precision tree walk, independent of the library evaluators.
long double eval_ld(const Expr& e, long double x, long double y, long double z, const ParamBinding& params) {
  using K = Expr::Kind;
  switch (e.kind()) {
    case K::Constant: return e.value();
    case K::Variable: return e.axis() == Axis::X ? x : e.axis() == Axis::Y ? y : z;
    case K::Parameter: return params.at(e.name());
    case K::Add: return eval_ld(e.lhs(), x, y, z, params) + eval_ld(e.rhs(), x, y, z, params);
    case K::Sub: return eval_ld(e.lhs(), x, y, z, params) - eval_ld(e.rhs(), x, y, z, params);
    case K::Mul: return eval_ld(e.lhs(), x, y, z, params) * eval_ld(e.rhs(), x, y, z, params);
    case K::Div: return eval_ld(e.lhs(), x, y, z, params) / eval_ld(e.rhs(), x, y, z, params);
    case K::Neg: return -eval_ld(e.lhs(), x, y, z, params);
    case K::Pow: {
      const long double b = eval_ld(e.lhs(), x, y, z, params);
      long double r = 1;
      for (unsigned i = 0; i < e.exponent(); ++i) r *= b;
      return r;
    }
  }
  return 0;
}

Outcome parser_round_trip() {
  const auto t0 = Clock::now();
  ref::RandomExpr gen(0xacce55, {.max_depth = kRoundTripDepth});
  int failures = 0;
  for (int i = 0; i < kRoundTripTrees; ++i) {
    const Expr e = gen();
    if (!(parse(print(e)) == e)) ++failures;
  }
  int published = 0;
  for (const char* text : {ref::kPokePlanet, ref::kDingDong, ref::kHyperbolaPair, ref::kAtomFish, ref::kRingBlasterTube,
                           ref::kCylinderCross, ref::kFig8Pair, ref::kFig8Scaled, ref::kFig8Family}) {
    parse(text);
    ++published;
  }
  const double secs = seconds_since(t0);
  return {failures == 0 && secs < kRoundTripSeconds,
          std::to_string(kRoundTripTrees - failures) + "/" + std::to_string(kRoundTripTrees) + " trees, " +
              std::to_string(published) + " published equations parse, " + fmt("%.2f s", secs)};
}

Outcome gradient_correctness() {
  std::mt19937_64 rng(2);
  double worst = 0.0;
  std::string worst_name;
  for (const Preset& p : preset_catalog()) {
    const Scene s = p.scene(16, 16);
    const Program program = Program::compile(s.equation, s.params);
    // Points across the preset's visible cube.
    const double h = s.half_extent();
    std::uniform_real_distribution<double> u(-h, h);
    for (int i = 0; i < kGradientPoints; ++i) {
      const Point3 q{u(rng), u(rng), u(rng)};
      const Vec3 g = program.evaluate_with_gradient(q).grad;
      const long double step = 1e-6L * std::max(1.0, norm(Vec3{q.x, q.y, q.z}));
      const auto f = [&](long double x, long double y, long double z) { return eval_ld(s.equation, x, y, z, s.params); };
      const Vec3 fd{static_cast<double>((f(q.x + step, q.y, q.z) - f(q.x - step, q.y, q.z)) / (2 * step)),
                    static_cast<double>((f(q.x, q.y + step, q.z) - f(q.x, q.y - step, q.z)) / (2 * step)),
                    static_cast<double>((f(q.x, q.y, q.z + step) - f(q.x, q.y, q.z - step)) / (2 * step))};
      const double err = norm(g - fd) / norm(g);
      if (!(err <= worst)) {
        worst = err;
        worst_name = p.name;
      }
    }
  }
  return {worst < kGradientRelTol, std::to_string(preset_catalog().size()) + " presets x " +
                                       std::to_string(kGradientPoints) + " points, worst rel. error " +
                                       fmt("%.2e", worst) + " (" + worst_name + ")"};
}

Outcome degree_oracle() {
  const auto quadric = degree(parse(ref::kQuadricGeneral));
  const auto cubic = degree(parse(ref::kCubicGeneral));
  const Expr poke = parse(ref::kPokePlanet);
  const auto poke_degree = degree(poke);
  const auto poke_expanded = ref::expand(poke, {}).total_degree();

  std::mt19937_64 rng(20);
  const ParamBinding generic{{"a", 0.731}};
  int additive = 0;
  for (int i = 0; i < 20; ++i) {
    const auto random_poly = [&] {
      std::uniform_int_distribution<int> pw(0, 3), terms(1, 4);
      std::string text;
      const int n = terms(rng);
      for (int t = 0; t < n; ++t) {
        text += (t ? "+" : "") + std::to_string(t + 2) + "*x^" + std::to_string(pw(rng)) + "*y^" +
                std::to_string(pw(rng)) + "*z^" + std::to_string(pw(rng) + 4 * t);
      }
      return parse(text + "+a");
    };
    const Expr f = random_poly(), g = random_poly();
    const Expr fg = Expr::mul(f, g);
    const auto oracle = ref::expand(fg, generic).total_degree();
    if (degree(fg) && degree(f) && degree(g) && *degree(fg) == *degree(f) + *degree(g) && oracle == degree(fg)) {
      ++additive;
    }
  }
  const bool pass = quadric == 2u && cubic == 3u && poke_degree == 23u && poke_expanded == 23u && additive == 20;
  return {pass, "quadric " + std::to_string(quadric.value_or(0)) + ", cubic " + std::to_string(cubic.value_or(0)) +
                    ", poke-planet " + std::to_string(poke_degree.value_or(0)) + " (expansion " +
                    std::to_string(poke_expanded.value_or(0)) + "), additive on " + std::to_string(additive) + "/20 pairs"};
}

Outcome sphere_identity() {
  std::mt19937_64 rng(4);
  double worst = 0.0;
  int count = 0;
  const std::pair<double, double> cases[] = {{2, 1}, {0.5, 0.3}, {1, 2}};
  for (const auto& [a, b] : cases) {
    const CurveSpec spec(a, b);
    std::uniform_real_distribution<double> theta(0.0, spec.theta_max());
    std::uniform_real_distribution<double> phi(kDefaultPhiMin, std::numbers::pi - kDefaultPhiMin);
    const int n = kIdentitySamples / 3 + (count == 0 ? kIdentitySamples % 3 : 0);
    for (int i = 0; i < n; ++i, ++count) {
      worst = std::max(worst, sphere_identity_residual(lift(spec, theta(rng), phi(rng)), spec));
    }
  }
  return {count == kIdentitySamples && worst < kIdentityTol,
          std::to_string(count) + " samples over 3 (a,b) pairs, worst residual " + fmt("%.2e", worst)};
}

Outcome curve_closure() {
  const double pi = std::numbers::pi;
  const auto gap = [](double a, double b, double period) {
    const CurveSpec s(a, b);
    const Point2 p0 = evaluate_curve(s, 0.0), p1 = evaluate_curve(s, period);
    return std::hypot(p1.x - p0.x, p1.y - p0.y);
  };
  const auto p21 = closure_period(2, 1), p12 = closure_period(1, 2);
  const bool periods = p21 && p12 && std::abs(*p21 - 2 * pi) < 1e-12 && std::abs(*p12 - 4 * pi) < 1e-12;
  const double g21 = gap(2, 1, 2 * pi), g12 = gap(1, 2, 4 * pi);

  std::size_t violations = 0, samples = 0;
  for (const auto& [a, b] : {std::pair{2.0, 1.0}, {1.0, 2.0}, {0.5, 0.3}, {3.0, 0.7}}) {
    const Polyline2 poly = sample_curve(CurveSpec(a, b, kBoundSamples));
    const double bound = 2 * (a + b);
    for (Point2 p : poly) violations += (std::abs(p.x) > bound || std::abs(p.y) > bound) ? 1 : 0;
    samples += poly.size();
  }
  return {periods && g21 < kClosureGapTol && g12 < kClosureGapTol && violations == 0,
          "periods 2pi/4pi " + std::string(periods ? "found" : "MISSING") + ", gaps " + fmt("%.1e", g21) + " / " +
              fmt("%.1e", g12) + ", bound held on " + std::to_string(samples - violations) + "/" +
              std::to_string(samples) + " samples"};
}

Outcome ray_cast_accuracy() {
  Scene s;
  s.equation = parse("x^2+y^2+z^2-1");
  s.width = s.height = 256;
  const Program program = Program::compile(s.equation, s.params);
  Tracer tracer(program, s.clip_radius(), s.steps);
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 256.0);
  double worst_t = 0.0;
  int rays = 0, misses = 0;
  while (rays < kSphereRays) {
    const double pu = u(rng), pv = u(rng);
    const Ray r = camera_ray_at(s, pu, pv);
    const double b = dot(r.origin, r.direction), c = dot(r.origin, r.origin) - 1.0;
    // Keep rays that cross the sphere away from grazing incidence.
    if (b * b - c < 0.01) continue;
    const double expected = -b - std::sqrt(b * b - c);
    const Tracer::Result hit = tracer.trace(r);
    ++rays;
    if (!hit.hit) {
      ++misses;
      continue;
    }
    worst_t = std::max(worst_t, std::abs(hit.hit->t - expected));
  }

  double worst_area = 0.0;
  for (double zoom : {0.5, 1.0, 2.0}) {
    Scene z = s;
    z.zoom = zoom;
    const RenderResult r = render_scene(z);
    const double expected = ref::disk_rect_area(zoom * 128.0, 256, 256);
    worst_area = std::max(worst_area, std::abs(static_cast<double>(r.stats.hits) - expected) / expected);
  }

  const auto t0 = Clock::now();
  const RenderResult timed = render_scene(s);
  const double secs = seconds_since(t0);
  return {misses == 0 && worst_t < kRootTol && worst_area < kAreaRelTol && secs < kSphereRenderSeconds,
          std::to_string(rays - misses) + "/" + std::to_string(rays) + " rays, worst |dt| " + fmt("%.1e", worst_t) +
              ", worst area error " + fmt("%.2f%%", 100 * worst_area) + ", 256^2 render " + fmt("%.3f s", secs) +
              " on " + std::to_string(timed.stats.threads) + " thread(s)"};
}

Outcome preset_reproduction() {
  bool pass = true;
  std::string detail;
  for (const char* name : {"ding-dong", "atom-fish", "ring-blaster", "poke-planet", "cylinder-cross"}) {
    const Preset& p = find_preset(name);
    const Scene s = p.scene(256, 256);
    const RenderResult first = render_scene(s);
    const RenderResult second = render_scene(s, RenderOptions{1, kernels::Backend::Scalar});
    const auto hist = histogram(first.image);
    const std::size_t bg = hist.contains(p.background) ? hist.at(p.background) : 0;
    const double coverage = 1.0 - static_cast<double>(bg) / static_cast<double>(first.image.pixels().size());
    const bool ok = first.image == second.image && coverage >= kMinCoverage && hist.size() <= kMaxFlatColors &&
                    first.stats.eval_errors == 0;
    pass = pass && ok;
    detail += std::string(name) + " " + fmt("%.1f%%", 100 * coverage) + "/" + std::to_string(hist.size()) + "c" +
              (ok ? "" : " BAD") + ", ";
  }
  const auto t0 = Clock::now();
  const RenderResult poke = render_scene(find_preset("poke-planet").scene(512, 512));
  const double secs = seconds_since(t0);
  pass = pass && secs < kPokePlanetSeconds;
  detail += "512^2 poke-planet " + fmt("%.2f s", secs) + " on " + std::to_string(poke.stats.threads) + " thread(s)";
  return {pass, detail};
}

Outcome shell_property() {
  const Expr f = parse("x^2+y^2-1");
  const Expr g = parse("z^2+(y+3-6*b)^2-1");
  const ParamBinding params{{"a", 0.26}, {"b", 0.56}};
  const Program shell = Program::compile(parse(ref::kCylinderCross), params);
  const double bound = std::sqrt(kShellEpsilon);
  std::mt19937_64 rng(8);
  // The shell hugs the curve x^2+y^2 = 1, z^2+(y-0.36)^2 = 1, inside this box.
  std::uniform_real_distribution<double> ux(-1.1, 1.1), uy(-0.75, 1.1), uz(-1.1, 1.1);
  int accepted = 0, violations = 0;
  long long proposals = 0;
  double worst = 0.0;
  while (accepted < kShellPoints) {
    const Point3 p{ux(rng), uy(rng), uz(rng)};
    ++proposals;
    if (shell.evaluate(p) > 0.0) continue;
    ++accepted;
    const double fv = std::abs(evaluate(f, p, params)), gv = std::abs(evaluate(g, p, params));
    worst = std::max({worst, fv, gv});
    violations += (fv > bound || gv > bound) ? 1 : 0;
  }
  return {violations == 0, std::to_string(accepted - violations) + "/" + std::to_string(accepted) + " points within " +
                               fmt("%.4f", bound) + " (max " + fmt("%.4f", worst) + ", " +
                               std::to_string(proposals) + " proposals)"};
}

// Mutations that always produce an invalid document.
std::string mutate(const std::string& base, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kind(0, 11);
  const auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  json doc = json::parse(base);
  switch (kind(rng)) {
    case 0:  // truncation drops the closing brace
      return base.substr(0, pick(base.size()));
    case 1: {  // invalid UTF-8 byte anywhere
      std::string s = base;
      s.insert(pick(s.size() + 1), 1, static_cast<char>(0xff));
      return s;
    }
    case 2: {  // wrong type for a known field
      const char* keys[] = {"equation", "zoom", "width", "height", "params", "colors", "steps", "shading", "supersample"};
      const json wrong[] = {json::array({1}), json(nullptr), json("12"), json::object()};
      const std::string key = keys[pick(std::size(keys))];
      json v = wrong[pick(std::size(wrong))];
      // "{}" is a valid params/colors block and "12" a valid equation.
      if ((v.is_object() && (key == "params" || key == "colors")) || (v.is_string() && key == "equation")) v = nullptr;
      doc[key] = v;
      return doc.dump();
    }
    case 3: {  // out-of-range numbers
      const std::pair<const char*, json> bad[] = {{"zoom", 0},       {"zoom", -0.5},   {"width", 0},  {"height", 0},
                                                  {"width", 99999}, {"steps", 0},     {"steps", 1e9}, {"width", 2.5},
                                                  {"height", -7},    {"width", 4096}};
      const auto& [k, v] = bad[pick(std::size(bad))];
      doc[k] = v;
      return doc.dump();
    }
    case 4:  // unknown key
      doc["x-unknown-" + std::to_string(pick(1000))] = 1;
      return doc.dump();
    case 5: {  // syntax error inserted into the equation
      std::string eq = doc["equation"].get<std::string>();
      const char* junk[] = {"*", ")", "^", "+*", "$", "(("};
      const std::size_t at = pick(eq.size() + 1);
      doc["equation"] = at == 0 ? "*" + eq : eq.substr(0, at) + "+*" + junk[pick(std::size(junk))] + eq.substr(at);
      return doc.dump();
    }
    case 6:  // unbound parameter
      doc["equation"] = doc["equation"].get<std::string>() + "+q*x";
      return doc.dump();
    case 7:  // parameter not in the equation
      doc["params"]["w"] = 0.5;
      return doc.dump();
    case 8: {  // malformed or repeated colors
      const char* bad[] = {"red", "#12345", "#1234567", "#gggggg", "", "123456"};
      if (pick(2) == 0) {
        doc["colors"] = {{"front", "#010203"}, {"back", "#010203"}};
      } else {
        doc["colors"] = {{"front", bad[pick(std::size(bad))]}};
      }
      return doc.dump();
    }
    case 9:  // exponent too large
      doc["equation"] = "x^" + std::to_string(65 + pick(100000));
      return doc.dump();
    case 10: {  // broken layout block
      const json bad[] = {json{{"mode", "spiral"}}, json{{"mode", "grid"}, {"n", 0}}, json{{"n", 3}},
                          json{{"mode", "fib"}, {"n", 41}}, json::array()};
      doc["layout"] = bad[pick(std::size(bad))];
      return doc.dump();
    }
    default: {  // not an object at all
      const char* bad[] = {"", "null", "[]", "\"scene\"", "42", "[{\"equation\": \"x\"}]"};
      return bad[pick(std::size(bad))];
    }
  }
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome facade_parity() {
  namespace fs = std::filesystem;
  Service service;
  const int port = service.bind("127.0.0.1", 0);
  if (port <= 0) return {false, "could not bind a port"};
  std::thread runner([&] { service.run(); });
  service.wait_until_ready();
  httplib::Client client("127.0.0.1", port);
  client.set_read_timeout(120, 0);

  const fs::path dir = fs::temp_directory_path() / ("batik-acceptance-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::vector<std::string> scenes = {
      R"({"equation": "x^2+y^2+z^2-1", "width": 96, "height": 80})",
      R"({"preset": "atom-fish", "width": 128, "height": 128})",
      R"({"preset": "cylinder-cross", "width": 64, "height": 96, "shading": "lit", "supersample": true})",
      R"({"preset": "ding-dong", "width": 48, "height": 48, "layout": {"mode": "fib", "n": 5}})",
  };
  int identical = 0;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    const fs::path scene = dir / ("scene" + std::to_string(i) + ".json");
    const fs::path out = dir / ("cli" + std::to_string(i) + ".ppm");
    std::ofstream(scene) << scenes[i];
    const std::string cmd =
        "\"" + std::string(BATIK_CLI_PATH) + "\" render \"" + scene.string() + "\" -o \"" + out.string() + "\"";
    const int rc = std::system(cmd.c_str());
    const auto res = client.Post("/api/render?format=ppm", scenes[i], "application/json");
    if (rc == 0 && res && res->status == 200 && res->body == read_file(out) && !res->body.empty()) ++identical;
  }

  std::mt19937_64 rng(9);
  const std::vector<std::string> bases = {
      R"({"equation": "x^2+y^2+z^2-1", "zoom": 1, "width": 32, "height": 32})",
      R"js({"equation": "(x^2+y^2+z^3-z^2)*((x-y)(x+y)-a)((x+y)(x-y)+a)", "params": {"a": 0.02}, "zoom": 0.91,
          "width": 24, "height": 24, "colors": {"front": "#1f3a68", "back": "#7a9cc6", "background": "#faf6ee"}})js",
      R"({"equation": "x^2+y^2+z^2-a", "params": {"a": 0.5}, "width": 16, "height": 16, "steps": 64,
          "shading": "lit", "layout": {"mode": "grid", "n": 2}})",
  };
  int rejected = 0, crashed = 0;
  std::set<int> statuses;
  for (int i = 0; i < kFuzzDocuments; ++i) {
    const std::string body = mutate(bases[static_cast<std::size_t>(i) % bases.size()], rng);
    const auto res = client.Post("/api/render?format=ppm", body, "application/json");
    if (!res) {
      ++crashed;
      continue;
    }
    statuses.insert(res->status);
    const json err = json::parse(res->body, nullptr, false);
    if (res->status >= 400 && res->status < 500 && err.is_object() && err.contains("error")) ++rejected;
  }
  const auto alive = client.Get("/api/presets");
  const bool still_up = alive && alive->status == 200;

  service.stop();
  runner.join();
  fs::remove_all(dir);

  std::string codes;
  for (int s : statuses) codes += (codes.empty() ? "" : ",") + std::to_string(s);
  return {identical == static_cast<int>(scenes.size()) && rejected == kFuzzDocuments && crashed == 0 && still_up,
          std::to_string(identical) + "/" + std::to_string(scenes.size()) + " CLI/HTTP PPM identical, " +
              std::to_string(rejected) + "/" + std::to_string(kFuzzDocuments) + " fuzzed documents got 4xx JSON (" +
              codes + "), service " + (still_up ? "alive" : "DOWN")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"parser round-trip", parser_round_trip},     {"gradient correctness", gradient_correctness},
      {"degree oracle", degree_oracle},             {"sphere-identity sweep", sphere_identity},
      {"hypocycloid closure", curve_closure},       {"ray-cast accuracy", ray_cast_accuracy},
      {"preset reproduction", preset_reproduction}, {"SOS shell property", shell_property},
      {"facade parity", facade_parity},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << i + 1 << ". " << criteria[i].first << ": " << o.detail << " ["
              << fmt("%.2f s", seconds_since(t0)) << "]" << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
