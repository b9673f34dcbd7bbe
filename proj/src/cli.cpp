#include "batik/cli.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "batik/io_error.hpp"
#include "batik/kernels.hpp"
#include "batik/scene_io.hpp"
#include "batik/service.hpp"
#include "batik/spherical.hpp"

namespace batik {
namespace {

using nlohmann::json;

// Bad command-line syntax (exit 1), as opposed to bad input content (exit 2).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("failed reading '" + path + "'");
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out.flush()) throw IoError("failed writing '" + path + "'");
}

double parse_double(std::string_view s, const std::string& what) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) throw UsageError(what + ": '" + std::string(s) + "' is not a number");
  return v;
}

std::pair<std::size_t, std::size_t> parse_size(const std::string& s, const char* what) {
  const auto x = s.find('x');
  const auto number = [&](std::string_view part) {
    std::size_t v = 0;
    const auto [end, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (part.empty() || ec != std::errc() || end != part.data() + part.size()) {
      throw UsageError(std::string(what) + " must look like WxH, got '" + s + "'");
    }
    return v;
  };
  if (x == std::string::npos) throw UsageError(std::string(what) + " must look like WxH, got '" + s + "'");
  return {number(std::string_view(s).substr(0, x)), number(std::string_view(s).substr(x + 1))};
}

ImageFormat output_format(const std::string& path, const std::string& format) {
  if (!format.empty()) {
    const auto f = parse_image_format(format);
    if (!f) throw UsageError("--format must be png or ppm");
    return *f;
  }
  const auto dot = path.rfind('.');
  if (dot != std::string::npos) {
    std::string ext = path.substr(dot + 1);
    for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (ext == "ppm") return ImageFormat::Ppm;
  }
  return ImageFormat::Png;
}

// Flags shared by render and motif; they overlay a scene document.
struct SceneFlags {
  std::string scene_file;
  std::string preset;
  std::vector<std::string> params;
  std::optional<double> zoom;
  std::string size;
  std::optional<std::size_t> steps;
  std::string shading;
  bool supersample = false;
  std::string output;
  std::string format;
  std::string save_scene;
  bool stats = false;
  unsigned threads = 0;
  std::string backend;

  void add_to(CLI::App* cmd, bool scene_positional) {
    if (scene_positional) cmd->add_option("scene", scene_file, "Scene JSON file");
    cmd->add_option("--preset", preset, "Catalog preset name");
    cmd->add_option("--param", params, "Parameter binding k=v (repeatable)");
    cmd->add_option("--zoom", zoom, "Zoom factor; the view spans [-1/zoom, 1/zoom]");
    cmd->add_option("--size", size, "Render size WxH");
    cmd->add_option("--steps", steps, "March steps per ray");
    cmd->add_option("--shading", shading, "flat or lit");
    cmd->add_flag("--supersample", supersample, "2x2 samples per pixel");
    cmd->add_option("-o,--output", output, "Output image (.png or .ppm)")->required();
    cmd->add_option("--format", format, "png or ppm (default: from the output extension)");
    cmd->add_option("--save-scene", save_scene, "Also write the materialized scene JSON");
    cmd->add_flag("--stats", stats, "Print render diagnostics JSON");
    cmd->add_option("--threads", threads, "Render threads (0: all cores)");
    cmd->add_option("--backend", backend, "Evaluation kernel: scalar, avx2 or neon");
  }

  json materialize() const {
    if (scene_file.empty() == preset.empty()) throw UsageError("give exactly one of a scene file or --preset");
    json doc = json::object();
    if (!scene_file.empty()) {
      doc = json::parse(read_text(scene_file), nullptr, false);
      if (!doc.is_object()) throw InputError("'" + scene_file + "' is not a JSON object");
    } else {
      doc["preset"] = preset;
    }
    for (const std::string& kv : params) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) throw UsageError("--param expects k=v, got '" + kv + "'");
      if (!doc.contains("params") || !doc["params"].is_object()) doc["params"] = json::object();
      doc["params"][kv.substr(0, eq)] = parse_double(std::string_view(kv).substr(eq + 1), "--param " + kv.substr(0, eq));
    }
    if (zoom) doc["zoom"] = *zoom;
    if (!size.empty()) {
      const auto [w, h] = parse_size(size, "--size");
      doc["width"] = w;
      doc["height"] = h;
    }
    if (steps) doc["steps"] = *steps;
    if (!shading.empty()) doc["shading"] = shading;
    if (supersample) doc["supersample"] = true;
    return doc;
  }

  RenderOptions options() const {
    RenderOptions o{threads, std::nullopt};
    if (!backend.empty()) {
      const auto b = kernels::parse_backend(backend);
      if (!b) throw UsageError("--backend must be scalar, avx2 or neon");
      if (!kernels::backend_supported(*b)) throw InputError("backend '" + backend + "' is not supported on this CPU");
      o.backend = b;
    }
    return o;
  }
};

int render_and_write(const SceneFlags& flags, const json& doc_json, std::ostream& out) {
  const ImageFormat format = output_format(flags.output, flags.format);
  const RenderOptions options = flags.options();
  const SceneDocument doc = parse_scene_document(doc_json.dump());
  const MotifRender r = render_document(doc, options);
  write_image(r.image, flags.output, format);
  if (!flags.save_scene.empty()) write_text(flags.save_scene, scene_document_to_json(doc) + "\n");
  if (flags.stats) {
    Diagnostics d;
    d.free_params = free_parameters(doc.scene.equation);
    d.degree = degree(doc.scene.equation);
    d.render = r.stats;
    out << diagnostics_to_json(d) << "\n";
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Algebraic-surface batik motifs: render, curve, lift, motif, validate, presets, serve", "batik"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  SceneFlags render_flags;
  CLI::App* render = app.add_subcommand("render", "Render a scene file or preset to PNG/PPM");
  render_flags.add_to(render, true);

  SceneFlags motif_flags;
  std::string layout = "grid", canvas;
  std::size_t count = 3;
  bool mirror = false;
  CLI::App* motif = app.add_subcommand("motif", "Render a preset and repeat it as a motif");
  motif_flags.add_to(motif, true);
  motif->add_option("--layout", layout, "fib or grid")->capture_default_str();
  motif->add_option("--n", count, "Fibonacci copies, or copies per grid side")->capture_default_str();
  motif->add_flag("--mirror", mirror, "Flip alternate grid copies");
  motif->add_option("--canvas", canvas, "Fibonacci canvas WxH (default: twice the tile)");

  double curve_a = 0, curve_b = 0;
  std::optional<std::size_t> curve_samples;
  std::optional<double> curve_theta;
  std::string curve_color, curve_svg, curve_json;
  CLI::App* curve = app.add_subcommand("curve", "Trace a modified hypocycloid to SVG");
  curve->add_option("--a", curve_a, "Rolling parameter a > 0")->required();
  curve->add_option("--b", curve_b, "Rolling parameter b > 0")->required();
  curve->add_option("--samples", curve_samples, "Number of points");
  curve->add_option("--theta-max", curve_theta, "Largest theta (default: the closure period)");
  curve->add_option("--color", curve_color, "Stroke color #rrggbb");
  curve->add_option("--svg", curve_svg, "Output SVG file")->required();
  curve->add_option("--json", curve_json, "Also write the polyline as JSON");

  double lift_a = 0, lift_b = 0;
  std::size_t lift_nt = 0, lift_np = 0;
  std::optional<double> lift_phi_min;
  std::string lift_obj, lift_json;
  CLI::App* lift = app.add_subcommand("lift", "Lift a curve onto a surface mesh");
  lift->add_option("--a", lift_a, "Rolling parameter a > 0")->required();
  lift->add_option("--b", lift_b, "Rolling parameter b > 0")->required();
  lift->add_option("--ntheta", lift_nt, "Samples along the curve")->required();
  lift->add_option("--nphi", lift_np, "Samples in polar angle")->required();
  lift->add_option("--phi-min", lift_phi_min, "Polar clearance from the poles");
  lift->add_option("--obj", lift_obj, "Output Wavefront OBJ");
  lift->add_option("--json", lift_json, "Output mesh JSON");

  std::string equation;
  CLI::App* validate = app.add_subcommand("validate", "Check an equation and print diagnostics JSON");
  validate->add_option("equation", equation, "Equation text")->required();

  bool names_only = false;
  CLI::App* presets = app.add_subcommand("presets", "Print the preset catalog as JSON");
  presets->add_flag("--names", names_only, "Only list preset names");

  std::string host = "127.0.0.1";
  std::optional<int> port;
  CLI::App* serve = app.add_subcommand("serve", "Run the HTTP API (port from --port or BATIK_PORT, default 8080)");
  serve->add_option("--host", host, "Listen address")->capture_default_str();
  serve->add_option("--port", port, "Listen port");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (render->parsed()) return render_and_write(render_flags, render_flags.materialize(), out);

    if (motif->parsed()) {
      json doc = motif_flags.materialize();
      json l = {{"mode", layout}, {"n", count}, {"mirror", mirror}};
      if (!canvas.empty()) {
        const auto [w, h] = parse_size(canvas, "--canvas");
        l["width"] = w;
        l["height"] = h;
      }
      doc["layout"] = l;
      return render_and_write(motif_flags, doc, out);
    }

    if (curve->parsed()) {
      json req = {{"a", curve_a}, {"b", curve_b}};
      if (curve_samples) req["samples"] = *curve_samples;
      if (curve_theta) req["theta_max"] = *curve_theta;
      if (!curve_color.empty()) req["color"] = curve_color;
      const CurveRequest c = parse_curve_request(req.dump());
      const Polyline2 poly = sample_curve(c.spec);
      const std::string colors[] = {c.color};
      export_svg(std::span<const Polyline2>(&poly, 1), colors, curve_svg);
      if (!curve_json.empty()) write_text(curve_json, polyline_to_json(poly) + "\n");
      return kExitOk;
    }

    if (lift->parsed()) {
      if (lift_obj.empty() && lift_json.empty()) throw UsageError("lift needs --obj or --json");
      json req = {{"a", lift_a}, {"b", lift_b}, {"ntheta", lift_nt}, {"nphi", lift_np}};
      if (lift_phi_min) req["phi_min"] = *lift_phi_min;
      const LiftRequest l = parse_lift_request(req.dump());
      const SurfaceMesh mesh = mesh_lift(l.spec, l.n_theta, l.n_phi, l.phi_min);
      if (!lift_obj.empty()) export_obj(mesh, lift_obj);
      if (!lift_json.empty()) write_text(lift_json, mesh_to_json(mesh) + "\n");
      return kExitOk;
    }

    if (validate->parsed()) {
      const Diagnostics d = diagnose(equation);
      out << diagnostics_to_json(d) << "\n";
      for (const Diagnostic& e : d.errors) err << "error: offset " << e.offset << ": " << e.message << "\n";
      return d.errors.empty() ? kExitOk : kExitInput;
    }

    if (presets->parsed()) {
      if (names_only) {
        for (const Preset& p : preset_catalog()) out << p.name << "\n";
      } else {
        out << catalog_to_json() << "\n";
      }
      return kExitOk;
    }

    if (serve->parsed()) {
      if (!port) {
        const char* env = std::getenv("BATIK_PORT");
        port = 8080;
        if (env != nullptr && *env != '\0') {
          int p = 0;
          const std::string_view s(env);
          const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), p);
          if (ec != std::errc() || end != s.data() + s.size()) throw UsageError("BATIK_PORT must be a port number");
          port = p;
        }
      }
      if (*port < 0 || *port > 65535) throw UsageError("port must lie in [0, 65535]");
      Service service(ServiceConfig::from_env());
      const int bound = service.bind(host, *port);
      if (bound < 0) throw InputError("cannot listen on " + host + ":" + std::to_string(*port));
      out << "listening on http://" << host << ":" << bound << "\n" << std::flush;
      return service.run() ? kExitOk : kExitInput;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const EquationError& e) {
    err << "error: " << e.what();
    if (e.offset()) err << " (offset " << *e.offset() << ")";
    err << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    // Schema, I/O and remaining input problems.
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitUsage;
}

}  // namespace batik
