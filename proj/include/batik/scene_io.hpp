#pragma once

// JSON documents shared by the CLI and the HTTP service: scenes (with an
// optional motif block), curve and lift requests, and equation diagnostics.
// Schema: docs/scene.schema.json.

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "batik/curve.hpp"
#include "batik/image.hpp"
#include "batik/motif.hpp"
#include "batik/render.hpp"

namespace batik {

/// Malformed document: bad JSON, wrong types, unknown keys, out-of-range values.
class SchemaError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Well-formed document whose equation cannot be used: parse errors, unbound
/// or unused parameters, unknown presets.
class EquationError : public std::invalid_argument {
 public:
  EquationError(const std::string& message, std::optional<std::size_t> offset = std::nullopt)
      : std::invalid_argument(message), offset_(offset) {}
  std::optional<std::size_t> offset() const noexcept { return offset_; }

 private:
  std::optional<std::size_t> offset_;
};

struct SceneDocument {
  /// Equation as written; the scene holds its parsed form.
  std::string equation_text;
  Scene scene;
  std::optional<std::string> preset;
  std::map<std::string, std::pair<double, double>> ranges;
  std::optional<MotifLayout> layout;
  Palette palette;
};

/// Parses and validates a scene document. Keys:
///   preset (defaults for everything else), equation, params, ranges, zoom,
///   width, height, colors {front, back, background}, steps, shading,
///   supersample, layout {mode, n, mirror, width, height}, palette {"#old": "#new"}.
/// Either `preset` or `equation` is required. Throws SchemaError or EquationError.
SceneDocument parse_scene_document(std::string_view json_text);

/// Inverse of parse_scene_document, with every field written out.
std::string scene_document_to_json(const SceneDocument& doc);

/// Renders the scene, then applies the motif layout and palette when present.
struct MotifRender {
  Image image;
  RenderStats stats;
};
MotifRender render_document(const SceneDocument& doc, const RenderOptions& options = {});

struct Diagnostic {
  std::size_t offset = 0;
  std::string message;
};

struct Diagnostics {
  std::vector<Diagnostic> errors;
  std::vector<std::string> free_params;
  /// Absent when the equation does not parse or is not polynomial.
  std::optional<unsigned> degree;
  std::optional<RenderStats> render;
};

/// Never throws for any input text; problems are listed in `errors` with
/// offsets no larger than the text length.
Diagnostics diagnose(std::string_view equation_text);
std::string diagnostics_to_json(const Diagnostics& d);

/// {a, b, samples?, theta_max?, color?} -> curve spec and stroke color.
struct CurveRequest {
  CurveSpec spec;
  std::string color = "#3b1f0e";
};
CurveRequest parse_curve_request(std::string_view json_text);

/// {a, b, ntheta, nphi, phi_min?, format? ("obj" | "json")}.
struct LiftRequest {
  CurveSpec spec{1.0, 1.0};
  std::size_t n_theta = 0;
  std::size_t n_phi = 0;
  double phi_min = 0.0;
  bool json = false;
};
LiftRequest parse_lift_request(std::string_view json_text);

/// Upper bound on lift mesh vertices accepted from documents.
inline constexpr std::size_t kMaxLiftVertices = 4'000'000;

}  // namespace batik
