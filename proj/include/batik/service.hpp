#pragma once

// HTTP/1.1 JSON API over the render, curve, lift and motif pipelines.
//
//   POST /api/render?format=png|ppm  scene JSON -> image, X-Render-Stats header
//   GET  /api/presets                catalog JSON
//   POST /api/validate               equation -> diagnostics JSON (always 200)
//   POST /api/curve                  curve request JSON -> SVG
//   POST /api/lift                   lift request JSON -> OBJ or mesh JSON
//
// Errors carry a JSON body {"error": message[, "offset": n]}: 400 for schema
// violations, 413 for images over the size cap, 422 for unusable equations,
// 429 when the render queue is full.

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <string_view>

namespace batik {

struct ServiceConfig {
  /// Largest accepted output image, per side.
  std::size_t max_width = 2048;
  std::size_t max_height = 2048;
  /// Renders waiting for a worker beyond which requests get 429.
  std::size_t queue_cap = 32;
  /// Concurrent renders; 0 means std::thread::hardware_concurrency().
  unsigned workers = 0;
  /// Threads inside each render; 0 means hardware concurrency.
  unsigned render_threads = 0;
  std::size_t max_body_bytes = 1 << 20;

  /// Defaults overridden by BATIK_SIZE_CAP ("WxH" or "N" for NxN).
  /// Throws std::invalid_argument for a malformed value.
  static ServiceConfig from_env();
};

struct HttpReply {
  int status = 200;
  std::string content_type;
  std::string body;
  std::map<std::string, std::string> headers;
};

/// Handlers are safe to call concurrently; they share only the immutable
/// preset catalog and the render gate.
class Service {
 public:
  explicit Service(ServiceConfig config = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  const ServiceConfig& config() const noexcept;

  HttpReply render(std::string_view body, std::string_view format) const;
  HttpReply presets() const;
  /// Accepts {"equation": "..."} when the body is a JSON object, otherwise the raw body.
  HttpReply validate(std::string_view body) const;
  HttpReply curve(std::string_view body) const;
  HttpReply lift(std::string_view body) const;

  /// Binds the listening socket; port 0 picks a free one. Returns the bound port or -1.
  int bind(const std::string& host, int port);
  /// Serves on the bound socket until stop(). Returns false if not bound.
  bool run();
  /// Blocks until run() is accepting connections or has failed.
  void wait_until_ready() const;
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace batik
