#include "batik/service.hpp"

#include <condition_variable>
#include <cstdlib>
#include <mutex>
#include <optional>
#include <thread>
#include <utility>

#include <httplib.h>
#include <json.hpp>

#include "batik/scene_io.hpp"
#include "batik/spherical.hpp"

namespace batik {
namespace {

using nlohmann::json;

HttpReply error_reply(int status, const std::string& message, std::optional<std::size_t> offset = std::nullopt) {
  json body = {{"error", message}};
  if (offset) body["offset"] = *offset;
  return {status, "application/json", body.dump(-1, ' ', false, json::error_handler_t::replace), {}};
}

std::optional<std::size_t> parse_size(std::string_view s) {
  if (s.empty() || s.size() > 9) return std::nullopt;
  std::size_t n = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return std::nullopt;
    n = n * 10 + static_cast<std::size_t>(c - '0');
  }
  return n == 0 ? std::nullopt : std::optional<std::size_t>(n);
}

// Width and height of the image a document produces.
std::pair<std::size_t, std::size_t> output_size(const SceneDocument& doc) {
  const std::size_t w = doc.scene.width, h = doc.scene.height;
  if (!doc.layout) return {w, h};
  const MotifLayout& l = *doc.layout;
  if (l.mode == LayoutMode::Grid) return {l.count * w, l.count * h};
  return {l.canvas_w != 0 ? l.canvas_w : 2 * w, l.canvas_h != 0 ? l.canvas_h : 2 * h};
}

// Admits up to `workers` renders at once and queues up to `queue_cap` more.
class RenderGate {
 public:
  RenderGate(unsigned workers, std::size_t queue_cap) : workers_(workers), queue_cap_(queue_cap) {}

  bool acquire() {
    std::unique_lock lock(mutex_);
    if (running_ >= workers_) {
      if (waiting_ >= queue_cap_) return false;
      ++waiting_;
      cv_.wait(lock, [&] { return running_ < workers_; });
      --waiting_;
    }
    ++running_;
    return true;
  }

  void release() {
    {
      std::lock_guard lock(mutex_);
      --running_;
    }
    cv_.notify_one();
  }

 private:
  const unsigned workers_;
  const std::size_t queue_cap_;
  std::mutex mutex_;
  std::condition_variable cv_;
  unsigned running_ = 0;
  std::size_t waiting_ = 0;
};

}  // namespace

ServiceConfig ServiceConfig::from_env() {
  ServiceConfig c;
  const char* cap = std::getenv("BATIK_SIZE_CAP");
  if (cap == nullptr || *cap == '\0') return c;
  const std::string_view s(cap);
  const auto x = s.find('x');
  const auto w = parse_size(s.substr(0, x));
  const auto h = x == std::string_view::npos ? w : parse_size(s.substr(x + 1));
  if (!w || !h) throw std::invalid_argument("BATIK_SIZE_CAP must be WxH or N, got '" + std::string(s) + "'");
  c.max_width = *w;
  c.max_height = *h;
  return c;
}

struct Service::Impl {
  explicit Impl(ServiceConfig c)
      : config(c),
        workers(c.workers != 0 ? c.workers : std::max(1u, std::thread::hardware_concurrency())),
        gate(workers, c.queue_cap) {}

  ServiceConfig config;
  unsigned workers;
  mutable RenderGate gate;
  httplib::Server server;
  bool bound = false;
};

Service::Service(ServiceConfig config) : impl_(std::make_unique<Impl>(config)) {
  httplib::Server& s = impl_->server;
  const auto send = [](httplib::Response& res, const HttpReply& r) {
    res.status = r.status;
    for (const auto& [k, v] : r.headers) res.set_header(k, v);
    res.set_content(r.body, r.content_type);
  };
  s.Post("/api/render", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, render(req.body, req.has_param("format") ? req.get_param_value("format") : ""));
  });
  s.Get("/api/presets", [this, send](const httplib::Request&, httplib::Response& res) { send(res, presets()); });
  s.Post("/api/validate",
         [this, send](const httplib::Request& req, httplib::Response& res) { send(res, validate(req.body)); });
  s.Post("/api/curve", [this, send](const httplib::Request& req, httplib::Response& res) { send(res, curve(req.body)); });
  s.Post("/api/lift", [this, send](const httplib::Request& req, httplib::Response& res) { send(res, lift(req.body)); });

  // Replies without a body (unknown route, oversized payload, ...) still get a JSON error.
  s.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    const HttpReply r = error_reply(res.status, res.status == 404   ? "no such endpoint"
                                                : res.status == 413 ? "request body too large"
                                                                    : "request rejected");
    res.set_content(r.body, r.content_type);
  });
  s.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    const HttpReply r = error_reply(500, what);
    res.status = 500;
    res.set_content(r.body, r.content_type);
  });
  s.set_payload_max_length(impl_->config.max_body_bytes);
  // Enough connection threads for every admitted render plus the queue, so the gate decides 429s.
  const std::size_t threads = impl_->workers + impl_->config.queue_cap + 4;
  s.new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
}

Service::~Service() { stop(); }

const ServiceConfig& Service::config() const noexcept { return impl_->config; }

HttpReply Service::render(std::string_view body, std::string_view format) const {
  const auto fmt = format.empty() ? std::optional(ImageFormat::Png) : parse_image_format(format);
  if (!fmt) return error_reply(400, "format must be png or ppm");
  SceneDocument doc;
  try {
    doc = parse_scene_document(body);
  } catch (const SchemaError& e) {
    return error_reply(400, e.what());
  } catch (const EquationError& e) {
    return error_reply(422, e.what(), e.offset());
  }
  const ServiceConfig& cfg = impl_->config;
  const auto [w, h] = output_size(doc);
  if (doc.scene.width > cfg.max_width || doc.scene.height > cfg.max_height || w > cfg.max_width ||
      h > cfg.max_height) {
    return error_reply(413, "image " + std::to_string(w) + "x" + std::to_string(h) + " exceeds the cap of " +
                                std::to_string(cfg.max_width) + "x" + std::to_string(cfg.max_height));
  }

  if (!impl_->gate.acquire()) return error_reply(429, "render queue is full");
  std::optional<MotifRender> out;
  std::string failure;
  try {
    out = render_document(doc, RenderOptions{cfg.render_threads, std::nullopt});
  } catch (const std::invalid_argument& e) {
    failure = e.what();
  }
  impl_->gate.release();
  if (!out) return error_reply(422, failure);

  Diagnostics d;
  d.free_params = free_parameters(doc.scene.equation);
  d.degree = degree(doc.scene.equation);
  d.render = out->stats;
  HttpReply r{200, std::string(content_type(*fmt)), encode_image(out->image, *fmt), {}};
  r.headers["X-Render-Stats"] = diagnostics_to_json(d);
  return r;
}

HttpReply Service::presets() const { return {200, "application/json", catalog_to_json(), {}}; }

HttpReply Service::validate(std::string_view body) const {
  std::string text(body);
  if (!body.empty() && (body.front() == '{' || body.front() == '"')) {
    const json j = json::parse(body, nullptr, false);
    if (j.is_string()) {
      text = j.get<std::string>();
    } else if (j.is_object() && j.contains("equation") && j["equation"].is_string()) {
      text = j["equation"].get<std::string>();
    }
  }
  return {200, "application/json", diagnostics_to_json(diagnose(text)), {}};
}

HttpReply Service::curve(std::string_view body) const {
  try {
    const CurveRequest req = parse_curve_request(body);
    const Polyline2 poly = sample_curve(req.spec);
    const std::string colors[] = {req.color};
    return {200, "image/svg+xml", to_svg(std::span<const Polyline2>(&poly, 1), colors), {}};
  } catch (const std::invalid_argument& e) {
    return error_reply(400, e.what());
  }
}

HttpReply Service::lift(std::string_view body) const {
  try {
    const LiftRequest req = parse_lift_request(body);
    const SurfaceMesh mesh = mesh_lift(req.spec, req.n_theta, req.n_phi, req.phi_min);
    if (req.json) return {200, "application/json", mesh_to_json(mesh), {}};
    return {200, "model/obj", to_obj(mesh), {}};
  } catch (const std::invalid_argument& e) {
    return error_reply(400, e.what());
  }
}

int Service::bind(const std::string& host, int port) {
  if (port == 0) {
    const int p = impl_->server.bind_to_any_port(host);
    impl_->bound = p > 0;
    return impl_->bound ? p : -1;
  }
  impl_->bound = impl_->server.bind_to_port(host, port);
  return impl_->bound ? port : -1;
}

bool Service::run() { return impl_->bound && impl_->server.listen_after_bind(); }

void Service::wait_until_ready() const { impl_->server.wait_until_ready(); }

void Service::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace batik
