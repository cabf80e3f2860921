#include "osct/llm.hpp"

#include <cstdlib>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "osct/render.hpp"

namespace osct {

namespace {

constexpr const char* kSystemPrompt =
    "You turn symbolic stories into natural English prose. Keep every event, in order. "
    "Keep who witnessed each event and who did not. Keep every lie, bluff and planted memory explicit. "
    "Do not add events, characters, objects or places. Reply with the story text only.";

struct UrlParts {
  std::string origin;  // scheme://host[:port]
  std::string path;    // prefix, no trailing slash
};

UrlParts split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error(ErrorKind::Config, "endpoint URL needs a scheme: " + url);
  const auto path_at = url.find('/', scheme_end + 3);
  UrlParts p{url.substr(0, path_at), path_at == std::string::npos ? "" : url.substr(path_at)};
  while (!p.path.empty() && p.path.back() == '/') p.path.pop_back();
  return p;
}

}  // namespace

void to_json(nlohmann::json& j, const EndpointConfig& c) {
  j = nlohmann::json{{"base_url", c.base_url},
                     {"model", c.model},
                     {"timeout_seconds", c.timeout_seconds},
                     {"max_concurrency", c.max_concurrency},
                     {"hardness_gate", c.hardness_gate},
                     {"api_key_env", c.api_key_env}};
}

void from_json(const nlohmann::json& j, EndpointConfig& c) {
  try {
    if (j.contains("base_url")) j.at("base_url").get_to(c.base_url);
    if (j.contains("model")) j.at("model").get_to(c.model);
    if (j.contains("timeout_seconds")) j.at("timeout_seconds").get_to(c.timeout_seconds);
    if (j.contains("max_concurrency")) j.at("max_concurrency").get_to(c.max_concurrency);
    if (j.contains("hardness_gate")) j.at("hardness_gate").get_to(c.hardness_gate);
    if (j.contains("api_key_env")) j.at("api_key_env").get_to(c.api_key_env);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, std::string("endpoint config: ") + e.what());
  }
  if (!(c.timeout_seconds > 0.0)) throw Error(ErrorKind::Config, "endpoint config: timeout_seconds must be positive");
  if (c.max_concurrency < 1) throw Error(ErrorKind::Config, "endpoint config: max_concurrency must be at least 1");
  split_url(c.base_url);
}

EndpointConfig load_endpoint_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read endpoint config " + path);
  try {
    return nlohmann::json::parse(in).get<EndpointConfig>();
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Config, std::string("endpoint config: ") + e.what());
  }
}

nlohmann::json chat_request(const StoryTrace& trace, const std::string& model) {
  nlohmann::json events = nlohmann::json::array();
  for (const auto& e : trace.events) events.push_back(event_to_json(e, trace.final_world));
  const nlohmann::json story{{"world", trace.initial_world.to_spec()}, {"events", events}};
  const std::string user = "Symbolic story:\n" + story.dump(2) + "\n\nLiteral draft:\n" + render_template(trace);
  return {{"model", model},
          {"temperature", 0.7},
          {"messages",
           nlohmann::json::array({{{"role", "system"}, {"content", kSystemPrompt}}, {{"role", "user"}, {"content", user}}})}};
}

LlmRenderer::LlmRenderer(EndpointConfig config, std::optional<std::string> api_key, const std::string& audit_path)
    : config_(std::move(config)), api_key_(std::move(api_key)) {
  if (!audit_path.empty()) {
    audit_.open(audit_path, std::ios::app);
    if (!audit_) throw Error(ErrorKind::Io, "cannot open audit log " + audit_path);
  }
}

std::optional<std::string> LlmRenderer::key_from_env(const EndpointConfig& config) {
  const char* v = std::getenv(config.api_key_env.c_str());
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::string(v);
}

std::size_t LlmRenderer::dispatched() const {
  std::lock_guard lock(mutex_);
  return dispatched_;
}

void LlmRenderer::audit(const nlohmann::json& entry) {
  std::lock_guard lock(mutex_);
  if (audit_.is_open()) audit_ << entry.dump() << '\n' << std::flush;
}

RenderOutcome LlmRenderer::render(const std::string& story_id, const StoryTrace& trace, const HardnessReport& report) {
  if (!(report.composite_h > config_.hardness_gate)) return {render_template(trace), kRenderTemplate, std::nullopt};
  if (!api_key_) {
    return {render_template(trace), kRenderFallback, "no credential in " + config_.api_key_env};
  }
  {
    std::unique_lock lock(mutex_);
    slots_cv_.wait(lock, [&] { return in_flight_ < config_.max_concurrency; });
    ++in_flight_;
    ++dispatched_;
  }
  RenderOutcome out;
  try {
    out = call(story_id, trace);
  } catch (...) {
    std::lock_guard lock(mutex_);
    --in_flight_;
    slots_cv_.notify_one();
    throw;
  }
  {
    std::lock_guard lock(mutex_);
    --in_flight_;
  }
  slots_cv_.notify_one();
  return out;
}

RenderOutcome LlmRenderer::call(const std::string& story_id, const StoryTrace& trace) {
  const auto url = split_url(config_.base_url);
  const nlohmann::json request = chat_request(trace, config_.model);
  nlohmann::json entry{{"story_id", story_id}, {"url", config_.base_url + "/chat/completions"}, {"request", request}};
  auto fallback = [&](const std::string& reason) {
    entry["error"] = reason;
    audit(entry);
    return RenderOutcome{render_template(trace), kRenderFallback, reason};
  };

  std::unique_ptr<httplib::Client> client;
  try {
    client = std::make_unique<httplib::Client>(url.origin);
  } catch (const std::exception& e) {
    return fallback(std::string("bad endpoint: ") + e.what());
  }
  if (!client->is_valid()) return fallback("endpoint not usable in this build: " + url.origin);
  const auto timeout = std::chrono::duration<double>(config_.timeout_seconds);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
  client->set_connection_timeout(secs.count(), usecs.count());
  client->set_read_timeout(secs.count(), usecs.count());
  client->set_write_timeout(secs.count(), usecs.count());
  client->set_bearer_token_auth(*api_key_);

  auto res = client->Post(url.path + "/chat/completions", request.dump(), "application/json");
  if (!res) return fallback("request failed: " + httplib::to_string(res.error()));
  entry["status"] = res->status;
  entry["response"] = res->body;
  if (res->status != 200) return fallback("HTTP status " + std::to_string(res->status));
  try {
    const auto body = nlohmann::json::parse(res->body);
    const auto text = body.at("choices").at(0).at("message").at("content").get<std::string>();
    if (text.empty()) return fallback("empty completion");
    audit(entry);
    return {text, kRenderLlm, std::nullopt};
  } catch (const nlohmann::json::exception& e) {
    return fallback(std::string("unreadable response: ") + e.what());
  }
}

}  // namespace osct
