#pragma once

#include <condition_variable>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "osct/scoring.hpp"
#include "osct/trace.hpp"

namespace osct {

// OpenAI-compatible chat-completion endpoint. The credential is never stored
// in the config; it is read from the environment variable named here.
struct EndpointConfig {
  std::string base_url = "https://openrouter.ai/api/v1";
  std::string model = "meta-llama/llama-3.3-70b-instruct";
  double timeout_seconds = 60.0;
  int max_concurrency = 4;
  double hardness_gate = 0.85;  // only stories with H strictly above this are sent
  std::string api_key_env = "OSCT_API_KEY";
};

void to_json(nlohmann::json& j, const EndpointConfig& c);
void from_json(const nlohmann::json& j, EndpointConfig& c);
EndpointConfig load_endpoint_config(const std::string& path);

inline constexpr const char* kRenderTemplate = "template";
inline constexpr const char* kRenderLlm = "llm";
inline constexpr const char* kRenderFallback = "template_fallback";

struct RenderOutcome {
  std::string text;
  std::string mode;  // kRenderTemplate, kRenderLlm or kRenderFallback
  std::optional<std::string> fallback_reason;
};

// The request body sent for one story: system instructions plus the
// serialized events and a template draft.
nlohmann::json chat_request(const StoryTrace& trace, const std::string& model);

// Thread-safe. Stories at or below the hardness gate get the template text
// without touching the network; failures fall back to the template text with
// the reason recorded. Every dispatched request and its outcome are appended
// to the audit log (JSON Lines) when one is configured.
class LlmRenderer {
 public:
  LlmRenderer(EndpointConfig config, std::optional<std::string> api_key, const std::string& audit_path = {});

  // Reads the key from the configured environment variable.
  static std::optional<std::string> key_from_env(const EndpointConfig& config);

  RenderOutcome render(const std::string& story_id, const StoryTrace& trace, const HardnessReport& report);

  std::size_t dispatched() const;

 private:
  RenderOutcome call(const std::string& story_id, const StoryTrace& trace);
  void audit(const nlohmann::json& entry);

  EndpointConfig config_;
  std::optional<std::string> api_key_;
  mutable std::mutex mutex_;
  std::condition_variable slots_cv_;
  int in_flight_ = 0;
  std::size_t dispatched_ = 0;
  std::ofstream audit_;
};

}  // namespace osct
