#pragma once

#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "playcut/gamelog.hpp"

namespace playcut::llm {

using json = nlohmann::json;

enum class TemplateId { WpaAnalysis, WpaTransform, ScoreAdjust };

struct LLMRequestConfig {
  double temperature = 0.0;
  double top_p = 0.1;
  int max_tokens = 10000;
  std::string model_name;
  std::string endpoint;  // overrides LLM_ENDPOINT when set
  int timeout_ms = 60000;
  int max_retries = 2;
  int max_in_flight = 4;
};

struct ContextAnalysis {
  int play_id = 0;
  std::string wpa_analysis;
};

struct ScoreResponse {
  int play_id = 0;
  int score = 0;
  std::string rationale;
  bool clamped = false;  // set when an out-of-band reply was forced into range
};

class LlmError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
class MissingTemplate : public LlmError {
 public:
  explicit MissingTemplate(const std::string& path)
      : LlmError("missing prompt template: " + path) {}
};
class UnresolvedPlaceholder : public LlmError {
 public:
  explicit UnresolvedPlaceholder(std::vector<std::string> names);
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
};
class BackendUnavailable : public LlmError {
  using LlmError::LlmError;
};
class SchemaViolation : public LlmError {
 public:
  SchemaViolation(std::string what, std::set<int> missing = {},
                  std::set<int> extra = {});
  const std::set<int>& missing_ids() const { return missing_; }
  const std::set<int>& extra_ids() const { return extra_; }

 private:
  std::set<int> missing_;
  std::set<int> extra_;
};

/// Loads the three prompt template files ({{placeholder}} markers) from a
/// directory and renders them against structured payloads.
class PromptLibrary {
 public:
  explicit PromptLibrary(const std::string& dir);

  /// Fully substituted prompt; throws UnresolvedPlaceholder listing every
  /// marker the payload did not cover.
  std::string render(TemplateId id, const json& payload) const;

  static const char* file_name(TemplateId id);

 private:
  std::string templates_[3];
};

/// One language-model boundary. `complete` receives both the rendered
/// prompt (what an HTTP backend sends) and the structured payload it was
/// rendered from (what the deterministic mock computes on).
class Backend {
 public:
  virtual ~Backend() = default;
  virtual bool deterministic() const = 0;
  virtual std::string complete(TemplateId id, const std::string& prompt,
                               const json& payload,
                               const LLMRequestConfig& cfg) = 0;
};

/// Pure rule-based stand-in: scores are band midpoints keyed on |WPA| with
/// a late-inning shift, analyses are fixed phrases keyed on the WPA sign
/// and magnitude band. Identical inputs give byte-identical replies.
class MockBackend : public Backend {
 public:
  bool deterministic() const override { return true; }
  std::string complete(TemplateId id, const std::string& prompt,
                       const json& payload,
                       const LLMRequestConfig& cfg) override;
};

/// Chat-completion HTTP client (request/response JSON in the widely used
/// completion-API shape). Endpoint from cfg or LLM_ENDPOINT; key from
/// LLM_API_KEY. In-flight requests are capped at cfg.max_in_flight.
class HttpBackend : public Backend {
 public:
  bool deterministic() const override { return false; }
  std::string complete(TemplateId id, const std::string& prompt,
                       const json& payload,
                       const LLMRequestConfig& cfg) override;
};

enum class ResponseSchema { Analysis, Score };

/// Parses a backend reply and checks it covers exactly expected_ids with
/// correctly typed fields. A bare object is accepted as a one-element
/// array. Throws SchemaViolation with the id diff on failure.
json validate_response(const std::string& raw, const std::set<int>& expected_ids,
                       ResponseSchema schema);

struct TransformInput {
  int id;
  std::string result;
  std::string inning_info;  // e.g. "Top of the 6th"
  double wpa;
};

struct AdjustInput {
  int id;
  std::string result;
  std::string inning_info;
  int base_score;
  std::string wpa_analysis;
};

ContextAnalysis analyze_wpa(Backend& backend, const PromptLibrary& prompts,
                            const Play& play, const std::vector<Play>& window,
                            double wpa, const LLMRequestConfig& cfg);

/// Base importance scores in [1,60]. Replies outside the |WPA| band
/// ([40,60] for |WPA| >= 0.15, [20,39] for 0.05 <= |WPA| < 0.15, [1,19]
/// below) are clamped into it and flagged. Requests are batched at 40
/// plays to stay under the token cap.
std::vector<ScoreResponse> transform_wpa_scores(
    Backend& backend, const PromptLibrary& prompts,
    const std::vector<TransformInput>& plays, const LLMRequestConfig& cfg);

/// Adjusted scores with adjustment = returned - base clamped into [1,20];
/// adjustments are never negative.
std::vector<ScoreResponse> adjust_scores(Backend& backend,
                                         const PromptLibrary& prompts,
                                         const std::vector<AdjustInput>& plays,
                                         const LLMRequestConfig& cfg);

/// [lo,hi] score band implied by |wpa|.
std::pair<int, int> score_band(double wpa);

std::string inning_info_text(const GameState& s);

}  // namespace playcut::llm
