#include "playcut/llm.hpp"

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include <httplib.h>

namespace playcut::llm {

namespace {

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string ids_to_string(const std::set<int>& ids) {
  std::string out = "{";
  bool first = true;
  for (int id : ids) {
    if (!first) out += ",";
    out += std::to_string(id);
    first = false;
  }
  return out + "}";
}

}  // namespace

UnresolvedPlaceholder::UnresolvedPlaceholder(std::vector<std::string> names)
    : LlmError("unresolved placeholders: " + join(names, ", ")),
      names_(std::move(names)) {}

SchemaViolation::SchemaViolation(std::string what, std::set<int> missing,
                                 std::set<int> extra)
    : LlmError(std::move(what) +
               (missing.empty() ? "" : " missing=" + ids_to_string(missing)) +
               (extra.empty() ? "" : " extra=" + ids_to_string(extra))),
      missing_(std::move(missing)),
      extra_(std::move(extra)) {}

const char* PromptLibrary::file_name(TemplateId id) {
  switch (id) {
    case TemplateId::WpaAnalysis: return "wpa_analysis.txt";
    case TemplateId::WpaTransform: return "wpa_transform.txt";
    case TemplateId::ScoreAdjust: return "score_adjust.txt";
  }
  return "";
}

PromptLibrary::PromptLibrary(const std::string& dir) {
  for (TemplateId id : {TemplateId::WpaAnalysis, TemplateId::WpaTransform,
                        TemplateId::ScoreAdjust}) {
    std::string path = dir + "/" + file_name(id);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingTemplate(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    templates_[static_cast<int>(id)] = buf.str();
  }
}

std::string PromptLibrary::render(TemplateId id, const json& payload) const {
  const std::string& tmpl = templates_[static_cast<int>(id)];
  std::string out;
  out.reserve(tmpl.size());
  std::vector<std::string> unresolved;
  size_t pos = 0;
  while (true) {
    size_t open = tmpl.find("{{", pos);
    if (open == std::string::npos) {
      out.append(tmpl, pos, std::string::npos);
      break;
    }
    size_t close = tmpl.find("}}", open);
    if (close == std::string::npos) {
      out.append(tmpl, pos, std::string::npos);
      break;
    }
    out.append(tmpl, pos, open - pos);
    std::string name = tmpl.substr(open + 2, close - open - 2);
    if (payload.contains(name)) {
      const json& v = payload.at(name);
      out += v.is_string() ? v.get<std::string>() : v.dump();
    } else {
      unresolved.push_back(name);
    }
    pos = close + 2;
  }
  if (!unresolved.empty()) throw UnresolvedPlaceholder(std::move(unresolved));
  return out;
}

json validate_response(const std::string& raw, const std::set<int>& expected_ids,
                       ResponseSchema schema) {
  // Tolerate replies wrapped in markdown code fences.
  std::string text = raw;
  size_t fence = text.find("```");
  if (fence != std::string::npos) {
    size_t start = text.find('\n', fence);
    size_t end = text.rfind("```");
    if (start != std::string::npos && end > start)
      text = text.substr(start + 1, end - start - 1);
  }

  json parsed;
  try {
    parsed = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaViolation(std::string("reply is not valid JSON: ") + e.what());
  }
  if (parsed.is_object()) parsed = json::array({parsed});
  if (!parsed.is_array()) throw SchemaViolation("reply is not a JSON array");

  std::set<int> seen;
  for (const json& rec : parsed) {
    if (!rec.is_object() || !rec.contains("id") ||
        !rec["id"].is_number_integer())
      throw SchemaViolation("record lacks integer field 'id'");
    int rid = rec["id"].get<int>();
    if (!seen.insert(rid).second)
      throw SchemaViolation("duplicate id " + std::to_string(rid));
    if (schema == ResponseSchema::Analysis) {
      if (!rec.contains("WPA_analysis") || !rec["WPA_analysis"].is_string() ||
          rec["WPA_analysis"].get<std::string>().empty())
        throw SchemaViolation("record lacks non-empty string 'WPA_analysis'");
    } else {
      if (!rec.contains("score") || !rec["score"].is_number_integer())
        throw SchemaViolation("record lacks integer field 'score'");
      if (rec.contains("rationale") && !rec["rationale"].is_string())
        throw SchemaViolation("field 'rationale' is not a string");
    }
  }

  std::set<int> missing, extra;
  std::set_difference(expected_ids.begin(), expected_ids.end(), seen.begin(),
                      seen.end(), std::inserter(missing, missing.end()));
  std::set_difference(seen.begin(), seen.end(), expected_ids.begin(),
                      expected_ids.end(), std::inserter(extra, extra.end()));
  if (!missing.empty() || !extra.empty())
    throw SchemaViolation("id coverage mismatch", std::move(missing),
                          std::move(extra));
  return parsed;
}

std::pair<int, int> score_band(double wpa) {
  double a = std::abs(wpa);
  if (a >= 0.15) return {40, 60};
  if (a >= 0.05) return {20, 39};
  return {1, 19};
}

std::string inning_info_text(const GameState& s) {
  std::string ord;
  int n = s.inning;
  if (n % 100 / 10 == 1) {
    ord = "th";
  } else {
    switch (n % 10) {
      case 1: ord = "st"; break;
      case 2: ord = "nd"; break;
      case 3: ord = "rd"; break;
      default: ord = "th"; break;
    }
  }
  return std::string(s.half == Half::Top ? "Top" : "Bottom") + " of the " +
         std::to_string(n) + ord;
}

// ---------------------------------------------------------------------------
// Mock backend

namespace {

int inning_from_prose(const std::string& text) {
  size_t i = text.find_first_of("0123456789");
  return i == std::string::npos ? 1 : std::stoi(text.substr(i));
}

enum class Band { Low, Moderate, High };

Band band_of(double wpa) {
  double a = std::abs(wpa);
  if (a >= 0.15) return Band::High;
  if (a >= 0.05) return Band::Moderate;
  return Band::Low;
}

// Pure function of (sign, band, lateness). "pivotal" is the keyword the
// adjust rule keys on.
std::string mock_analysis_text(double wpa, int inning) {
  Band band = band_of(wpa);
  bool late = inning >= 8;
  std::string text;
  if (wpa > 0)
    text = "This play improved the home team's chances of winning.";
  else if (wpa < 0)
    text = "This play benefited the away team, increasing their chances of winning.";
  else
    text = "This play left the win probability unchanged.";
  if (band == Band::High)
    text += " The large swing marks a pivotal momentum shift in the game.";
  else if (band == Band::Moderate)
    text += late ? " Coming in a late inning, it stands as a pivotal moment."
                 : " The moderate swing kept the game's momentum in motion.";
  else
    text += " The change was minimal, part of the routine ebb and flow.";
  return text;
}

std::string mock_transform(const json& payload) {
  json out = json::array();
  for (const json& p : payload.at("plays")) {
    double wpa = p.at("WPA").get<double>();
    auto [lo, hi] = score_band(wpa);
    int score = (lo + hi) / 2;
    int inning = inning_from_prose(p.at("inning info").get<std::string>());
    std::string rationale;
    if (inning >= 8) {
      score = std::min(score + 5, hi);
      rationale = "band midpoint with late-inning shift";
    } else {
      rationale = "band midpoint";
    }
    out.push_back({{"id", p.at("id").get<int>()},
                   {"score", score},
                   {"rationale", rationale}});
  }
  return out.dump();
}

std::string mock_adjust(const json& payload) {
  json out = json::array();
  for (const json& p : payload.at("plays")) {
    int base = p.at("score").get<int>();
    const std::string& analysis = p.at("WPA analysis").get_ref<const std::string&>();
    bool pivotal = analysis.find("pivotal") != std::string::npos;
    int adj = pivotal ? 10 : 2;
    out.push_back({{"id", p.at("id").get<int>()},
                   {"score", base + adj},
                   {"rationale", pivotal ? "significant strategic impact"
                                         : "minimal strategic impact"}});
  }
  return out.dump();
}

}  // namespace

std::string MockBackend::complete(TemplateId id, const std::string& prompt,
                                  const json& payload,
                                  const LLMRequestConfig& cfg) {
  (void)prompt;
  (void)cfg;
  switch (id) {
    case TemplateId::WpaAnalysis: {
      json out = {
          {"id", payload.at("id").get<int>()},
          {"WPA_analysis",
           mock_analysis_text(payload.at("WPA").get<double>(),
                              inning_from_prose(
                                  payload.at("inning").get<std::string>()))}};
      return out.dump();
    }
    case TemplateId::WpaTransform:
      return mock_transform(payload);
    case TemplateId::ScoreAdjust:
      return mock_adjust(payload);
  }
  throw LlmError("unknown template id");
}

// ---------------------------------------------------------------------------
// HTTP backend

namespace {

std::mutex inflight_mutex;
int inflight = 0;
std::condition_variable_any inflight_cv;

struct InflightSlot {
  int limit;
  explicit InflightSlot(int limit) : limit(std::max(limit, 1)) {
    std::unique_lock lock(inflight_mutex);
    inflight_cv.wait(lock, [&] { return inflight < this->limit; });
    ++inflight;
  }
  ~InflightSlot() {
    std::lock_guard lock(inflight_mutex);
    --inflight;
    inflight_cv.notify_one();
  }
};

}  // namespace

std::string HttpBackend::complete(TemplateId id, const std::string& prompt,
                                  const json& payload,
                                  const LLMRequestConfig& cfg) {
  (void)id;
  (void)payload;
  std::string endpoint = cfg.endpoint;
  if (endpoint.empty())
    if (const char* env = std::getenv("LLM_ENDPOINT")) endpoint = env;
  if (endpoint.empty())
    throw BackendUnavailable("no endpoint configured (set LLM_ENDPOINT)");

  // Split scheme://host[:port] from the request path.
  size_t scheme = endpoint.find("://");
  size_t path_start = scheme == std::string::npos
                          ? endpoint.find('/')
                          : endpoint.find('/', scheme + 3);
  std::string base = path_start == std::string::npos
                         ? endpoint
                         : endpoint.substr(0, path_start);
  std::string path = path_start == std::string::npos
                         ? std::string("/v1/chat/completions")
                         : endpoint.substr(path_start);

  json body = {
      {"model", cfg.model_name},
      {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
      {"temperature", cfg.temperature},
      {"top_p", cfg.top_p},
      {"max_tokens", cfg.max_tokens},
  };

  InflightSlot slot(cfg.max_in_flight);
  httplib::Client client(base);
  client.set_connection_timeout(0, cfg.timeout_ms * 1000LL);
  client.set_read_timeout(cfg.timeout_ms / 1000, (cfg.timeout_ms % 1000) * 1000);
  httplib::Headers headers;
  if (const char* key = std::getenv("LLM_API_KEY"))
    headers.emplace("Authorization", std::string("Bearer ") + key);

  auto res = client.Post(path, headers, body.dump(), "application/json");
  if (!res)
    throw BackendUnavailable("request failed: " + httplib::to_string(res.error()));
  if (res->status != 200)
    throw BackendUnavailable("backend returned HTTP " +
                             std::to_string(res->status));
  try {
    json reply = json::parse(res->body);
    return reply.at("choices").at(0).at("message").at("content")
        .get<std::string>();
  } catch (const json::exception& e) {
    throw BackendUnavailable(std::string("malformed completion reply: ") +
                             e.what());
  }
}

// ---------------------------------------------------------------------------
// Operations

namespace {

json complete_validated(Backend& backend, const PromptLibrary& prompts,
                        TemplateId id, const json& payload,
                        const std::set<int>& expected_ids, ResponseSchema schema,
                        const LLMRequestConfig& cfg) {
  std::string prompt = prompts.render(id, payload);
  int attempts = backend.deterministic() ? 1 : 1 + std::max(cfg.max_retries, 0);
  for (int attempt = 1;; ++attempt) {
    std::string raw = backend.complete(id, prompt, payload, cfg);
    try {
      return validate_response(raw, expected_ids, schema);
    } catch (const SchemaViolation&) {
      if (attempt >= attempts) throw;
    }
  }
}

constexpr size_t kBatchSize = 40;

}  // namespace

ContextAnalysis analyze_wpa(Backend& backend, const PromptLibrary& prompts,
                            const Play& play, const std::vector<Play>& window,
                            double wpa, const LLMRequestConfig& cfg) {
  json prev = json::array();
  for (const Play& p : window)
    prev.push_back({{"id", p.id}, {"result", p.result}});
  json payload = {
      {"id", play.id},
      {"result", play.result},
      {"inning", inning_info_text(play.state_before)},
      {"WPA", wpa},
      {"previous_plays", prev},
  };
  json parsed = complete_validated(backend, prompts, TemplateId::WpaAnalysis,
                                   payload, {play.id}, ResponseSchema::Analysis,
                                   cfg);
  return {play.id, parsed[0]["WPA_analysis"].get<std::string>()};
}

std::vector<ScoreResponse> transform_wpa_scores(
    Backend& backend, const PromptLibrary& prompts,
    const std::vector<TransformInput>& plays, const LLMRequestConfig& cfg) {
  if (plays.empty()) throw LlmError("transform_wpa_scores: empty input");
  std::map<int, ScoreResponse> by_id;
  for (size_t start = 0; start < plays.size(); start += kBatchSize) {
    size_t end = std::min(plays.size(), start + kBatchSize);
    json arr = json::array();
    std::set<int> ids;
    for (size_t i = start; i < end; ++i) {
      arr.push_back({{"id", plays[i].id},
                     {"result", plays[i].result},
                     {"inning info", plays[i].inning_info},
                     {"WPA", plays[i].wpa}});
      ids.insert(plays[i].id);
    }
    json parsed =
        complete_validated(backend, prompts, TemplateId::WpaTransform,
                           {{"plays", arr}}, ids, ResponseSchema::Score, cfg);
    for (const json& rec : parsed) {
      ScoreResponse r;
      r.play_id = rec["id"].get<int>();
      r.score = rec["score"].get<int>();
      r.rationale = rec.value("rationale", "");
      by_id[r.play_id] = std::move(r);
    }
  }
  std::vector<ScoreResponse> out;
  out.reserve(plays.size());
  for (const TransformInput& p : plays) {
    ScoreResponse r = by_id.at(p.id);
    auto [lo, hi] = score_band(p.wpa);
    if (r.score < lo || r.score > hi) {
      r.score = std::clamp(r.score, lo, hi);
      r.clamped = true;
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ScoreResponse> adjust_scores(Backend& backend,
                                         const PromptLibrary& prompts,
                                         const std::vector<AdjustInput>& plays,
                                         const LLMRequestConfig& cfg) {
  if (plays.empty()) throw LlmError("adjust_scores: empty input");
  std::map<int, ScoreResponse> by_id;
  for (size_t start = 0; start < plays.size(); start += kBatchSize) {
    size_t end = std::min(plays.size(), start + kBatchSize);
    json arr = json::array();
    std::set<int> ids;
    for (size_t i = start; i < end; ++i) {
      arr.push_back({{"id", plays[i].id},
                     {"result", plays[i].result},
                     {"inning info", plays[i].inning_info},
                     {"score", plays[i].base_score},
                     {"WPA analysis", plays[i].wpa_analysis}});
      ids.insert(plays[i].id);
    }
    json parsed =
        complete_validated(backend, prompts, TemplateId::ScoreAdjust,
                           {{"plays", arr}}, ids, ResponseSchema::Score, cfg);
    for (const json& rec : parsed) {
      ScoreResponse r;
      r.play_id = rec["id"].get<int>();
      r.score = rec["score"].get<int>();
      r.rationale = rec.value("rationale", "");
      by_id[r.play_id] = std::move(r);
    }
  }
  std::vector<ScoreResponse> out;
  out.reserve(plays.size());
  for (const AdjustInput& p : plays) {
    ScoreResponse r = by_id.at(p.id);
    int adjustment = r.score - p.base_score;
    if (adjustment < 1 || adjustment > 20) {
      adjustment = std::clamp(adjustment, 1, 20);
      r.score = p.base_score + adjustment;
      r.clamped = true;
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace playcut::llm
