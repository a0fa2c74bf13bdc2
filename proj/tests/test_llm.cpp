#include <doctest.h>

#include <random>

#include "playcut/llm.hpp"

using namespace playcut;
using namespace playcut::llm;

namespace {

PromptLibrary& prompts() {
  static PromptLibrary lib(PROMPT_DIR);
  return lib;
}

Play make_play(int id, double /*wpa*/, int inning = 6, Half half = Half::Top) {
  Play p;
  p.id = id;
  p.result = "Son Joo-in: Single to left field";
  p.actor = "Son Joo-in";
  p.event_kind = EventKind::Hit;
  p.state_before = {inning, half, 1, 3, 0};
  p.state_after = {inning, half, 1, 3, -1};
  return p;
}

// Replays a scripted sequence of raw replies; non-deterministic so the
// retry policy applies.
class ScriptedBackend : public Backend {
 public:
  explicit ScriptedBackend(std::vector<std::string> replies)
      : replies_(std::move(replies)) {}
  bool deterministic() const override { return false; }
  std::string complete(TemplateId, const std::string&, const json&,
                       const LLMRequestConfig&) override {
    ++calls_;
    if (replies_.empty()) throw BackendUnavailable("script exhausted");
    std::string r = replies_.front();
    replies_.erase(replies_.begin());
    return r;
  }
  int calls() const { return calls_; }

 private:
  std::vector<std::string> replies_;
  int calls_ = 0;
};

// Delegates to the mock while counting requests.
class CountingMock : public Backend {
 public:
  bool deterministic() const override { return true; }
  std::string complete(TemplateId id, const std::string& prompt,
                       const json& payload,
                       const LLMRequestConfig& cfg) override {
    ++calls_;
    return inner_.complete(id, prompt, payload, cfg);
  }
  int calls() const { return calls_; }

 private:
  MockBackend inner_;
  int calls_ = 0;
};

}  // namespace

TEST_CASE("render_prompt substitutes every field of the analysis payload") {
  json payload = {
      {"id", 35},
      {"result", "Son Joo-in: Single to left field"},
      {"inning", "Top of the 6th"},
      {"WPA", -0.052},
      {"previous_plays",
       json::array({{{"id", 31}, {"result", "Kim Min-seok: Flyout to center field"}},
                    {{"id", 32}, {"result", "Park Ji-hwan: Strikeout swinging"}},
                    {{"id", 33}, {"result", "Choi Jung: Walk"}},
                    {{"id", 34}, {"result", "Lee Dae-ho: Single to right field"}}})},
  };
  std::string text = prompts().render(TemplateId::WpaAnalysis, payload);
  CHECK(text.find("\"id\": 35") != std::string::npos);
  CHECK(text.find("Son Joo-in: Single to left field") != std::string::npos);
  CHECK(text.find("Top of the 6th") != std::string::npos);
  CHECK(text.find("-0.052") != std::string::npos);
  CHECK(text.find("Lee Dae-ho: Single to right field") != std::string::npos);
  CHECK(text.find("{{") == std::string::npos);
}

TEST_CASE("render_prompt accepts an empty context list") {
  json payload = {{"id", 1},
                  {"result", "Leadoff walk"},
                  {"inning", "Top of the 1st"},
                  {"WPA", 0.02},
                  {"previous_plays", json::array()}};
  std::string text = prompts().render(TemplateId::WpaAnalysis, payload);
  CHECK(text.find("[]") != std::string::npos);
  CHECK(text.find("{{") == std::string::npos);
}

TEST_CASE("render_prompt reports missing payload fields by name") {
  json payload = {{"id", 1},
                  {"result", "x"},
                  {"inning", "Top of the 1st"},
                  {"previous_plays", json::array()}};
  try {
    prompts().render(TemplateId::WpaAnalysis, payload);
    FAIL("expected UnresolvedPlaceholder");
  } catch (const UnresolvedPlaceholder& e) {
    REQUIRE(e.names().size() == 1);
    CHECK(e.names()[0] == "WPA");
  }
}

TEST_CASE("missing template directory") {
  CHECK_THROWS_AS(PromptLibrary("/nonexistent-prompts"), MissingTemplate);
}

TEST_CASE("analyze_wpa via mock is deterministic and id-stable") {
  MockBackend mock;
  LLMRequestConfig cfg;
  Play p = make_play(35, -0.052);
  std::vector<Play> window = {make_play(33, 0.0), make_play(34, 0.0)};
  ContextAnalysis a = analyze_wpa(mock, prompts(), p, window, -0.052, cfg);
  CHECK(a.play_id == 35);
  CHECK_FALSE(a.wpa_analysis.empty());
  CHECK(a.wpa_analysis.find("away team") != std::string::npos);
  ContextAnalysis b = analyze_wpa(mock, prompts(), p, window, -0.052, cfg);
  CHECK(a.wpa_analysis == b.wpa_analysis);
}

TEST_CASE("wrong play id triggers one retry then succeeds") {
  ScriptedBackend backend({R"({"id":36,"WPA_analysis":"wrong play"})",
                           R"({"id":35,"WPA_analysis":"right play"})"});
  LLMRequestConfig cfg;
  Play p = make_play(35, -0.052);
  ContextAnalysis a = analyze_wpa(backend, prompts(), p, {}, -0.052, cfg);
  CHECK(a.wpa_analysis == "right play");
  CHECK(backend.calls() == 2);
}

TEST_CASE("persistent schema violations give up after max_retries") {
  ScriptedBackend backend({"not json", "not json", "not json", "not json"});
  LLMRequestConfig cfg;
  cfg.max_retries = 2;
  Play p = make_play(1, 0.1);
  CHECK_THROWS_AS(analyze_wpa(backend, prompts(), p, {}, 0.1, cfg),
                  SchemaViolation);
  CHECK(backend.calls() == 3);  // initial + 2 retries
}

TEST_CASE("transform scores land in the |WPA| band") {
  MockBackend mock;
  LLMRequestConfig cfg;
  auto score_of = [&](double wpa, int inning = 5) {
    std::vector<TransformInput> in = {
        {1, "result", (inning >= 10 ? "Top of the " + std::to_string(inning) + "th"
                                    : "Top of the " + std::to_string(inning) + "th"),
         wpa}};
    return transform_wpa_scores(mock, prompts(), in, cfg)[0].score;
  };
  int high = score_of(0.20);
  CHECK(high >= 40);
  CHECK(high <= 60);
  int moderate = score_of(0.052);
  CHECK(moderate >= 20);
  CHECK(moderate <= 39);
  int low = score_of(0.01);
  CHECK(low >= 1);
  CHECK(low <= 19);
  // Left-closed boundaries.
  int at_15 = score_of(0.15);
  CHECK(at_15 >= 40);
  int at_05 = score_of(0.05);
  CHECK(at_05 >= 20);
  CHECK(at_05 <= 39);
  // Negative WPA uses the same magnitude bands.
  CHECK(score_of(-0.20) == high);
}

TEST_CASE("late innings shift the mock transform within the band") {
  MockBackend mock;
  LLMRequestConfig cfg;
  std::vector<TransformInput> in = {{1, "r", "Top of the 5th", 0.08},
                                    {2, "r", "Bottom of the 9th", 0.08}};
  auto out = transform_wpa_scores(mock, prompts(), in, cfg);
  CHECK(out[1].score == out[0].score + 5);
  CHECK(out[1].score <= 39);
}

TEST_CASE("out-of-band replies are clamped and flagged") {
  // Scripted reply gives 55 for a low-impact play (band [1,19]).
  ScriptedBackend backend({R"([{"id":1,"score":55,"rationale":"x"}])"});
  LLMRequestConfig cfg;
  std::vector<TransformInput> in = {{1, "r", "Top of the 2nd", 0.01}};
  auto out = transform_wpa_scores(backend, prompts(), in, cfg);
  CHECK(out[0].score == 19);
  CHECK(out[0].clamped);
}

TEST_CASE("adjust_scores") {
  MockBackend mock;
  LLMRequestConfig cfg;
  SUBCASE("pivotal analysis lands in the +10..+20 band") {
    std::vector<AdjustInput> in = {
        {1, "r", "Bottom of the 9th", 45,
         "The large swing marks a pivotal momentum shift in the game."}};
    auto out = adjust_scores(mock, prompts(), in, cfg);
    CHECK(out[0].score >= 55);
    CHECK(out[0].score <= 65);
  }
  SUBCASE("minimal analysis lands in the +1..+5 band") {
    std::vector<AdjustInput> in = {
        {1, "r", "Top of the 2nd", 10, "Routine play, minor importance."}};
    auto out = adjust_scores(mock, prompts(), in, cfg);
    CHECK(out[0].score >= 11);
    CHECK(out[0].score <= 15);
  }
  SUBCASE("negative adjustments are clamped to +1 and flagged") {
    ScriptedBackend backend({R"([{"id":1,"score":7,"rationale":"x"}])"});
    std::vector<AdjustInput> in = {{1, "r", "Top of the 2nd", 10, "minor"}};
    auto out = adjust_scores(backend, prompts(), in, cfg);
    CHECK(out[0].score == 11);
    CHECK(out[0].clamped);
  }
}

TEST_CASE("validate_response") {
  SUBCASE("exact id cover is accepted") {
    json parsed = validate_response(
        R"([{"id":1,"score":5},{"id":2,"score":6},{"id":3,"score":7}])",
        {1, 2, 3}, ResponseSchema::Score);
    CHECK(parsed.size() == 3);
  }
  SUBCASE("missing id is listed") {
    try {
      validate_response(R"([{"id":1,"score":5},{"id":2,"score":6}])", {1, 2, 3},
                        ResponseSchema::Score);
      FAIL("expected SchemaViolation");
    } catch (const SchemaViolation& e) {
      CHECK(e.missing_ids() == std::set<int>{3});
      CHECK(e.extra_ids().empty());
    }
  }
  SUBCASE("non-integer score names the field") {
    CHECK_THROWS_WITH_AS(
        validate_response(R"([{"id":1,"score":"high"}])", {1},
                          ResponseSchema::Score),
        "record lacks integer field 'score'", SchemaViolation);
  }
  SUBCASE("markdown fences are tolerated") {
    json parsed = validate_response("```json\n[{\"id\":1,\"score\":5}]\n```",
                                    {1}, ResponseSchema::Score);
    CHECK(parsed[0]["score"] == 5);
  }
}

TEST_CASE("large inputs are batched and merged by id") {
  CountingMock mock;
  LLMRequestConfig cfg;
  std::vector<TransformInput> in;
  for (int i = 1; i <= 95; ++i)
    in.push_back({i, "r", "Top of the 3rd", 0.01 * (i % 20)});
  auto out = transform_wpa_scores(mock, prompts(), in, cfg);
  REQUIRE(out.size() == 95);
  CHECK(mock.calls() == 3);  // 40 + 40 + 15
  for (size_t i = 0; i < out.size(); ++i)
    CHECK(out[i].play_id == in[i].id);
}

TEST_CASE("band safety holds for random WPA values") {
  MockBackend mock;
  LLMRequestConfig cfg;
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> wpa(-1.0, 1.0);
  std::vector<TransformInput> in;
  for (int i = 1; i <= 200; ++i)
    in.push_back({i, "r", i % 2 ? "Top of the 3rd" : "Bottom of the 9th",
                  wpa(rng)});
  auto out = transform_wpa_scores(mock, prompts(), in, cfg);
  for (size_t i = 0; i < in.size(); ++i) {
    auto [lo, hi] = score_band(in[i].wpa);
    CHECK(out[i].score >= lo);
    CHECK(out[i].score <= hi);
  }
}
