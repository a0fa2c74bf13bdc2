#include "playcut/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace playcut {

using ojson = nlohmann::ordered_json;

namespace {

// Dense ranks 1..N by descending key; ties keep input (chronological) order.
std::vector<int> dense_ranks(const std::vector<double>& keys) {
  std::vector<size_t> order(keys.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return keys[a] > keys[b]; });
  std::vector<int> ranks(keys.size());
  for (size_t pos = 0; pos < order.size(); ++pos)
    ranks[order[pos]] = static_cast<int>(pos) + 1;
  return ranks;
}

}  // namespace

std::vector<RankRecord> rank_plays(const std::vector<AnnotatedPlay>& annotated) {
  std::vector<double> abs_wpa, li;
  abs_wpa.reserve(annotated.size());
  li.reserve(annotated.size());
  for (const AnnotatedPlay& a : annotated) {
    abs_wpa.push_back(std::abs(a.wpa));
    li.push_back(a.li);
  }
  std::vector<int> r_wpa = dense_ranks(abs_wpa);
  std::vector<int> r_li = dense_ranks(li);
  std::vector<RankRecord> out;
  out.reserve(annotated.size());
  for (size_t i = 0; i < annotated.size(); ++i)
    out.push_back({annotated[i].play.id, r_wpa[i], r_li[i],
                   r_wpa[i] - r_li[i]});
  return out;
}

std::map<int, int> li_rank_correction(const std::vector<RankRecord>& ranks) {
  std::vector<size_t> order(ranks.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return ranks[a].delta_r > ranks[b].delta_r;
  });
  std::map<int, int> bonus;
  int position = 0;
  for (size_t idx : order) {
    const RankRecord& r = ranks[idx];
    if (r.delta_r > 0) {
      ++position;
      bonus[r.play_id] = std::max(0, 21 - position);
    } else {
      bonus[r.play_id] = 0;
    }
  }
  return bonus;
}

std::vector<ScoredPlay> decide(const std::vector<AnnotatedPlay>& annotated,
                               llm::Backend& backend,
                               const llm::PromptLibrary& prompts,
                               const llm::LLMRequestConfig& cfg) {
  if (annotated.empty()) return {};

  // Contextual analysis with a sliding window of up to 5 prior plays.
  std::vector<llm::ContextAnalysis> analyses;
  analyses.reserve(annotated.size());
  for (size_t i = 0; i < annotated.size(); ++i) {
    std::vector<Play> window;
    size_t start = i >= 5 ? i - 5 : 0;
    for (size_t j = start; j < i; ++j) window.push_back(annotated[j].play);
    analyses.push_back(llm::analyze_wpa(backend, prompts, annotated[i].play,
                                        window, annotated[i].wpa, cfg));
  }

  std::vector<llm::TransformInput> transform_in;
  transform_in.reserve(annotated.size());
  for (const AnnotatedPlay& a : annotated)
    transform_in.push_back({a.play.id, a.play.result,
                            llm::inning_info_text(a.play.state_before), a.wpa});
  std::vector<llm::ScoreResponse> base =
      llm::transform_wpa_scores(backend, prompts, transform_in, cfg);

  std::vector<llm::AdjustInput> adjust_in;
  adjust_in.reserve(annotated.size());
  for (size_t i = 0; i < annotated.size(); ++i)
    adjust_in.push_back({annotated[i].play.id, annotated[i].play.result,
                         llm::inning_info_text(annotated[i].play.state_before),
                         base[i].score, analyses[i].wpa_analysis});
  std::vector<llm::ScoreResponse> adjusted =
      llm::adjust_scores(backend, prompts, adjust_in, cfg);

  std::map<int, int> bonus = li_rank_correction(rank_plays(annotated));

  std::vector<ScoredPlay> out;
  out.reserve(annotated.size());
  for (size_t i = 0; i < annotated.size(); ++i) {
    ScoredPlay s;
    s.play_id = annotated[i].play.id;
    s.wpa = annotated[i].wpa;
    s.li = annotated[i].li;
    s.base_score = base[i].score;
    s.llm_adjustment = adjusted[i].score - base[i].score;
    s.li_bonus = bonus.at(s.play_id);
    s.final_score = s.base_score + s.llm_adjustment + s.li_bonus;
    out.push_back(s);
  }
  return out;
}

std::string serialize_scored(const std::vector<ScoredPlay>& scored) {
  std::ostringstream out;
  for (const ScoredPlay& s : scored) {
    ojson rec;
    rec["play_id"] = s.play_id;
    rec["wpa"] = s.wpa;
    rec["li"] = s.li;
    rec["base_score"] = s.base_score;
    rec["llm_adjustment"] = s.llm_adjustment;
    rec["li_bonus"] = s.li_bonus;
    rec["final_score"] = s.final_score;
    out << rec.dump() << "\n";
  }
  return out.str();
}

}  // namespace playcut
