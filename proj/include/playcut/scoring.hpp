#pragma once

#include <map>
#include <string>
#include <vector>

#include "playcut/llm.hpp"
#include "playcut/sabermetrics.hpp"

namespace playcut {

/// Per-play score ledger. final_score is strictly additive:
/// base_score + llm_adjustment + li_bonus, range [2, 100].
struct ScoredPlay {
  int play_id = 0;
  double wpa = 0.0;
  double li = 0.0;
  int base_score = 0;      // [1,60]
  int llm_adjustment = 0;  // [1,20]
  int li_bonus = 0;        // [0,20]
  int final_score = 0;
};

struct RankRecord {
  int play_id = 0;
  int r_wpa = 0;    // 1 = largest |WPA|
  int r_li = 0;     // 1 = largest LI
  int delta_r = 0;  // r_wpa - r_li
};

/// Dense 1..N ranks by descending |wpa| and descending li; ties go to the
/// earlier play.
std::vector<RankRecord> rank_plays(const std::vector<AnnotatedPlay>& annotated);

/// Bonus schedule over plays with delta_r > 0, ordered by descending
/// delta_r (ties chronological): position 1 gets +20, position 2 gets +19,
/// down to +1 at position 20, zero beyond. Everything else gets 0.
std::map<int, int> li_rank_correction(const std::vector<RankRecord>& ranks);

/// Decision stage: contextual analysis per play, WPA-to-score transform,
/// LLM adjustment, then the leverage rank correction. Chronological output;
/// throws (emitting nothing) on any backend failure.
std::vector<ScoredPlay> decide(const std::vector<AnnotatedPlay>& annotated,
                               llm::Backend& backend,
                               const llm::PromptLibrary& prompts,
                               const llm::LLMRequestConfig& cfg);

/// Audit report, one record per line.
std::string serialize_scored(const std::vector<ScoredPlay>& scored);

}  // namespace playcut
