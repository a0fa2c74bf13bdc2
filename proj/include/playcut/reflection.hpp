#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "playcut/gamelog.hpp"
#include "playcut/scoring.hpp"

namespace playcut {

enum class Theme { Any, Offense, Defense };

const char* to_string(Theme t);
Theme theme_from_string(const std::string& s);

struct Preferences {
  std::set<int> late_innings{8, 9};
  int late_inning_points = 0;  // 0 = off
  std::set<std::string> key_players;
  int key_player_points = 0;
  Theme theme = Theme::Any;
  int k = 60;
};

/// ScoredPlay plus the preference delta; the original ledger is untouched.
struct PreferredPlay {
  ScoredPlay scored;
  int preference_points = 0;
  bool eligible = true;  // theme filter

  int effective_score() const { return scored.final_score + preference_points; }
};

struct PreferenceResult {
  std::vector<PreferredPlay> plays;
  std::vector<std::string> warnings;  // e.g. key player matching no actor
};

struct ChosenClip {
  int play_id = 0;
  int final_score = 0;  // effective score at selection time
  std::int64_t clip_start_ms = 0;
  std::int64_t clip_end_ms = 0;
};

struct HighlightSelection {
  std::string game_id;
  std::vector<ChosenClip> chosen;  // chronological
  int k_requested = 0;
  int k_effective = 0;
};

struct ManifestClip {
  int play_id = 0;
  std::int64_t clip_start_ms = 0;
  std::int64_t clip_end_ms = 0;
  std::string result;
  int final_score = 0;
};

struct Manifest {
  std::string game_id;
  std::vector<ManifestClip> clips;
};

PreferenceResult apply_preferences(const std::vector<ScoredPlay>& scored,
                                   const GameLog& log,
                                   const Preferences& prefs);

/// Top k by effective score (ties go to the earlier play) among eligible
/// plays, returned in chronological order. Clip windows are filled by
/// emit_manifest.
HighlightSelection select_top_k(const std::vector<PreferredPlay>& plays, int k,
                                const std::string& game_id);
HighlightSelection select_top_k(const std::vector<ScoredPlay>& scored, int k,
                                const std::string& game_id);

/// Clip windows around each chosen play's timestamp: pre-roll floored at 0,
/// post-roll capped at the next play in the log, and trimmed so no window
/// reaches into the next chosen clip.
Manifest emit_manifest(HighlightSelection& selection, const GameLog& log,
                       std::int64_t pre_roll_ms = 5000,
                       std::int64_t post_roll_ms = 20000);

std::string serialize_selection(const HighlightSelection& selection);
HighlightSelection parse_selection(const std::string& text);
std::string serialize_manifest(const Manifest& manifest);

}  // namespace playcut
