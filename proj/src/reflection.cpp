#include "playcut/reflection.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

namespace playcut {

using ojson = nlohmann::ordered_json;

const char* to_string(Theme t) {
  switch (t) {
    case Theme::Any: return "any";
    case Theme::Offense: return "offense";
    case Theme::Defense: return "defense";
  }
  return "any";
}

Theme theme_from_string(const std::string& s) {
  if (s == "any") return Theme::Any;
  if (s == "offense") return Theme::Offense;
  if (s == "defense") return Theme::Defense;
  throw std::invalid_argument("bad theme: " + s);
}

namespace {

bool matches_theme(EventKind kind, Theme theme) {
  switch (theme) {
    case Theme::Any:
      return true;
    case Theme::Offense:
      return kind == EventKind::Hit || kind == EventKind::HomeRun ||
             kind == EventKind::Walk || kind == EventKind::Steal;
    case Theme::Defense:
      return kind == EventKind::Out || kind == EventKind::Strikeout ||
             kind == EventKind::Error;
  }
  return true;
}

}  // namespace

PreferenceResult apply_preferences(const std::vector<ScoredPlay>& scored,
                                   const GameLog& log,
                                   const Preferences& prefs) {
  PreferenceResult result;
  result.plays.reserve(scored.size());

  std::set<std::string> roster;
  for (const Play& p : log.plays)
    if (p.actor) roster.insert(*p.actor);
  for (const std::string& name : prefs.key_players)
    if (prefs.key_player_points > 0 && !roster.count(name))
      result.warnings.push_back("key player '" + name +
                                "' matches no play in game " + log.game_id);

  for (const ScoredPlay& s : scored) {
    const Play* play = log.find_play(s.play_id);
    if (!play) throw UnknownPlayId(s.play_id);
    PreferredPlay pp;
    pp.scored = s;
    if (prefs.late_inning_points > 0 &&
        prefs.late_innings.count(play->state_before.inning))
      pp.preference_points += prefs.late_inning_points;
    if (prefs.key_player_points > 0 && play->actor &&
        prefs.key_players.count(*play->actor))
      pp.preference_points += prefs.key_player_points;
    pp.eligible = matches_theme(play->event_kind, prefs.theme);
    result.plays.push_back(pp);
  }
  return result;
}

HighlightSelection select_top_k(const std::vector<PreferredPlay>& plays, int k,
                                const std::string& game_id) {
  std::vector<size_t> eligible;
  for (size_t i = 0; i < plays.size(); ++i)
    if (plays[i].eligible) eligible.push_back(i);

  // Score descending; ties go to the earlier play (input order is
  // chronological, play ids strictly increasing).
  std::stable_sort(eligible.begin(), eligible.end(), [&](size_t a, size_t b) {
    return plays[a].effective_score() > plays[b].effective_score();
  });

  HighlightSelection sel;
  sel.game_id = game_id;
  sel.k_requested = k;
  sel.k_effective = static_cast<int>(
      std::min<size_t>(static_cast<size_t>(std::max(k, 0)), eligible.size()));
  eligible.resize(static_cast<size_t>(sel.k_effective));
  std::sort(eligible.begin(), eligible.end());  // back to chronological
  for (size_t i : eligible)
    sel.chosen.push_back(
        {plays[i].scored.play_id, plays[i].effective_score(), 0, 0});
  return sel;
}

HighlightSelection select_top_k(const std::vector<ScoredPlay>& scored, int k,
                                const std::string& game_id) {
  std::vector<PreferredPlay> plays;
  plays.reserve(scored.size());
  for (const ScoredPlay& s : scored) plays.push_back({s, 0, true});
  return select_top_k(plays, k, game_id);
}

Manifest emit_manifest(HighlightSelection& selection, const GameLog& log,
                       std::int64_t pre_roll_ms, std::int64_t post_roll_ms) {
  std::unordered_map<int, size_t> index_of;
  for (size_t i = 0; i < log.plays.size(); ++i)
    index_of[log.plays[i].id] = i;

  Manifest manifest;
  manifest.game_id = selection.game_id;
  for (ChosenClip& clip : selection.chosen) {
    auto it = index_of.find(clip.play_id);
    if (it == index_of.end()) throw UnknownPlayId(clip.play_id);
    const Play& play = log.plays[it->second];
    clip.clip_start_ms = std::max<std::int64_t>(0, play.timestamp_ms - pre_roll_ms);
    std::int64_t end = play.timestamp_ms + post_roll_ms;
    if (it->second + 1 < log.plays.size())
      end = std::min(end, log.plays[it->second + 1].timestamp_ms);
    clip.clip_end_ms = std::max(clip.clip_start_ms, end);
  }

  // Trim collisions with the next chosen clip.
  for (size_t i = 0; i + 1 < selection.chosen.size(); ++i) {
    ChosenClip& cur = selection.chosen[i];
    const ChosenClip& next = selection.chosen[i + 1];
    if (cur.clip_end_ms > next.clip_start_ms)
      cur.clip_end_ms = std::max(cur.clip_start_ms, next.clip_start_ms);
  }

  for (const ChosenClip& clip : selection.chosen) {
    const Play& play = log.plays[index_of.at(clip.play_id)];
    manifest.clips.push_back({clip.play_id, clip.clip_start_ms, clip.clip_end_ms,
                              play.result, clip.final_score});
  }
  return manifest;
}

std::string serialize_selection(const HighlightSelection& selection) {
  ojson doc;
  doc["game_id"] = selection.game_id;
  doc["k_requested"] = selection.k_requested;
  doc["k_effective"] = selection.k_effective;
  ojson arr = ojson::array();
  for (const ChosenClip& c : selection.chosen) {
    ojson rec;
    rec["play_id"] = c.play_id;
    rec["final_score"] = c.final_score;
    rec["clip_start_ms"] = c.clip_start_ms;
    rec["clip_end_ms"] = c.clip_end_ms;
    arr.push_back(std::move(rec));
  }
  doc["chosen"] = std::move(arr);
  return doc.dump(2) + "\n";
}

HighlightSelection parse_selection(const std::string& text) {
  ojson doc = ojson::parse(text);
  HighlightSelection sel;
  sel.game_id = doc.at("game_id").get<std::string>();
  sel.k_requested = doc.at("k_requested").get<int>();
  sel.k_effective = doc.at("k_effective").get<int>();
  for (const auto& rec : doc.at("chosen"))
    sel.chosen.push_back({rec.at("play_id").get<int>(),
                          rec.at("final_score").get<int>(),
                          rec.at("clip_start_ms").get<std::int64_t>(),
                          rec.at("clip_end_ms").get<std::int64_t>()});
  return sel;
}

std::string serialize_manifest(const Manifest& manifest) {
  ojson doc;
  doc["game_id"] = manifest.game_id;
  ojson arr = ojson::array();
  for (const ManifestClip& c : manifest.clips) {
    ojson rec;
    rec["play_id"] = c.play_id;
    rec["clip_start_ms"] = c.clip_start_ms;
    rec["clip_end_ms"] = c.clip_end_ms;
    rec["result"] = c.result;
    rec["final_score"] = c.final_score;
    arr.push_back(std::move(rec));
  }
  doc["clips"] = std::move(arr);
  return doc.dump(2) + "\n";
}

}  // namespace playcut
