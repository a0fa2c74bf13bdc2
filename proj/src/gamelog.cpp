#include "playcut/gamelog.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

namespace playcut {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

const char* to_string(Half h) { return h == Half::Top ? "top" : "bottom"; }

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::Hit: return "Hit";
    case EventKind::HomeRun: return "HomeRun";
    case EventKind::Walk: return "Walk";
    case EventKind::Strikeout: return "Strikeout";
    case EventKind::Out: return "Out";
    case EventKind::Error: return "Error";
    case EventKind::Steal: return "Steal";
    case EventKind::Substitution: return "Substitution";
    case EventKind::Other: return "Other";
  }
  return "Other";
}

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool contains(const std::string& haystack, const char* needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

Half half_from_string(const std::string& s) {
  std::string l = lower(s);
  if (l == "top") return Half::Top;
  if (l == "bottom" || l == "bot") return Half::Bottom;
  throw std::invalid_argument("bad half: " + s);
}

EventKind event_kind_from_string(const std::string& s) {
  if (s == "Hit") return EventKind::Hit;
  if (s == "HomeRun") return EventKind::HomeRun;
  if (s == "Walk") return EventKind::Walk;
  if (s == "Strikeout") return EventKind::Strikeout;
  if (s == "Out") return EventKind::Out;
  if (s == "Error") return EventKind::Error;
  if (s == "Steal") return EventKind::Steal;
  if (s == "Substitution") return EventKind::Substitution;
  if (s == "Other") return EventKind::Other;
  throw std::invalid_argument("bad event kind: " + s);
}

namespace {

// Keyword table over the result text; first match wins, unmatched -> Other.
EventKind classify_result(const std::string& result) {
  std::string r = lower(result);
  if (contains(r, "home run") || contains(r, "homer")) return EventKind::HomeRun;
  if (contains(r, "strikeout") || contains(r, "strikes out") ||
      contains(r, "struck out"))
    return EventKind::Strikeout;
  if (contains(r, "error")) return EventKind::Error;
  if (contains(r, "walk")) return EventKind::Walk;
  if (contains(r, "steal") || contains(r, "stolen base")) return EventKind::Steal;
  if (contains(r, "substitution") || contains(r, "pinch") ||
      contains(r, "replaces") || contains(r, "pitching change"))
    return EventKind::Substitution;
  if (contains(r, "single") || contains(r, "double") || contains(r, "triple") ||
      contains(r, "hit"))
    return EventKind::Hit;
  if (contains(r, "out") || contains(r, "pop") || contains(r, "double play"))
    return EventKind::Out;
  return EventKind::Other;
}

// Accepts prose innings ("Top of the 6th", "bottom of the 12th").
bool parse_prose_inning(const std::string& text, Half& half, int& inning) {
  std::string l = lower(text);
  if (l.rfind("top", 0) == 0)
    half = Half::Top;
  else if (l.rfind("bottom", 0) == 0 || l.rfind("bot", 0) == 0)
    half = Half::Bottom;
  else
    return false;
  size_t i = l.find_first_of("0123456789");
  if (i == std::string::npos) return false;
  inning = std::stoi(l.substr(i));
  return inning >= 1;
}

int require_int(const json& rec, const char* field, int record_index) {
  if (!rec.contains(field) || !rec[field].is_number_integer())
    throw MalformedRecord(std::string("record ") + std::to_string(record_index) +
                              ": missing or non-integer field '" + field + "'",
                          record_index);
  return rec[field].get<int>();
}

std::string require_string(const json& rec, const char* field,
                           int record_index) {
  if (!rec.contains(field) || !rec[field].is_string())
    throw MalformedRecord(std::string("record ") + std::to_string(record_index) +
                              ": missing or non-string field '" + field + "'",
                          record_index);
  return rec[field].get<std::string>();
}

GameState check_state(GameState s, int record_index) {
  if (s.outs < 0 || s.outs > 2 || s.runner_state < 0 || s.runner_state > 7 ||
      s.inning < 1)
    throw MalformedRecord("record " + std::to_string(record_index) +
                              ": game state out of range",
                          record_index);
  return s;
}

}  // namespace

const Play* GameLog::find_play(int play_id) const {
  auto it = std::find_if(plays.begin(), plays.end(),
                         [&](const Play& p) { return p.id == play_id; });
  return it == plays.end() ? nullptr : &*it;
}

GameLog parse_game_log(const std::string& raw) {
  std::istringstream in(raw);
  std::string line;
  GameLog log;
  bool have_header = false;
  int record_index = 0;
  std::unordered_set<int> seen_ids;

  while (std::getline(in, line)) {
    if (line.empty() ||
        line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw MalformedRecord(
          "record " + std::to_string(record_index) + ": " + e.what(),
          record_index);
    }
    if (!rec.is_object())
      throw MalformedRecord("record " + std::to_string(record_index) +
                                ": not an object",
                            record_index);

    if (!have_header) {
      log.game_id = require_string(rec, "game_id", record_index);
      log.home_team = require_string(rec, "home_team", record_index);
      log.away_team = require_string(rec, "away_team", record_index);
      log.final_home_score = require_int(rec, "final_home_score", record_index);
      log.final_away_score = require_int(rec, "final_away_score", record_index);
      have_header = true;
      ++record_index;
      continue;
    }

    Play p;
    p.id = require_int(rec, "id", record_index);
    if (!seen_ids.insert(p.id).second)
      throw DuplicatePlayId(
          "record " + std::to_string(record_index) + ": duplicate play id " +
              std::to_string(p.id),
          record_index);
    if (!rec.contains("timestamp_ms") || !rec["timestamp_ms"].is_number_integer() ||
        rec["timestamp_ms"].get<std::int64_t>() < 0)
      throw MalformedRecord("record " + std::to_string(record_index) +
                                ": missing or bad 'timestamp_ms'",
                            record_index);
    p.timestamp_ms = rec["timestamp_ms"].get<std::int64_t>();
    p.result = require_string(rec, "result", record_index);
    if (rec.contains("actor") && !rec["actor"].is_null())
      p.actor = require_string(rec, "actor", record_index);

    GameState before;
    if (rec.contains("inning") && rec["inning"].is_string()) {
      if (!parse_prose_inning(rec["inning"].get<std::string>(), before.half,
                              before.inning))
        throw MalformedRecord("record " + std::to_string(record_index) +
                                  ": unparseable prose inning",
                              record_index);
    } else {
      before.inning = require_int(rec, "inning", record_index);
      try {
        before.half = half_from_string(require_string(rec, "half", record_index));
      } catch (const std::invalid_argument& e) {
        throw MalformedRecord(
            "record " + std::to_string(record_index) + ": " + e.what(),
            record_index);
      }
    }
    before.outs = require_int(rec, "outs_before", record_index);
    before.runner_state = require_int(rec, "runners_before", record_index);
    before.score_diff = require_int(rec, "score_diff_before", record_index);
    p.state_before = check_state(before, record_index);

    GameState after;
    if (rec.contains("inning_after") && rec["inning_after"].is_string()) {
      if (!parse_prose_inning(rec["inning_after"].get<std::string>(), after.half,
                              after.inning))
        throw MalformedRecord("record " + std::to_string(record_index) +
                                  ": unparseable prose inning_after",
                              record_index);
    } else {
      after.inning = require_int(rec, "inning_after", record_index);
      try {
        after.half =
            half_from_string(require_string(rec, "half_after", record_index));
      } catch (const std::invalid_argument& e) {
        throw MalformedRecord(
            "record " + std::to_string(record_index) + ": " + e.what(),
            record_index);
      }
    }
    after.outs = require_int(rec, "outs_after", record_index);
    after.runner_state = require_int(rec, "runners_after", record_index);
    after.score_diff = require_int(rec, "score_diff_after", record_index);
    p.state_after = check_state(after, record_index);

    if (rec.contains("event_kind") && !rec["event_kind"].is_null()) {
      try {
        p.event_kind =
            event_kind_from_string(require_string(rec, "event_kind", record_index));
      } catch (const std::invalid_argument& e) {
        throw MalformedRecord(
            "record " + std::to_string(record_index) + ": " + e.what(),
            record_index);
      }
    } else {
      p.event_kind = classify_result(p.result);
    }
    p.is_terminal = rec.value("is_terminal", false);

    log.plays.push_back(std::move(p));
    ++record_index;
  }

  if (!have_header) throw EmptyLog("document has no header record");
  if (log.plays.empty()) throw EmptyLog("game log has no plays");
  return log;
}

std::string serialize_game_log(const GameLog& log) {
  std::ostringstream out;
  ojson header;
  header["game_id"] = log.game_id;
  header["home_team"] = log.home_team;
  header["away_team"] = log.away_team;
  header["final_home_score"] = log.final_home_score;
  header["final_away_score"] = log.final_away_score;
  out << header.dump() << "\n";
  for (const Play& p : log.plays) {
    ojson rec;
    rec["id"] = p.id;
    rec["timestamp_ms"] = p.timestamp_ms;
    rec["result"] = p.result;
    if (p.actor) rec["actor"] = *p.actor;
    rec["event_kind"] = to_string(p.event_kind);
    rec["inning"] = p.state_before.inning;
    rec["half"] = to_string(p.state_before.half);
    rec["outs_before"] = p.state_before.outs;
    rec["runners_before"] = p.state_before.runner_state;
    rec["score_diff_before"] = p.state_before.score_diff;
    rec["outs_after"] = p.state_after.outs;
    rec["runners_after"] = p.state_after.runner_state;
    rec["score_diff_after"] = p.state_after.score_diff;
    rec["inning_after"] = p.state_after.inning;
    rec["half_after"] = to_string(p.state_after.half);
    rec["is_terminal"] = p.is_terminal;
    out << rec.dump() << "\n";
  }
  return out.str();
}

std::vector<ValidationIssue> validate_log(const GameLog& log) {
  std::vector<ValidationIssue> issues;
  const auto& plays = log.plays;
  for (size_t i = 0; i < plays.size(); ++i) {
    const Play& p = plays[i];
    if (i > 0) {
      if (plays[i - 1].state_after != p.state_before)
        issues.push_back({IssueKind::ChainBreak, static_cast<int>(i),
                          "state_before of play " + std::to_string(p.id) +
                              " does not match previous state_after"});
      if (p.timestamp_ms < plays[i - 1].timestamp_ms)
        issues.push_back({IssueKind::TimestampOrder, static_cast<int>(i),
                          "timestamp decreases at play " + std::to_string(p.id)});
    }
    const GameState& b = p.state_before;
    const GameState& a = p.state_after;
    bool same_half = a.inning == b.inning && a.half == b.half;
    if (same_half && a.outs < b.outs)
      issues.push_back({IssueKind::OutsRegression, static_cast<int>(i),
                        "outs regress within a half-inning at play " +
                            std::to_string(p.id)});
    // Home minus away: the batting side can only move score_diff one way.
    if (same_half) {
      if (b.half == Half::Top && a.score_diff > b.score_diff)
        issues.push_back({IssueKind::ScoreDecrease, static_cast<int>(i),
                          "away score decreases at play " + std::to_string(p.id)});
      if (b.half == Half::Bottom && a.score_diff < b.score_diff)
        issues.push_back({IssueKind::ScoreDecrease, static_cast<int>(i),
                          "home score decreases at play " + std::to_string(p.id)});
    }
    if (plays.size() == 1 && a == b)
      issues.push_back({IssueKind::NoProgress, static_cast<int>(i),
                        "single-play log with no state change"});
  }
  return issues;
}

std::vector<Play> context_window(const GameLog& log, int play_id, int n) {
  auto it = std::find_if(log.plays.begin(), log.plays.end(),
                         [&](const Play& p) { return p.id == play_id; });
  if (it == log.plays.end()) throw UnknownPlayId(play_id);
  auto idx = static_cast<size_t>(it - log.plays.begin());
  size_t take = std::min<size_t>(static_cast<size_t>(std::max(n, 0)), idx);
  return {log.plays.begin() + static_cast<long>(idx - take),
          log.plays.begin() + static_cast<long>(idx)};
}

}  // namespace playcut
