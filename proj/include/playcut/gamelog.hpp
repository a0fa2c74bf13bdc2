#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace playcut {

enum class Half { Top, Bottom };

enum class EventKind {
  Hit,
  HomeRun,
  Walk,
  Strikeout,
  Out,
  Error,
  Steal,
  Substitution,
  Other,
};

const char* to_string(Half h);
const char* to_string(EventKind k);
Half half_from_string(const std::string& s);
EventKind event_kind_from_string(const std::string& s);

/// Snapshot of the game situation between plays. Runners are a 3-bit
/// occupancy mask (bit0 = 1st base, bit1 = 2nd, bit2 = 3rd) and score_diff
/// is home minus away, unclamped.
struct GameState {
  int inning = 1;
  Half half = Half::Top;
  int outs = 0;
  int runner_state = 0;
  int score_diff = 0;

  bool operator==(const GameState&) const = default;
};

struct Play {
  int id = 0;
  std::int64_t timestamp_ms = 0;
  std::string result;
  std::optional<std::string> actor;
  EventKind event_kind = EventKind::Other;
  GameState state_before;
  GameState state_after;
  bool is_terminal = false;
};

struct GameLog {
  std::string game_id;
  std::string home_team;
  std::string away_team;
  std::vector<Play> plays;
  int final_home_score = 0;
  int final_away_score = 0;

  bool home_won() const { return final_home_score > final_away_score; }
  const Play* find_play(int play_id) const;
};

// Parse errors carry the 0-based record index (header = record 0).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string what, int record_index)
      : std::runtime_error(std::move(what)), record_index_(record_index) {}
  int record_index() const { return record_index_; }

 private:
  int record_index_;
};

class MalformedRecord : public ParseError {
  using ParseError::ParseError;
};
class DuplicatePlayId : public ParseError {
  using ParseError::ParseError;
};
class EmptyLog : public ParseError {
 public:
  explicit EmptyLog(std::string what) : ParseError(std::move(what), 0) {}
};

class UnknownPlayId : public std::runtime_error {
 public:
  explicit UnknownPlayId(int play_id)
      : std::runtime_error("unknown play id " + std::to_string(play_id)),
        play_id_(play_id) {}
  int play_id() const { return play_id_; }

 private:
  int play_id_;
};

enum class IssueKind {
  ChainBreak,
  TimestampOrder,
  OutsRegression,
  ScoreDecrease,
  NoProgress,  // warning: a play that changes nothing
};

struct ValidationIssue {
  IssueKind kind;
  int play_index;  // index into GameLog::plays
  std::string message;
};

/// Parses a line-delimited game log document: one JSON header record
/// followed by one JSON record per play. Inning may be given either as
/// separate numeric inning/half fields or as prose ("Top of the 6th");
/// both normalize to the same GameState.
GameLog parse_game_log(const std::string& raw);

/// Canonical serialization: header line plus one normalized play record per
/// line. parse(serialize(log)) == log, and serialize is a fixed point for
/// canonical-form input.
std::string serialize_game_log(const GameLog& log);

std::vector<ValidationIssue> validate_log(const GameLog& log);

/// Up to n plays immediately preceding play_id, chronological order.
std::vector<Play> context_window(const GameLog& log, int play_id, int n = 5);

}  // namespace playcut
