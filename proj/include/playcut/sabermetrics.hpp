#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "playcut/gamelog.hpp"

namespace playcut {

enum class TerminalOutcome { HomeWin, AwayWin };

/// Bucketed, total encoding of a GameState. Innings at or beyond the bucket
/// cap collapse together; score_diff clamps to [-10, 10].
struct StateKey {
  int inning_bucket;
  Half half;
  int outs;
  int runner_state;
  int score_diff_bucket;

  static constexpr int kScoreClamp = 10;

  static StateKey from_state(const GameState& s, int max_inning_bucket);

  /// Dense integer encoding; also the serialization sort order.
  std::int64_t encode() const;
  static StateKey decode(std::int64_t code);

  auto operator<=>(const StateKey&) const = default;
};

struct StateCounts {
  std::int64_t wins = 0;   // home-team wins from games passing through
  std::int64_t total = 0;  // visits
};

class EmptyCorpus : public std::runtime_error {
 public:
  EmptyCorpus() : std::runtime_error("empty corpus") {}
};
class IncompleteGame : public std::runtime_error {
 public:
  explicit IncompleteGame(const std::string& game_id)
      : std::runtime_error("game lacks terminal play: " + game_id) {}
};
class ZeroDenominator : public std::runtime_error {
 public:
  ZeroDenominator() : std::runtime_error("avg |dWE| is zero") {}
};
class ChainBreakError : public std::runtime_error {
 public:
  explicit ChainBreakError(int play_index)
      : std::runtime_error("state chain broken at play index " +
                           std::to_string(play_index)) {}
};

/// Win-expectancy table: per-state visit/win counts from a historical
/// corpus, plus the corpus-mean |WE_after - WE_before| used as the
/// leverage denominator. Immutable after build; lookups are thread-safe.
class WETable {
 public:
  WETable() = default;
  WETable(std::map<std::int64_t, StateCounts> entries, double avg_abs_dwe,
          std::int64_t corpus_size, int max_inning_bucket,
          std::string built_at = {});

  /// Win expectancy for a state, home-team perspective. Terminal outcomes
  /// resolve to 1.0 / 0.0 by rule and never touch the table. Unseen states
  /// fall back to the nearest score_diff neighbour within the same
  /// (inning, half, outs, runners) slice, else neutral 0.5; each fallback
  /// increments the miss counter.
  double lookup_we(const GameState& state,
                   std::optional<TerminalOutcome> terminal = {}) const;

  double avg_abs_dwe() const { return avg_abs_dwe_; }
  std::int64_t corpus_size() const { return corpus_size_; }
  int max_inning_bucket() const { return max_inning_bucket_; }
  const std::string& built_at() const { return built_at_; }
  const std::map<std::int64_t, StateCounts>& entries() const { return entries_; }
  std::int64_t miss_count() const { return misses_.load(); }

  std::string serialize() const;
  static WETable deserialize(const std::string& text);

 private:
  std::map<std::int64_t, StateCounts> entries_;
  double avg_abs_dwe_ = 0.0;
  std::int64_t corpus_size_ = 0;
  int max_inning_bucket_ = 9;
  std::string built_at_;
  mutable std::atomic<std::int64_t> misses_{0};
};

struct AnnotatedPlay {
  Play play;
  double we_before = 0.0;
  double we_after = 0.0;
  double wpa = 0.0;  // we_after - we_before, exact
  double li = 0.0;   // |wpa| / avg_abs_dwe
};

WETable build_we_table(const std::vector<GameLog>& corpus,
                       int max_inning_bucket = 9);

double compute_wpa(double we_before, double we_after);
double compute_li(const WETable& table, double we_before, double we_after);

/// Annotates every play with chained lookups: we_after of play i is reused
/// as we_before of play i+1, so per-game WPA telescopes exactly.
std::vector<AnnotatedPlay> annotate_game(const WETable& table,
                                         const GameLog& log);

}  // namespace playcut
