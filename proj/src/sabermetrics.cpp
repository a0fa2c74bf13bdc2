#include "playcut/sabermetrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include <json.hpp>

namespace playcut {

using ojson = nlohmann::ordered_json;

StateKey StateKey::from_state(const GameState& s, int max_inning_bucket) {
  StateKey k;
  k.inning_bucket = std::min(s.inning, max_inning_bucket);
  k.half = s.half;
  k.outs = s.outs;
  k.runner_state = s.runner_state;
  k.score_diff_bucket = std::clamp(s.score_diff, -kScoreClamp, kScoreClamp);
  return k;
}

std::int64_t StateKey::encode() const {
  std::int64_t code = inning_bucket;
  code = code * 2 + (half == Half::Bottom ? 1 : 0);
  code = code * 3 + outs;
  code = code * 8 + runner_state;
  code = code * (2 * kScoreClamp + 1) + (score_diff_bucket + kScoreClamp);
  return code;
}

StateKey StateKey::decode(std::int64_t code) {
  StateKey k;
  constexpr int span = 2 * kScoreClamp + 1;
  k.score_diff_bucket = static_cast<int>(code % span) - kScoreClamp;
  code /= span;
  k.runner_state = static_cast<int>(code % 8);
  code /= 8;
  k.outs = static_cast<int>(code % 3);
  code /= 3;
  k.half = (code % 2) ? Half::Bottom : Half::Top;
  code /= 2;
  k.inning_bucket = static_cast<int>(code);
  return k;
}

WETable::WETable(std::map<std::int64_t, StateCounts> entries, double avg_abs_dwe,
                 std::int64_t corpus_size, int max_inning_bucket,
                 std::string built_at)
    : entries_(std::move(entries)),
      avg_abs_dwe_(avg_abs_dwe),
      corpus_size_(corpus_size),
      max_inning_bucket_(max_inning_bucket),
      built_at_(std::move(built_at)) {}

namespace {

// WE values snap to a 2^-40 grid. Grid values (and all their pairwise
// differences and running sums within [-2,2]) are exactly representable,
// so per-game WPA sums telescope bit-exactly. The quantization error is
// below 5e-13, orders of magnitude under the statistical noise of any
// wins/total estimate.
double quantize_we(double we) {
  return std::ldexp(std::nearbyint(std::ldexp(we, 40)), -40);
}

}  // namespace

double WETable::lookup_we(const GameState& state,
                          std::optional<TerminalOutcome> terminal) const {
  if (terminal) return *terminal == TerminalOutcome::HomeWin ? 1.0 : 0.0;
  StateKey key = StateKey::from_state(state, max_inning_bucket_);
  auto it = entries_.find(key.encode());
  if (it != entries_.end())
    return quantize_we(static_cast<double>(it->second.wins) /
                       static_cast<double>(it->second.total));

  // Fallback: nearest score_diff within the same slice; ties -> lower diff.
  misses_.fetch_add(1);
  StateKey probe = key;
  const StateCounts* best = nullptr;
  int best_dist = 0;
  int best_diff = 0;
  for (int sd = -StateKey::kScoreClamp; sd <= StateKey::kScoreClamp; ++sd) {
    probe.score_diff_bucket = sd;
    auto jt = entries_.find(probe.encode());
    if (jt == entries_.end()) continue;
    int dist = std::abs(sd - key.score_diff_bucket);
    if (!best || dist < best_dist) {
      best = &jt->second;
      best_dist = dist;
      best_diff = sd;
    }
  }
  (void)best_diff;
  if (best)
    return quantize_we(static_cast<double>(best->wins) /
                       static_cast<double>(best->total));
  return 0.5;
}

std::string WETable::serialize() const {
  ojson doc;
  doc["metadata"] = {{"corpus_size", corpus_size_},
                     {"max_inning_bucket", max_inning_bucket_}};
  doc["avg_abs_dwe"] = avg_abs_dwe_;
  ojson recs = ojson::array();
  for (const auto& [code, counts] : entries_) {
    StateKey k = StateKey::decode(code);
    ojson rec;
    rec["inning"] = k.inning_bucket;
    rec["half"] = to_string(k.half);
    rec["outs"] = k.outs;
    rec["runners"] = k.runner_state;
    rec["score_diff"] = k.score_diff_bucket;
    rec["wins"] = counts.wins;
    rec["total"] = counts.total;
    recs.push_back(std::move(rec));
  }
  doc["entries"] = std::move(recs);
  return doc.dump(2) + "\n";
}

WETable WETable::deserialize(const std::string& text) {
  ojson doc = ojson::parse(text);
  std::map<std::int64_t, StateCounts> entries;
  int bucket = doc["metadata"]["max_inning_bucket"].get<int>();
  for (const auto& rec : doc["entries"]) {
    StateKey k;
    k.inning_bucket = rec["inning"].get<int>();
    k.half = half_from_string(rec["half"].get<std::string>());
    k.outs = rec["outs"].get<int>();
    k.runner_state = rec["runners"].get<int>();
    k.score_diff_bucket = rec["score_diff"].get<int>();
    entries[k.encode()] = {rec["wins"].get<std::int64_t>(),
                           rec["total"].get<std::int64_t>()};
  }
  return WETable(std::move(entries), doc["avg_abs_dwe"].get<double>(),
                 doc["metadata"]["corpus_size"].get<std::int64_t>(), bucket);
}

namespace {

std::optional<TerminalOutcome> terminal_outcome_of(const GameLog& log) {
  return log.home_won() ? TerminalOutcome::HomeWin : TerminalOutcome::AwayWin;
}

}  // namespace

WETable build_we_table(const std::vector<GameLog>& corpus,
                       int max_inning_bucket) {
  if (corpus.empty()) throw EmptyCorpus();

  std::map<std::int64_t, StateCounts> entries;
  for (const GameLog& game : corpus) {
    if (game.plays.empty() || !game.plays.back().is_terminal)
      throw IncompleteGame(game.game_id);
    bool home_won = game.home_won();
    for (const Play& p : game.plays) {
      StateKey key = StateKey::from_state(p.state_before, max_inning_bucket);
      StateCounts& c = entries[key.encode()];
      c.total += 1;
      if (home_won) c.wins += 1;
    }
  }

  WETable table(std::move(entries), 0.0,
                static_cast<std::int64_t>(corpus.size()), max_inning_bucket);

  // Second pass with the finished table, same lookup rules as annotation.
  double sum = 0.0;
  std::int64_t count = 0;
  for (const GameLog& game : corpus) {
    double we = table.lookup_we(game.plays.front().state_before);
    for (const Play& p : game.plays) {
      double we_after =
          p.is_terminal ? table.lookup_we(p.state_after, terminal_outcome_of(game))
                        : table.lookup_we(p.state_after);
      sum += std::abs(we_after - we);
      ++count;
      we = we_after;
    }
  }
  double avg = count > 0 ? sum / static_cast<double>(count) : 0.0;

  return WETable(table.entries(), avg, static_cast<std::int64_t>(corpus.size()),
                 max_inning_bucket);
}

double compute_wpa(double we_before, double we_after) {
  return we_after - we_before;
}

double compute_li(const WETable& table, double we_before, double we_after) {
  if (table.avg_abs_dwe() == 0.0) throw ZeroDenominator();
  return std::abs(we_after - we_before) / table.avg_abs_dwe();
}

std::vector<AnnotatedPlay> annotate_game(const WETable& table,
                                         const GameLog& log) {
  for (const ValidationIssue& issue : validate_log(log))
    if (issue.kind == IssueKind::ChainBreak) throw ChainBreakError(issue.play_index);

  std::vector<AnnotatedPlay> out;
  out.reserve(log.plays.size());
  double we = table.lookup_we(log.plays.front().state_before);
  for (const Play& p : log.plays) {
    AnnotatedPlay a;
    a.play = p;
    a.we_before = we;
    a.we_after = p.is_terminal
                     ? table.lookup_we(p.state_after,
                                       log.home_won() ? TerminalOutcome::HomeWin
                                                      : TerminalOutcome::AwayWin)
                     : table.lookup_we(p.state_after);
    a.wpa = compute_wpa(a.we_before, a.we_after);
    a.li = compute_li(table, a.we_before, a.we_after);
    we = a.we_after;
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace playcut
