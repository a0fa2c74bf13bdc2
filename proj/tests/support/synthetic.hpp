#pragma once

// Deterministic synthetic game generator for tests and fixtures. Games obey
// the full chain/score/outs invariants checked by validate_log.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "playcut/gamelog.hpp"

namespace playcut::testing {

inline const std::vector<std::string>& batter_pool() {
  static const std::vector<std::string> pool = {
      "Kim Min-seok", "Park Ji-hwan", "Choi Jung",   "Lee Dae-ho",
      "Son Joo-in",   "Jung Woo-ram", "Han Dong-hee", "Oh Seung-hwan",
      "Yang Eui-ji",  "Na Sung-bum",  "Kang Baek-ho", "Ryu Hyun-jin"};
  return pool;
}

// One simulated game. Deterministic in (seed); ids start at 1.
inline GameLog make_synthetic_game(std::uint32_t seed,
                                   const std::string& game_id = "") {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> pct(0, 99);
  std::uniform_int_distribution<int> gap_s(20, 90);
  std::uniform_int_distribution<size_t> batter(0, batter_pool().size() - 1);

  GameLog log;
  log.game_id = game_id.empty() ? "syn-" + std::to_string(seed) : game_id;
  log.home_team = "Home-" + std::to_string(seed % 10);
  log.away_team = "Away-" + std::to_string(seed / 10 % 10);

  int home = 0, away = 0;
  int inning = 1;
  Half half = Half::Top;
  int outs = 0;
  int runners = 0;
  std::int64_t ts = 0;
  int next_id = 1;

  auto popcount3 = [](int mask) {
    return (mask & 1) + ((mask >> 1) & 1) + ((mask >> 2) & 1);
  };

  bool done = false;
  while (!done) {
    Play p;
    p.id = next_id++;
    ts += gap_s(rng) * 1000;
    p.timestamp_ms = ts;
    p.state_before = {inning, half, outs, runners, home - away};

    const std::string& name = batter_pool()[batter(rng)];
    int roll = pct(rng);
    int scored = 0;  // runs by the batting side on this play

    if (roll < 45) {  // routine out
      p.result = name + ": Flyout to center field";
      p.event_kind = EventKind::Out;
      outs += 1;
    } else if (roll < 60) {
      p.result = name + ": Strikeout swinging";
      p.event_kind = EventKind::Strikeout;
      outs += 1;
    } else if (roll < 75) {  // single: runners advance one base
      p.result = name + ": Single to left field";
      p.event_kind = EventKind::Hit;
      scored = (runners >> 2) & 1;
      runners = ((runners << 1) & 0x6) | 1;
    } else if (roll < 85) {  // walk: forced runners only
      p.result = name + ": Walk";
      p.event_kind = EventKind::Walk;
      if ((runners & 0x7) == 0x7) scored = 1;
      else if ((runners & 0x3) == 0x3) runners = 0x7;
      else if (runners & 1) runners |= 2;
      else runners |= 1;
    } else if (roll < 90) {  // double: runners advance two bases
      p.result = name + ": Double to right field";
      p.event_kind = EventKind::Hit;
      scored = popcount3(runners & 0x6);
      runners = ((runners & 1) << 2) | 2;
    } else if (roll < 94) {
      p.result = name + ": Home run to left field";
      p.event_kind = EventKind::HomeRun;
      scored = popcount3(runners) + 1;
      runners = 0;
    } else if (roll < 97) {
      p.result = name + ": Substitution, pinch hitter announced";
      p.event_kind = EventKind::Substitution;
    } else if (roll < 99 && (runners & 1) && !(runners & 2)) {
      p.result = name + ": Stolen base, second";
      p.event_kind = EventKind::Steal;
      runners = (runners & ~1) | 2;
    } else {
      p.result = name + ": Reached on error by shortstop";
      p.event_kind = EventKind::Error;
      scored = (runners >> 2) & 1;
      runners = ((runners << 1) & 0x6) | 1;
    }
    p.actor = name;

    if (half == Half::Top) away += scored; else home += scored;

    bool half_over = outs >= 3;
    bool walkoff = half == Half::Bottom && inning >= 9 && home > away;
    if (half_over || walkoff) {
      bool game_over =
          walkoff ||
          (inning >= 9 && half == Half::Bottom && (home != away || inning >= 11)) ||
          (inning >= 9 && half == Half::Top && half_over && home > away);
      if (half == Half::Top) { half = Half::Bottom; }
      else { half = Half::Top; inning += 1; }
      outs = 0;
      runners = 0;
      if (game_over) {
        p.is_terminal = true;
        done = true;
      }
    }
    p.state_after = {inning, half, outs, runners, home - away};
    log.plays.push_back(std::move(p));
  }

  log.final_home_score = home;
  log.final_away_score = away;
  return log;
}

inline std::vector<GameLog> make_synthetic_corpus(int games,
                                                  std::uint32_t seed0 = 1000) {
  std::vector<GameLog> corpus;
  corpus.reserve(static_cast<size_t>(games));
  for (int i = 0; i < games; ++i)
    corpus.push_back(make_synthetic_game(seed0 + static_cast<std::uint32_t>(i)));
  return corpus;
}

}  // namespace playcut::testing
