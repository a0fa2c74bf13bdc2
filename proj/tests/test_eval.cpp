#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "playcut/eval.hpp"
#include "support/synthetic.hpp"

using namespace playcut;

TEST_CASE("precision_recall_f1") {
  SUBCASE("perfect match") {
    GroundTruth gt{"g", {1, 2, 3}};
    EvalReport r = precision_recall_f1({1, 2, 3}, gt);
    CHECK(r.precision == 1.0);
    CHECK(r.recall == 1.0);
    CHECK(r.f1 == 1.0);
  }
  SUBCASE("worked example") {
    GroundTruth gt{"g", {2, 3, 5}};
    EvalReport r = precision_recall_f1({1, 2, 3, 4}, gt);
    CHECK(r.precision == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r.recall == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(r.f1 == doctest::Approx(4.0 / 7.0).epsilon(1e-12));
    CHECK(r.intersection_count == 2);
  }
  SUBCASE("empty selection scores zero") {
    GroundTruth gt{"g", {1}};
    EvalReport r = precision_recall_f1({}, gt);
    CHECK(r.precision == 0.0);
    CHECK(r.recall == 0.0);
    CHECK(r.f1 == 0.0);
  }
  SUBCASE("empty ground truth is an error") {
    GroundTruth gt{"g", {}};
    CHECK_THROWS_AS(precision_recall_f1({1}, gt), EmptyGroundTruth);
  }
  SUBCASE("identities on random sets") {
    std::mt19937 rng(41);
    for (int trial = 0; trial < 100; ++trial) {
      std::set<int> sel, gtset;
      for (int i = 0; i < 30; ++i) {
        if (rng() % 3 == 0) sel.insert(i);
        if (rng() % 3 == 0) gtset.insert(i);
      }
      if (gtset.empty()) gtset.insert(0);
      GroundTruth gt{"g", gtset};
      EvalReport r = precision_recall_f1(sel, gt);
      CHECK(r.precision >= 0.0);
      CHECK(r.precision <= 1.0);
      CHECK(r.recall >= 0.0);
      CHECK(r.recall <= 1.0);
      CHECK(r.intersection_count <= std::min(r.selected_count, r.gt_count));
      if (r.precision + r.recall > 0)
        CHECK(r.f1 == doctest::Approx(2 * r.precision * r.recall /
                                      (r.precision + r.recall))
                          .epsilon(1e-12));
      else
        CHECK(r.f1 == 0.0);
    }
  }
  SUBCASE("recall is monotone under selection growth") {
    GroundTruth gt{"g", {1, 5, 9, 13}};
    std::set<int> s1 = {1, 2};
    std::set<int> s2 = {1, 2, 5, 6, 9};
    CHECK(precision_recall_f1(s2, gt).recall >=
          precision_recall_f1(s1, gt).recall);
  }
}

TEST_CASE("wpa_baseline_select") {
  auto corpus = testing::make_synthetic_corpus(6);
  WETable table = build_we_table(corpus);

  SUBCASE("equal wpa ties break chronologically") {
    std::vector<AnnotatedPlay> annotated;
    for (int i = 1; i <= 6; ++i) {
      AnnotatedPlay a;
      a.play.id = i;
      a.wpa = 0.1;
      annotated.push_back(a);
    }
    CHECK(wpa_baseline_select(annotated, 3) == std::set<int>{1, 2, 3});
  }

  SUBCASE("matches the sort oracle on a real game") {
    auto annotated = annotate_game(table, corpus[0]);
    auto annotated12 = std::vector<AnnotatedPlay>(
        annotated.begin(),
        annotated.begin() + std::min<size_t>(12, annotated.size()));
    std::vector<size_t> idx(annotated12.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
      double wa = std::abs(annotated12[a].wpa), wb = std::abs(annotated12[b].wpa);
      if (wa != wb) return wa > wb;
      return a < b;
    });
    std::set<int> expect;
    for (size_t i = 0; i < 4; ++i) expect.insert(annotated12[idx[i]].play.id);
    CHECK(wpa_baseline_select(annotated12, 4) == expect);
  }

  SUBCASE("saturation") {
    auto annotated = annotate_game(table, corpus[1]);
    CHECK(wpa_baseline_select(annotated, 10000).size() == annotated.size());
  }

  SUBCASE("ignores everything but wpa") {
    auto annotated = annotate_game(table, corpus[2]);
    auto before = wpa_baseline_select(annotated, 8);
    for (AnnotatedPlay& a : annotated) a.li = 99.0;
    CHECK(wpa_baseline_select(annotated, 8) == before);
  }
}

TEST_CASE("sweep_k") {
  SUBCASE("default grid has nine entries") {
    auto grid = default_k_grid();
    REQUIRE(grid.size() == 9);
    CHECK(grid.front() == 10);
    CHECK(grid.back() == 90);
  }

  SUBCASE("constructed optimum is recovered") {
    GameLog log = testing::make_synthetic_game(51);
    REQUIRE(log.plays.size() >= 40);
    // Ground truth: exactly the first 30 ids the selector would pick.
    Selector selector = [](const GameLog& g, int k) {
      std::set<int> ids;
      for (int i = 0; i < k && i < static_cast<int>(g.plays.size()); ++i)
        ids.insert(g.plays[static_cast<size_t>(i)].id);
      return ids;
    };
    GroundTruth gt{log.game_id, selector(log, 30)};
    KSweepReport report = sweep_k({{log, gt}}, selector);
    REQUIRE(report.entries.size() == 9);
    CHECK(report.argmax_k == 30);
  }

  SUBCASE("constant selector gives a flat curve") {
    GameLog log = testing::make_synthetic_game(52);
    std::set<int> fixed = {log.plays[0].id, log.plays[1].id};
    Selector selector = [&](const GameLog&, int) { return fixed; };
    GroundTruth gt{log.game_id, {log.plays[0].id}};
    KSweepReport report = sweep_k({{log, gt}}, selector);
    for (const KSweepEntry& e : report.entries)
      CHECK(e.mean_f1 == report.entries[0].mean_f1);
    CHECK(report.argmax_k == 10);  // ties go to the smaller k
  }
}

TEST_CASE("ground truth serialization round-trips") {
  GroundTruth gt{"game-7", {3, 5, 8, 13}};
  GroundTruth back = parse_ground_truth(serialize_ground_truth(gt));
  CHECK(back.game_id == gt.game_id);
  CHECK(back.play_ids == gt.play_ids);
}
