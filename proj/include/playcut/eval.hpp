#pragma once

#include <functional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "playcut/gamelog.hpp"
#include "playcut/sabermetrics.hpp"

namespace playcut {

struct GroundTruth {
  std::string game_id;
  std::set<int> play_ids;
};

class EmptyGroundTruth : public std::runtime_error {
 public:
  EmptyGroundTruth() : std::runtime_error("ground truth set is empty") {}
};

struct EvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  int selected_count = 0;
  int gt_count = 0;
  int intersection_count = 0;
};

struct KSweepEntry {
  int k = 0;
  double mean_f1 = 0.0;
};

struct KSweepReport {
  std::vector<KSweepEntry> entries;
  int argmax_k = 0;  // ties go to the smaller k
};

/// P = |sel ∩ gt| / |sel| (0 when sel empty), R = |sel ∩ gt| / |gt|,
/// F1 = 2PR/(P+R) (0 when P+R = 0).
EvalReport precision_recall_f1(const std::set<int>& selected,
                               const GroundTruth& gt);

/// Top-k play ids by descending |wpa|, ties chronological. No LLM or LI
/// involvement.
std::set<int> wpa_baseline_select(const std::vector<AnnotatedPlay>& annotated,
                                  int k);

using Selector = std::function<std::set<int>(const GameLog&, int k)>;

std::vector<int> default_k_grid();  // 10,20,...,90

KSweepReport sweep_k(const std::vector<std::pair<GameLog, GroundTruth>>& games,
                     const Selector& selector,
                     const std::vector<int>& k_grid = default_k_grid());

GroundTruth parse_ground_truth(const std::string& text);
std::string serialize_ground_truth(const GroundTruth& gt);
std::string serialize_eval_report(const EvalReport& report);
std::string sweep_table(const KSweepReport& report);  // flat "k mean_f1" rows
std::string serialize_sweep_report(const KSweepReport& report);

}  // namespace playcut
