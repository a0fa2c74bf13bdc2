#include "playcut/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace playcut {

using ojson = nlohmann::ordered_json;

EvalReport precision_recall_f1(const std::set<int>& selected,
                               const GroundTruth& gt) {
  if (gt.play_ids.empty()) throw EmptyGroundTruth();
  std::set<int> inter;
  std::set_intersection(selected.begin(), selected.end(), gt.play_ids.begin(),
                        gt.play_ids.end(), std::inserter(inter, inter.end()));
  EvalReport r;
  r.selected_count = static_cast<int>(selected.size());
  r.gt_count = static_cast<int>(gt.play_ids.size());
  r.intersection_count = static_cast<int>(inter.size());
  r.precision = selected.empty()
                    ? 0.0
                    : static_cast<double>(inter.size()) / selected.size();
  r.recall = static_cast<double>(inter.size()) / gt.play_ids.size();
  r.f1 = (r.precision + r.recall) > 0.0
             ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
             : 0.0;
  return r;
}

std::set<int> wpa_baseline_select(const std::vector<AnnotatedPlay>& annotated,
                                  int k) {
  std::vector<size_t> order(annotated.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return std::abs(annotated[a].wpa) > std::abs(annotated[b].wpa);
  });
  std::set<int> out;
  for (size_t i = 0; i < order.size() && i < static_cast<size_t>(std::max(k, 0));
       ++i)
    out.insert(annotated[order[i]].play.id);
  return out;
}

std::vector<int> default_k_grid() {
  std::vector<int> grid;
  for (int k = 10; k <= 90; k += 10) grid.push_back(k);
  return grid;
}

KSweepReport sweep_k(const std::vector<std::pair<GameLog, GroundTruth>>& games,
                     const Selector& selector, const std::vector<int>& k_grid) {
  KSweepReport report;
  for (int k : k_grid) {
    double sum = 0.0;
    for (const auto& [log, gt] : games)
      sum += precision_recall_f1(selector(log, k), gt).f1;
    report.entries.push_back(
        {k, games.empty() ? 0.0 : sum / static_cast<double>(games.size())});
  }
  double best = -1.0;
  for (const KSweepEntry& e : report.entries) {
    if (e.mean_f1 > best) {
      best = e.mean_f1;
      report.argmax_k = e.k;
    }
  }
  return report;
}

GroundTruth parse_ground_truth(const std::string& text) {
  ojson doc = ojson::parse(text);
  GroundTruth gt;
  gt.game_id = doc.at("game_id").get<std::string>();
  for (const auto& id : doc.at("gt_play_ids")) gt.play_ids.insert(id.get<int>());
  return gt;
}

std::string serialize_ground_truth(const GroundTruth& gt) {
  ojson doc;
  doc["game_id"] = gt.game_id;
  doc["gt_play_ids"] = gt.play_ids;
  return doc.dump(2) + "\n";
}

std::string serialize_eval_report(const EvalReport& r) {
  ojson doc;
  doc["precision"] = r.precision;
  doc["recall"] = r.recall;
  doc["f1"] = r.f1;
  doc["selected_count"] = r.selected_count;
  doc["gt_count"] = r.gt_count;
  doc["intersection_count"] = r.intersection_count;
  return doc.dump(2) + "\n";
}

std::string sweep_table(const KSweepReport& report) {
  std::ostringstream out;
  out << "k\tmean_f1\n";
  char buf[64];
  for (const KSweepEntry& e : report.entries) {
    std::snprintf(buf, sizeof(buf), "%d\t%.6f\n", e.k, e.mean_f1);
    out << buf;
  }
  return out.str();
}

std::string serialize_sweep_report(const KSweepReport& report) {
  ojson doc;
  ojson arr = ojson::array();
  for (const KSweepEntry& e : report.entries)
    arr.push_back({{"k", e.k}, {"mean_f1", e.mean_f1}});
  doc["entries"] = std::move(arr);
  doc["argmax_k"] = report.argmax_k;
  return doc.dump(2) + "\n";
}

}  // namespace playcut
