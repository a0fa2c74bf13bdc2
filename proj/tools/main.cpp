// playcut: sabermetric highlight selection pipeline.
//
// Subcommands: build-table, run, evaluate, sweep. Exit codes: 0 success,
// 1 input/config error, 2 backend error, 3 internal failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "playcut/eval.hpp"
#include "playcut/gamelog.hpp"
#include "playcut/llm.hpp"
#include "playcut/reflection.hpp"
#include "playcut/sabermetrics.hpp"
#include "playcut/scoring.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace playcut;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitBackend = 2;
constexpr int kExitInternal = 3;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

struct RunConfig {
  fs::path game_log;
  fs::path we_table;
  fs::path prompt_dir;
  fs::path out_dir;
  std::string backend = "mock";
  int k = 60;
  llm::LLMRequestConfig llm_cfg;
  Preferences prefs;
  std::vector<std::pair<fs::path, fs::path>> games;  // sweep: (log, gt)
};

RunConfig load_run_config(const fs::path& path) {
  json doc = json::parse(read_file(path));
  RunConfig cfg;
  fs::path base = path.parent_path();
  auto resolve = [&](const std::string& p) {
    fs::path fp(p);
    return fp.is_absolute() ? fp : base / fp;
  };
  if (doc.contains("game_log")) cfg.game_log = resolve(doc["game_log"]);
  cfg.we_table = resolve(doc.at("we_table"));
  cfg.prompt_dir = resolve(doc.at("prompt_dir"));
  if (doc.contains("out_dir")) cfg.out_dir = resolve(doc["out_dir"]);
  cfg.backend = doc.value("backend", "mock");
  cfg.k = doc.value("k", 60);
  if (doc.contains("llm")) {
    const json& l = doc["llm"];
    cfg.llm_cfg.temperature = l.value("temperature", 0.0);
    cfg.llm_cfg.top_p = l.value("top_p", 0.1);
    cfg.llm_cfg.max_tokens = l.value("max_tokens", 10000);
    cfg.llm_cfg.model_name = l.value("model_name", "");
    cfg.llm_cfg.endpoint = l.value("endpoint", "");
    cfg.llm_cfg.timeout_ms = l.value("timeout_ms", 60000);
    cfg.llm_cfg.max_retries = l.value("max_retries", 2);
  }
  if (doc.contains("preferences")) {
    const json& p = doc["preferences"];
    if (p.contains("late_innings"))
      cfg.prefs.late_innings =
          std::set<int>(p["late_innings"].begin(), p["late_innings"].end());
    cfg.prefs.late_inning_points = p.value("late_inning_points", 0);
    if (p.contains("key_players"))
      for (const auto& name : p["key_players"])
        cfg.prefs.key_players.insert(name.get<std::string>());
    cfg.prefs.key_player_points = p.value("key_player_points", 0);
    cfg.prefs.theme = theme_from_string(p.value("theme", "any"));
    cfg.prefs.k = p.value("k", cfg.k);
  } else {
    cfg.prefs.k = cfg.k;
  }
  if (doc.contains("games"))
    for (const auto& g : doc["games"])
      cfg.games.emplace_back(resolve(g.at("game_log")),
                             resolve(g.at("ground_truth")));
  return cfg;
}

std::unique_ptr<llm::Backend> make_backend(const std::string& kind) {
  if (kind == "mock") return std::make_unique<llm::MockBackend>();
  if (kind == "http") return std::make_unique<llm::HttpBackend>();
  throw std::runtime_error("unknown backend '" + kind + "' (mock|http)");
}

int cmd_build_table(const std::string& corpus_dir, const std::string& out_path,
                    int max_inning_bucket) {
  std::vector<GameLog> corpus;
  std::vector<fs::path> files;
  if (!fs::is_directory(corpus_dir)) {
    std::cerr << "error: corpus dir not found: " << corpus_dir << "\n";
    return kExitInput;
  }
  for (const auto& entry : fs::directory_iterator(corpus_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const fs::path& f : files) corpus.push_back(parse_game_log(read_file(f)));
  if (corpus.empty()) {
    std::cerr << "error: empty corpus in " << corpus_dir << "\n";
    return kExitInput;
  }
  WETable table = build_we_table(corpus, max_inning_bucket);
  write_file(out_path, table.serialize());
  std::cout << "corpus_size=" << table.corpus_size()
            << " entries=" << table.entries().size()
            << " avg_abs_dwe=" << table.avg_abs_dwe() << "\n";
  return kExitOk;
}

int cmd_run(const fs::path& config_path, const std::string& backend_override,
            int k_override, const std::string& out_dir_override) {
  RunConfig cfg = load_run_config(config_path);
  if (!backend_override.empty()) cfg.backend = backend_override;
  if (k_override > 0) { cfg.k = k_override; cfg.prefs.k = k_override; }
  if (!out_dir_override.empty()) cfg.out_dir = out_dir_override;

  for (const fs::path& p : {cfg.game_log, cfg.we_table, cfg.prompt_dir}) {
    if (p.empty() || !fs::exists(p))
      throw std::runtime_error("required path missing: " + p.string());
  }
  if (cfg.out_dir.empty()) throw std::runtime_error("out_dir not configured");
  fs::create_directories(cfg.out_dir);

  GameLog log = parse_game_log(read_file(cfg.game_log));
  WETable table = WETable::deserialize(read_file(cfg.we_table));
  llm::PromptLibrary prompts(cfg.prompt_dir.string());
  auto backend = make_backend(cfg.backend);

  std::vector<AnnotatedPlay> annotated = annotate_game(table, log);
  std::vector<ScoredPlay> scored =
      decide(annotated, *backend, prompts, cfg.llm_cfg);
  PreferenceResult preferred = apply_preferences(scored, log, cfg.prefs);
  for (const std::string& w : preferred.warnings)
    std::cerr << "warning: " << w << "\n";
  if (cfg.prefs.k > static_cast<int>(log.plays.size()))
    std::cerr << "warning: k=" << cfg.prefs.k << " exceeds play count "
              << log.plays.size() << "; selecting all eligible plays\n";
  HighlightSelection selection =
      select_top_k(preferred.plays, cfg.prefs.k, log.game_id);
  Manifest manifest = emit_manifest(selection, log);

  fs::path scored_path = cfg.out_dir / "scored.jsonl";
  fs::path selection_path = cfg.out_dir / "selection.json";
  fs::path manifest_path = cfg.out_dir / "manifest.json";
  try {
    write_file(scored_path, serialize_scored(scored));
    write_file(selection_path, serialize_selection(selection));
    write_file(manifest_path, serialize_manifest(manifest));
  } catch (...) {
    for (const fs::path& p : {scored_path, selection_path, manifest_path}) {
      std::error_code ec;
      fs::remove(p, ec);
    }
    throw;
  }
  std::cout << "selected " << selection.k_effective << " of "
            << log.plays.size() << " plays; outputs in " << cfg.out_dir.string()
            << "\n";
  return kExitOk;
}

int cmd_evaluate(const std::string& selection_path, const std::string& gt_path) {
  HighlightSelection sel = parse_selection(read_file(selection_path));
  GroundTruth gt = parse_ground_truth(read_file(gt_path));
  std::set<int> selected;
  for (const ChosenClip& c : sel.chosen) selected.insert(c.play_id);
  EvalReport report = precision_recall_f1(selected, gt);
  std::printf("P=%.3f R=%.3f F1=%.3f\n", report.precision, report.recall,
              report.f1);
  std::cout << serialize_eval_report(report);
  return kExitOk;
}

int cmd_sweep(const fs::path& config_path, std::vector<int> k_grid) {
  RunConfig cfg = load_run_config(config_path);
  if (cfg.games.empty())
    throw std::runtime_error("sweep config needs a 'games' list");
  if (k_grid.empty()) k_grid = default_k_grid();

  WETable table = WETable::deserialize(read_file(cfg.we_table));
  llm::PromptLibrary prompts(cfg.prompt_dir.string());
  auto backend = make_backend(cfg.backend);

  std::vector<std::pair<GameLog, GroundTruth>> games;
  for (const auto& [log_path, gt_path] : cfg.games)
    games.emplace_back(parse_game_log(read_file(log_path)),
                       parse_ground_truth(read_file(gt_path)));

  // Scores per game do not depend on k; select per k from one decide pass.
  std::map<std::string, std::vector<ScoredPlay>> memo;
  Selector selector = [&](const GameLog& log, int k) {
    auto it = memo.find(log.game_id);
    if (it == memo.end()) {
      std::vector<ScoredPlay> scored =
          decide(annotate_game(table, log), *backend, prompts, cfg.llm_cfg);
      it = memo.emplace(log.game_id, std::move(scored)).first;
    }
    HighlightSelection sel = select_top_k(it->second, k, log.game_id);
    std::set<int> ids;
    for (const ChosenClip& c : sel.chosen) ids.insert(c.play_id);
    return ids;
  };

  KSweepReport report = sweep_k(games, selector, k_grid);
  std::cout << sweep_table(report);
  std::cout << "argmax_k=" << report.argmax_k << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sabermetric highlight selection pipeline"};
  app.require_subcommand(1);

  auto* build = app.add_subcommand("build-table",
                                   "build a win-expectancy table from a corpus");
  std::string corpus_dir, table_out;
  int max_inning_bucket = 9;
  build->add_option("--corpus-dir", corpus_dir, "directory of .jsonl game logs")
      ->required();
  build->add_option("--out", table_out, "output table path")->required();
  build->add_option("--max-inning-bucket", max_inning_bucket,
                    "collapse innings beyond this bucket");

  auto* run = app.add_subcommand("run", "run the full pipeline on one game");
  std::string run_config, backend_override, out_dir_override;
  int k_override = 0;
  run->add_option("--config", run_config, "run config JSON")->required();
  run->add_option("--backend", backend_override, "mock|http");
  run->add_option("--k", k_override, "number of highlights");
  run->add_option("--out-dir", out_dir_override, "output directory");

  auto* evaluate = app.add_subcommand("evaluate",
                                      "score a selection against ground truth");
  std::string selection_path, gt_path;
  evaluate->add_option("--selection", selection_path, "selection JSON")
      ->required();
  evaluate->add_option("--gt", gt_path, "ground-truth JSON")->required();

  auto* sweep = app.add_subcommand("sweep", "mean F1 across a K grid");
  std::string sweep_config;
  std::vector<int> k_grid;
  sweep->add_option("--config", sweep_config, "sweep config JSON")->required();
  sweep->add_option("--k-grid", k_grid, "K values (default 10..90 step 10)")
      ->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (build->parsed())
      return cmd_build_table(corpus_dir, table_out, max_inning_bucket);
    if (run->parsed())
      return cmd_run(run_config, backend_override, k_override, out_dir_override);
    if (evaluate->parsed()) return cmd_evaluate(selection_path, gt_path);
    if (sweep->parsed()) return cmd_sweep(sweep_config, k_grid);
  } catch (const llm::BackendUnavailable& e) {
    std::cerr << "backend error: " << e.what() << "\n";
    return kExitBackend;
  } catch (const llm::SchemaViolation& e) {
    std::cerr << "backend error: " << e.what() << "\n";
    return kExitBackend;
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const EmptyCorpus& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const json::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ZeroDenominator& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const ChainBreakError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const UnknownPlayId& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const std::runtime_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
