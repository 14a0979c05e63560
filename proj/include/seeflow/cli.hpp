#pragma once

// `seeflow` command line: synth | extract | evaluate | report.
//
// Configuration layers, later wins: built-in defaults, the file named by $SEEFLOW_CONFIG,
// the file given with --config, then individual flags. Files hold `key = value` lines using
// the long flag names (dashes or underscores); `#` starts a comment.

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "seeflow/error.hpp"
#include "seeflow/evaluation.hpp"
#include "seeflow/frame_io.hpp"
#include "seeflow/heuristic_action.hpp"
#include "seeflow/layout.hpp"
#include "seeflow/pipeline.hpp"
#include "seeflow/steps.hpp"
#include "seeflow/synth.hpp"
#include "seeflow/text_backend.hpp"

namespace seeflow::cli {

enum ExitCode { kOk = 0, kUsage = 2, kInput = 3, kInternal = 4 };

struct PipelineConfig {
  std::optional<double> fps;  // unset: manifest value, else 1
  int diff_tolerance = 0;
  double vo_threshold = kDefaultVoThreshold;
  double line_match_threshold = kDefaultLineMatchThreshold;
  std::string action_backend = "oracle";
  std::string text_backend = "oracle";
  bool popup_bridge = false;
  std::vector<double> iou_sweep = default_iou_sweep();
  std::vector<double> offset_sweep = default_offset_sweep();
  int jobs = 1;
  std::uint64_t seed = 0;
  std::string out;
  int cell_width = 8;
  int cell_height = 16;

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(key + ": not a number list: " + v);
    }
  }
  return out;
}

inline std::string format_list(const std::vector<double>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw UsageError(key + ": expected true or false, got " + v);
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
  std::istringstream is(v);
  T x{};
  is >> x;
  if (!is || !is.eof()) throw UsageError(key + ": not a number: " + v);
  return x;
}

inline void validate(const PipelineConfig& c) {
  if (c.fps && !(*c.fps > 0.0)) throw UsageError("fps must be positive");
  if (c.diff_tolerance < 0) throw UsageError("diff-tolerance must be >= 0");
  if (c.vo_threshold < 0.0 || c.vo_threshold > 1.0) throw UsageError("vo-threshold must be in [0,1]");
  if (c.line_match_threshold < 0.0 || c.line_match_threshold > 1.0) throw UsageError("line-match-threshold must be in [0,1]");
  if (c.action_backend != "oracle" && c.action_backend != "heuristic" && c.action_backend != "sidecar")
    throw UsageError("action-backend must be oracle, heuristic or sidecar");
  if (c.text_backend != "oracle" && c.text_backend != "raster" && c.text_backend != "sidecar")
    throw UsageError("text-backend must be oracle, raster or sidecar");
  for (double t : c.iou_sweep)
    if (t < 0.0 || t > 1.0) throw UsageError("iou-sweep values must be in [0,1]");
  for (double t : c.offset_sweep)
    if (t < 0.0) throw UsageError("offset-sweep values must be >= 0");
  if (c.jobs < 1) throw UsageError("jobs must be >= 1");
}

inline void set_key(PipelineConfig& c, std::string key, const std::string& value) {
  for (auto& ch : key)
    if (ch == '_') ch = '-';
  if (key == "fps") c.fps = parse_number<double>(key, value);
  else if (key == "diff-tolerance") c.diff_tolerance = parse_number<int>(key, value);
  else if (key == "vo-threshold") c.vo_threshold = parse_number<double>(key, value);
  else if (key == "line-match-threshold") c.line_match_threshold = parse_number<double>(key, value);
  else if (key == "action-backend") c.action_backend = value;
  else if (key == "text-backend") c.text_backend = value;
  else if (key == "popup-bridge") c.popup_bridge = parse_bool(key, value);
  else if (key == "iou-sweep") c.iou_sweep = parse_list(key, value);
  else if (key == "offset-sweep") c.offset_sweep = parse_list(key, value);
  else if (key == "jobs") c.jobs = parse_number<int>(key, value);
  else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "out") c.out = value;
  else if (key == "cell-width") c.cell_width = parse_number<int>(key, value);
  else if (key == "cell-height") c.cell_height = parse_number<int>(key, value);
  else throw UsageError("unknown config key: " + key);
}

inline void apply_config_text(PipelineConfig& c, std::istream& in, const std::string& origin) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    set_key(c, trim(line.substr(0, eq)), value);
  }
}

inline void apply_config_file(PipelineConfig& c, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open config file " + path.string());
  apply_config_text(c, in, path.string());
}

inline std::string config_to_text(const PipelineConfig& c) {
  std::ostringstream os;
  os.precision(17);
  if (c.fps) os << "fps = " << *c.fps << '\n';
  os << "diff-tolerance = " << c.diff_tolerance << '\n'
     << "vo-threshold = " << c.vo_threshold << '\n'
     << "line-match-threshold = " << c.line_match_threshold << '\n'
     << "action-backend = " << c.action_backend << '\n'
     << "text-backend = " << c.text_backend << '\n'
     << "popup-bridge = " << (c.popup_bridge ? "true" : "false") << '\n'
     << "iou-sweep = " << format_list(c.iou_sweep) << '\n'
     << "offset-sweep = " << format_list(c.offset_sweep) << '\n'
     << "jobs = " << c.jobs << '\n'
     << "seed = " << c.seed << '\n'
     << "cell-width = " << c.cell_width << '\n'
     << "cell-height = " << c.cell_height << '\n';
  if (!c.out.empty()) os << "out = " << c.out << '\n';
  return os.str();
}

// Flags mirror the config keys; unset flags leave the layered value alone.
struct Flags {
  std::optional<double> fps;
  std::optional<int> diff_tolerance;
  std::optional<double> vo_threshold;
  std::optional<double> line_match_threshold;
  std::optional<std::string> action_backend;
  std::optional<std::string> text_backend;
  bool popup_bridge = false;
  std::optional<std::string> iou_sweep;
  std::optional<std::string> offset_sweep;
  std::optional<int> jobs;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> cell_width;
  std::optional<int> cell_height;
  std::optional<std::string> config;

  void add_pipeline(CLI::App* app) {
    app->add_option("--fps", fps, "Frames per second (default: manifest, else 1)");
    app->add_option("--diff-tolerance", diff_tolerance, "Per-channel pixel tolerance for change detection");
    app->add_option("--vo-threshold", vo_threshold, "Vertical overlap needed for an active line");
    app->add_option("--line-match-threshold", line_match_threshold, "Text similarity needed to pair lines");
    app->add_option("--action-backend", action_backend, "oracle | heuristic | sidecar");
    app->add_option("--text-backend", text_backend, "oracle | raster | sidecar");
    app->add_flag("--popup-bridge", popup_bridge, "Keep aggregating across pop-ups");
    app->add_option("--jobs", jobs, "Worker threads over frame directories");
    app->add_option("--cell-width", cell_width, "Glyph cell width for raster/heuristic backends");
    app->add_option("--cell-height", cell_height, "Glyph cell height for raster/heuristic backends");
  }
  void add_sweeps(CLI::App* app) {
    app->add_option("--iou-sweep", iou_sweep, "Comma-separated IoU thresholds (1.0 means exact)");
    app->add_option("--offset-sweep", offset_sweep, "Comma-separated offset thresholds (0 means exact)");
  }
  void add_common(CLI::App* app) {
    app->add_option("--out", out, "Output path");
    app->add_option("--seed", seed, "Random seed");
    app->add_option("--config", config, "key=value config file");
  }

  PipelineConfig resolve() const {
    PipelineConfig c;
    if (const char* env = std::getenv("SEEFLOW_CONFIG"); env && *env) apply_config_file(c, env);
    if (config) apply_config_file(c, *config);
    if (fps) c.fps = *fps;
    if (diff_tolerance) c.diff_tolerance = *diff_tolerance;
    if (vo_threshold) c.vo_threshold = *vo_threshold;
    if (line_match_threshold) c.line_match_threshold = *line_match_threshold;
    if (action_backend) c.action_backend = *action_backend;
    if (text_backend) c.text_backend = *text_backend;
    if (popup_bridge) c.popup_bridge = true;
    if (iou_sweep) c.iou_sweep = parse_list("iou-sweep", *iou_sweep);
    if (offset_sweep) c.offset_sweep = parse_list("offset-sweep", *offset_sweep);
    if (jobs) c.jobs = *jobs;
    if (seed) c.seed = *seed;
    if (out) c.out = *out;
    if (cell_width) c.cell_width = *cell_width;
    if (cell_height) c.cell_height = *cell_height;
    validate(c);
    return c;
  }
};

// ---- extract -------------------------------------------------------------------------------

struct ExtractInputs {
  std::vector<std::string> dirs;
  std::optional<std::string> actions_path;
  std::optional<std::string> text_path;
};

inline std::vector<CodingStep> extract_one(const PipelineConfig& c, const std::filesystem::path& dir,
                                           const ExtractInputs& in) {
  const auto manifest = read_manifest(dir);
  const double fps = c.fps ? *c.fps : (manifest ? manifest->fps : 1.0);
  const auto frames = load_frame_sequence(dir, fps);

  std::unique_ptr<TextBackend> text;
  if (c.text_backend == "raster") {
    text = std::make_unique<RasterTextBackend>(
        ScreenLayout::make(frames[0].width(), frames[0].height(), c.cell_width, c.cell_height));
  } else {
    const auto path = c.text_backend == "oracle" ? dir / "text.jsonl" : std::filesystem::path(*in.text_path);
    text = std::make_unique<SidecarTextBackend>(load_text_sidecar(path));
  }

  std::unique_ptr<ActionBackend> actions;
  if (c.action_backend == "heuristic") {
    HeuristicActionConfig hc;
    hc.cell_height = c.cell_height;
    hc.line_match_threshold = c.line_match_threshold;
    actions = std::make_unique<HeuristicActionBackend>(hc);
  } else {
    const auto path = c.action_backend == "oracle" ? dir / "actions.jsonl" : std::filesystem::path(*in.actions_path);
    actions = std::make_unique<PrecomputedActionBackend>(load_action_labels(path));
  }

  StepConfig sc;
  sc.vo_threshold = c.vo_threshold;
  sc.line_match_threshold = c.line_match_threshold;
  sc.popup_bridge = c.popup_bridge;
  auto steps = extract_steps(frames, *text, *actions, c.diff_tolerance, sc);
  for (const auto& s : steps)
    if (s.end_frame < s.start_frame + 1) throw Error(ErrorKind::InvariantViolation, "emitted a step shorter than two frames");
  return steps;
}

// Directories fan out over `jobs` workers; results keep the command-line order.
inline std::vector<CodingStep> extract_all(const PipelineConfig& c, const ExtractInputs& in) {
  std::vector<std::vector<CodingStep>> results(in.dirs.size());
  std::vector<std::exception_ptr> errors(in.dirs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < in.dirs.size(); i = next++) {
      try {
        results[i] = extract_one(c, in.dirs[i], in);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(c.jobs), std::max<std::size_t>(1, in.dirs.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<CodingStep> all;
  for (auto& r : results) all.insert(all.end(), r.begin(), r.end());
  return all;
}

// ---- runner --------------------------------------------------------------------------------

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Extract line-level coding steps from programming screencasts"};
  app.require_subcommand(1);

  Flags synth_flags, extract_flags, eval_flags;

  auto* synth = app.add_subcommand("synth", "Render a synthetic screencast with ground truth and oracle sidecars");
  std::optional<std::string> script_path;
  bool random_script = false;
  RandomScriptParams rp;
  int noise = 0;
  bool write_script_only = false;
  synth->add_option("--script", script_path, "Session script (JSON)");
  synth->add_flag("--random", random_script, "Generate a random script instead");
  synth->add_option("--events", rp.target_events, "Random: target number of events");
  synth->add_option("--scroll-rate", rp.scroll_rate, "Random: scroll probability between steps");
  synth->add_option("--mid-step-scroll-rate", rp.mid_step_scroll_rate, "Random: scroll probability inside steps");
  synth->add_option("--popup-rate", rp.popup_rate, "Random: pop-up probability between steps");
  synth->add_option("--switch-rate", rp.switch_rate, "Random: window-switch probability between steps");
  synth->add_option("--source-id", rp.source_id, "Random: source id");
  synth->add_option("--noise", noise, "Per-channel pixel jitter amplitude");
  synth->add_flag("--script-only", write_script_only, "Random: write script.json only");
  synth_flags.add_common(synth);

  auto* extract = app.add_subcommand("extract", "Extract coding steps from frame directories");
  ExtractInputs inputs;
  extract->add_option("dirs", inputs.dirs, "Frame directories")->required();
  extract->add_option("--actions", inputs.actions_path, "actions.jsonl for --action-backend sidecar");
  extract->add_option("--text", inputs.text_path, "text.jsonl for --text-backend sidecar");
  extract_flags.add_pipeline(extract);
  extract_flags.add_common(extract);

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score predicted steps against ground truth");
  std::string pred_path, gt_path;
  bool no_type_check = false;
  std::optional<std::size_t> total_frames;
  evaluate_cmd->add_option("--pred", pred_path, "Predicted steps.jsonl")->required();
  evaluate_cmd->add_option("--gt", gt_path, "Ground-truth gt.jsonl")->required();
  evaluate_cmd->add_option("--total-frames", total_frames, "Frames per source for coverage");
  evaluate_cmd->add_flag("--no-type-check", no_type_check, "Ignore step types when judging matches");
  eval_flags.add_sweeps(evaluate_cmd);
  eval_flags.add_common(evaluate_cmd);

  auto* report_cmd = app.add_subcommand("report", "Print the tables of a report.json");
  std::string report_path;
  report_cmd->add_option("report", report_path, "report.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    if (*synth) {
      const auto c = synth_flags.resolve();
      if (c.out.empty()) throw UsageError("synth needs --out");
      if (script_path.has_value() == random_script) throw UsageError("synth needs exactly one of --script or --random");
      SessionScript script;
      if (script_path) {
        script = load_script(*script_path);
      } else {
        rp.seed = c.seed;
        script = generate_random_script(rp);
      }
      const std::filesystem::path dir = c.out;
      if (write_script_only) {
        std::filesystem::create_directories(dir);
        std::ofstream(dir / "script.json") << to_json(script).dump(2) << '\n';
        return kOk;
      }
      const auto result = render_session(script, noise, c.seed);
      write_scenario(result, script, dir);
      out << "wrote " << result.frames.size() << " frames, " << result.ground_truth.size() << " steps to "
          << dir.string() << '\n';
      return kOk;
    }

    if (*extract) {
      const auto c = extract_flags.resolve();
      if (c.out.empty()) throw UsageError("extract needs --out");
      if (c.action_backend == "sidecar" && !inputs.actions_path) throw UsageError("--action-backend sidecar needs --actions");
      if (c.text_backend == "sidecar" && !inputs.text_path) throw UsageError("--text-backend sidecar needs --text");
      if (inputs.dirs.size() > 1 && (c.action_backend == "sidecar" || c.text_backend == "sidecar"))
        throw UsageError("sidecar backends take a single frame directory");
      // Nothing is written unless every directory succeeds.
      const auto steps = extract_all(c, inputs);
      write_steps_file(c.out, steps);
      out << "extracted " << steps.size() << " steps\n";
      return kOk;
    }

    if (*evaluate_cmd) {
      const auto c = eval_flags.resolve();
      const auto preds = load_steps(pred_path);
      const auto gts = load_steps(gt_path);
      EvaluationConfig ec;
      ec.iou_sweep = c.iou_sweep;
      ec.offset_sweep = c.offset_sweep;
      ec.type_check = !no_type_check;
      if (total_frames) {
        for (const auto& s : preds) ec.total_frames[s.source_id] = *total_frames;
        for (const auto& s : gts) ec.total_frames[s.source_id] = *total_frames;
      }
      const auto report = to_json(evaluate(preds, gts, ec));
      if (!c.out.empty()) {
        std::ofstream f(c.out);
        if (!f) throw Error(ErrorKind::IoError, "cannot write " + c.out);
        f << report.dump(2) << '\n';
      }
      out << format_sweep_table(report) << format_summary(report);
      return kOk;
    }

    if (*report_cmd) {
      std::ifstream f(report_path);
      if (!f) throw Error(ErrorKind::IoError, "cannot open " + report_path);
      nlohmann::json report;
      try {
        report = nlohmann::json::parse(f);
        out << format_sweep_table(report) << format_summary(report);
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::SidecarFormat, report_path + ": " + e.what());
      }
      return kOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return is_internal(e.kind()) ? kInternal : kInput;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kUsage;
}

}  // namespace seeflow::cli
