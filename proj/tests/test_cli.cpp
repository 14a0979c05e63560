#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "seeflow/cli.hpp"

namespace fs = std::filesystem;
using namespace seeflow;
using namespace seeflow::cli;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "seeflow");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return Run{code, out.str(), err.str()};
}

// Runs the installed binary through the shell and returns its exit status.
int binary(const std::string& args) {
  const std::string cmd = std::string(SEEFLOW_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path fresh(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("seeflow_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> dir_contents(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) out[e.path().filename().string()] = slurp(e.path());
  return out;
}

fs::path random_scenario(const std::string& name, const std::string& seed, const std::string& extra = "") {
  const auto dir = fresh(name);
  std::vector<std::string> args = {"synth", "--random", "--seed", seed, "--events", "80", "--out", dir.string()};
  std::istringstream ex(extra);
  for (std::string a; ex >> a;) args.push_back(a);
  const auto r = invoke(args);
  EXPECT_EQ(r.code, kOk) << r.err;
  return dir;
}

}  // namespace

TEST(Cli, BinaryRunsAndReportsUsageErrors) {
  EXPECT_EQ(binary("--help"), 0);
  EXPECT_EQ(binary(""), kUsage);
  EXPECT_EQ(binary("frobnicate"), kUsage);
  EXPECT_EQ(binary("extract --out /dev/null"), kUsage);
}

TEST(Cli, SynthFixedScriptIsDeterministic) {
  const fs::path script = fs::path(SEEFLOW_SAMPLES_DIR) / "type_line.json";
  ASSERT_TRUE(fs::exists(script));
  const auto a = fresh("det_a"), b = fresh("det_b");
  ASSERT_EQ(invoke({"synth", "--script", script.string(), "--out", a.string()}).code, kOk);
  ASSERT_EQ(invoke({"synth", "--script", script.string(), "--out", b.string()}).code, kOk);
  EXPECT_EQ(dir_contents(a), dir_contents(b));
}

TEST(Cli, SynthRandomIsReproducible) {
  const auto a = random_scenario("rand_a", "7"), b = random_scenario("rand_b", "7"), c = random_scenario("rand_c", "8");
  EXPECT_EQ(dir_contents(a), dir_contents(b));
  EXPECT_NE(slurp(a / "script.json"), slurp(c / "script.json"));
}

TEST(Cli, SynthInvalidScriptNamesEventIndex) {
  const auto dir = fresh("bad_script");
  fs::create_directories(dir);
  std::ofstream(dir / "s.json") << R"({"buffer":["ab"],"events":[{"type":"idle"},{"type":"delete_char","line":0,"col":7}]})";
  const auto r = invoke({"synth", "--script", (dir / "s.json").string(), "--out", (dir / "out").string()});
  EXPECT_EQ(r.code, kInput);
  EXPECT_NE(r.err.find("event 1"), std::string::npos) << r.err;
  EXPECT_EQ(invoke({"synth", "--out", (dir / "out").string()}).code, kUsage);
}

TEST(Cli, ExtractWithOracleReproducesGroundTruth) {
  const auto dir = random_scenario("closure", "3", "--scroll-rate 0.2 --popup-rate 0.1 --switch-rate 0.1");
  const auto out = fresh("closure_steps.jsonl");
  const auto r = invoke({"extract", dir.string(), "--out", out.string()});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_EQ(load_steps(out), load_steps(dir / "gt.jsonl"));
}

TEST(Cli, ExtractWithHeuristicBackendsMatchesOracle) {
  const auto dir = random_scenario("heuristic", "4", "--scroll-rate 0.2 --mid-step-scroll-rate 0.2");
  const auto oracle_out = fresh("h_oracle.jsonl"), heur_out = fresh("h_heur.jsonl");
  ASSERT_EQ(invoke({"extract", dir.string(), "--out", oracle_out.string()}).code, kOk);
  const auto r = invoke({"extract", dir.string(), "--action-backend", "heuristic", "--text-backend", "raster", "--out",
                      heur_out.string()});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_EQ(load_steps(heur_out), load_steps(oracle_out));
}

TEST(Cli, ExtractSidecarBackendsAndJobs) {
  const auto a = random_scenario("jobs_a", "5"), b = random_scenario("jobs_b", "6", "--source-id other");
  const auto side = fresh("side.jsonl");
  ASSERT_EQ(invoke({"extract", a.string(), "--action-backend", "sidecar", "--actions", (a / "actions.jsonl").string(),
                 "--text-backend", "sidecar", "--text", (a / "text.jsonl").string(), "--out", side.string()})
                .code,
            kOk);
  EXPECT_EQ(load_steps(side), load_steps(a / "gt.jsonl"));
  EXPECT_EQ(invoke({"extract", a.string(), "--action-backend", "sidecar", "--out", side.string()}).code, kUsage);

  const auto both = fresh("both.jsonl");
  ASSERT_EQ(invoke({"extract", a.string(), b.string(), "--jobs", "2", "--out", both.string()}).code, kOk);
  auto expected = load_steps(a / "gt.jsonl");
  for (const auto& s : load_steps(b / "gt.jsonl")) expected.push_back(s);
  EXPECT_EQ(load_steps(both), expected);
}

TEST(Cli, ExtractEmptyFrameDirFailsWithoutOutput) {
  const auto dir = fresh("empty_frames");
  fs::create_directories(dir);
  const auto out = fresh("empty_steps.jsonl");
  const auto r = invoke({"extract", dir.string(), "--out", out.string()});
  EXPECT_EQ(r.code, kInput);
  EXPECT_NE(r.err.find("MissingFrame"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(out));
  EXPECT_EQ(binary("extract " + dir.string() + " --out " + out.string()), kInput);
  EXPECT_FALSE(fs::exists(out));
}

TEST(Cli, EvaluateIdenticalAndDisjoint) {
  const auto dir = random_scenario("evaluate", "2");
  const auto report = fresh("report.json");
  const auto r = invoke({"evaluate", "--pred", (dir / "gt.jsonl").string(), "--gt", (dir / "gt.jsonl").string(), "--out",
                      report.string()});
  ASSERT_EQ(r.code, kOk) << r.err;
  const auto j = nlohmann::json::parse(slurp(report));
  for (const auto* key : {"iou", "offset"}) {
    ASSERT_EQ(j.at(key).size(), 6u);
    for (const auto& row : j.at(key)) {
      EXPECT_EQ(row.at("precision").get<double>(), 1.0);
      EXPECT_EQ(row.at("recall").get<double>(), 1.0);
      EXPECT_EQ(row.at("f1").get<double>(), 1.0);
    }
  }
  EXPECT_NE(r.out.find("Prec"), std::string::npos);
  const auto shown = invoke({"report", report.string()});
  EXPECT_EQ(shown.code, kOk);
  EXPECT_EQ(shown.out, r.out);

  const auto pred = fresh("disjoint_pred.jsonl"), gt = fresh("disjoint_gt.jsonl");
  std::ofstream(pred) << R"({"source_id":"s","start_frame":0,"end_frame":2,"type":"enter","text":"a"})" << '\n';
  std::ofstream(gt) << R"({"source_id":"s","start_frame":5,"end_frame":8,"type":"enter","text":"a"})" << '\n';
  const auto d = invoke({"evaluate", "--pred", pred.string(), "--gt", gt.string(), "--out", report.string()});
  ASSERT_EQ(d.code, kOk);
  const auto dj = nlohmann::json::parse(slurp(report));
  for (const auto* key : {"iou", "offset"})
    for (const auto& row : dj.at(key)) EXPECT_EQ(row.at("f1").get<double>(), 0.0);
}

TEST(Cli, EvaluateSchemaMismatchIsInputError) {
  const auto bad = fresh("bad_steps.jsonl");
  std::ofstream(bad) << R"({"start":1})" << '\n';
  EXPECT_EQ(invoke({"evaluate", "--pred", bad.string(), "--gt", bad.string()}).code, kInput);
  EXPECT_EQ(invoke({"evaluate", "--pred", "/nonexistent/p.jsonl", "--gt", bad.string()}).code, kInput);
  EXPECT_EQ(invoke({"evaluate", "--pred", bad.string(), "--gt", bad.string(), "--iou-sweep", "0.5,x"}).code, kUsage);
}

TEST(Config, RoundTripsThroughText) {
  PipelineConfig c;
  c.fps = 2.5;
  c.diff_tolerance = 3;
  c.vo_threshold = 0.8;
  c.line_match_threshold = 0.9;
  c.action_backend = "heuristic";
  c.text_backend = "raster";
  c.popup_bridge = true;
  c.iou_sweep = {0.0, 0.25, 1.0};
  c.offset_sweep = {0.0, 2.0};
  c.jobs = 4;
  c.seed = 99;
  c.out = "steps.jsonl";
  c.cell_width = 10;
  c.cell_height = 20;
  PipelineConfig back;
  std::istringstream in(config_to_text(c));
  apply_config_text(back, in, "rt");
  EXPECT_EQ(back, c);
}

TEST(Config, CommentsUnderscoresAndErrors) {
  PipelineConfig c;
  std::istringstream in("# comment\nvo_threshold = 0.6  # trailing\n\naction-backend = \"heuristic\"\n");
  apply_config_text(c, in, "t");
  EXPECT_EQ(c.vo_threshold, 0.6);
  EXPECT_EQ(c.action_backend, "heuristic");
  std::istringstream unknown("colour = red\n");
  EXPECT_THROW(apply_config_text(c, unknown, "t"), UsageError);
  std::istringstream malformed("jobs\n");
  EXPECT_THROW(apply_config_text(c, malformed, "t"), UsageError);
  std::istringstream nan("jobs = many\n");
  EXPECT_THROW(apply_config_text(c, nan, "t"), UsageError);
}

TEST(Config, FlagsOverrideFileOverridesEnvironment) {
  const auto env_file = fresh("env.conf"), file = fresh("file.conf");
  std::ofstream(env_file) << "vo-threshold = 0.5\nline-match-threshold = 0.5\njobs = 2\n";
  std::ofstream(file) << "vo-threshold = 0.6\nline-match-threshold = 0.6\n";
  setenv("SEEFLOW_CONFIG", env_file.c_str(), 1);
  Flags f;
  EXPECT_EQ(f.resolve().vo_threshold, 0.5);
  f.config = file.string();
  auto c = f.resolve();
  EXPECT_EQ(c.vo_threshold, 0.6);
  EXPECT_EQ(c.jobs, 2);
  f.vo_threshold = 0.9;
  c = f.resolve();
  EXPECT_EQ(c.vo_threshold, 0.9);
  EXPECT_EQ(c.line_match_threshold, 0.6);
  f.vo_threshold = 1.5;
  EXPECT_THROW(f.resolve(), UsageError);
  unsetenv("SEEFLOW_CONFIG");
}

TEST(Config, InvalidValuesAreUsageErrors) {
  const auto dir = random_scenario("invalid_cfg", "1");
  EXPECT_EQ(invoke({"extract", dir.string(), "--vo-threshold", "2", "--out", "/dev/null"}).code, kUsage);
  EXPECT_EQ(invoke({"extract", dir.string(), "--text-backend", "ocr", "--out", "/dev/null"}).code, kUsage);
  EXPECT_EQ(invoke({"extract", dir.string(), "--jobs", "0", "--out", "/dev/null"}).code, kUsage);
}
