/* Copyright 2026 The Boxforge Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "boxforge/cli.h"

#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

namespace boxforge {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run Cli(const std::vector<std::string>& args) {
  ::testing::internal::CaptureStdout();
  ::testing::internal::CaptureStderr();
  Run r;
  r.code = run_cli(args);
  r.out = ::testing::internal::GetCapturedStdout();
  r.err = ::testing::internal::GetCapturedStderr();
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::path(::testing::TempDir()) /
           ("boxforge_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  std::string Path(const std::string& name) const { return (dir_ / name).string(); }
  void WriteFile(const std::string& name, const std::string& text) const {
    std::ofstream(Path(name), std::ios::binary) << text;
  }
  static std::string Slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
  }
  static json ReadJson(const std::string& path) { return json::parse(Slurp(path)); }

  fs::path dir_;
};

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(Cli({}).code, kExitUsage);
  EXPECT_EQ(Cli({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(Cli({"plan", "--image", "320,320"}).code, kExitUsage);
  EXPECT_EQ(Cli({"plan", "--image", "320,x", "--patch", "288,288"}).code, kExitUsage);
  EXPECT_EQ(Cli({"consolidate", "--in", Path("missing.json")}).code, kExitUsage);
  EXPECT_EQ(Cli({"--help"}).code, kExitOk);
}

TEST_F(CliTest, ConsolidateEmptyAndUnknownMode) {
  WriteFile("empty.json", R"({"schema_version": 1, "dimensionality": 2, "detections": []})");
  for (const std::string mode : {"wbc", "nms"}) {
    const auto r = Cli({"consolidate", "--in", Path("empty.json"), "--mode", mode, "--out",
                        Path("out.json")});
    EXPECT_EQ(r.code, kExitOk) << r.err;
    const auto j = ReadJson(Path("out.json"));
    EXPECT_TRUE(j["detections"].empty());
    EXPECT_EQ(j["run"]["mode"], mode);
  }
  const auto bad = Cli({"consolidate", "--in", Path("empty.json"), "--mode", "vote"});
  EXPECT_EQ(bad.code, kExitUsage);
  EXPECT_NE(bad.err.find("vote"), std::string::npos);
}

TEST_F(CliTest, SchemaViolationsAreDiagnosed) {
  WriteFile("bad.json", "{\n  \"schema_version\": 1,\n  \"dimensionality\": 2,\n  \"detections\": [\n    {\"image_id\": \"a\", \"class_id\": 1, \"score\": 0.5, \"box\": [0, 0, 1]}\n  ]\n}\n");
  auto r = Cli({"consolidate", "--in", Path("bad.json")});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("/detections/0/box"), std::string::npos) << r.err;
  WriteFile("syntax.json", "{\n  \"schema_version\": 1,\n  ]\n");
  r = Cli({"consolidate", "--in", Path("syntax.json")});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find(":3:"), std::string::npos) << r.err;
}

TEST_F(CliTest, PlanPrintsFourPatches) {
  const auto r = Cli({"plan", "--image", "320,320", "--patch", "288,288", "--out", Path("plan.json")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(ReadJson(Path("plan.json"))["patches"].size(), 4u);
  EXPECT_NE(r.out.find("patches 4"), std::string::npos) << r.out;
}

TEST_F(CliTest, AnchorsReport) {
  const auto r = Cli({"anchors", "report", "--image", "320,320", "--format", "csv"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("total,,,,,,8500"), std::string::npos);
  EXPECT_NE(r.out.find("P1,2,160x160,segmentation"), std::string::npos);
  EXPECT_EQ(Cli({"anchors", "report", "--image", "0,320"}).code, kExitUsage);
}

TEST_F(CliTest, LossEvalPerfectPrediction) {
  WriteFile("u.csv", "1,0,0\n0,1,0\n0,0,1\n1,0,0\n");
  WriteFile("labels.csv", "0\n1\n2\n0\n");
  const auto r = Cli({"loss-eval", "--u", Path("u.csv"), "--labels", Path("labels.csv"),
                      "--grad", Path("g.csv")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n', r.out.find('\n') + 1) + 1),
            "loss,cross_entropy,dice\n-1,0,1\n");
  EXPECT_TRUE(fs::exists(Path("g.csv")));
  WriteFile("half.csv", "0.5,0.6\n");
  WriteFile("l1.csv", "0\n");
  EXPECT_EQ(Cli({"loss-eval", "--u", Path("half.csv"), "--labels", Path("l1.csv")}).code,
            kExitUsage);
}

TEST_F(CliTest, GenToyIsByteIdentical) {
  const std::vector<std::string> base = {"gen-toy", "--task", "shapes", "--n", "10", "--seed", "7"};
  auto a = base;
  a.insert(a.end(), {"--out-dir", Path("a")});
  auto b = base;
  b.insert(b.end(), {"--out-dir", Path("b")});
  ASSERT_EQ(Cli(a).code, kExitOk);
  ASSERT_EQ(Cli(b).code, kExitOk);
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(Path("a"))) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), Path("a"));
    EXPECT_EQ(Slurp(e.path().string()), Slurp((fs::path(Path("b")) / rel).string())) << rel;
    ++files;
  }
  EXPECT_EQ(files, 21u);
  const auto gt = ReadJson(Path("a/ground_truth.json"));
  EXPECT_EQ(gt["images"].size(), 10u);
  EXPECT_EQ(fs::file_size(Path("a/images/shapes_test_00000.f32")), 320u * 320u * 4u);
}

TEST_F(CliTest, NoiselessPipelineScoresPerfectly) {
  ASSERT_EQ(Cli({"gen-toy", "--n", "8", "--seed", "3", "--out-dir", Path("toy"), "--no-arrays"}).code,
            kExitOk);
  ASSERT_EQ(Cli({"plan", "--image", "320,320", "--patch", "288,288", "--models", "2", "--out",
                 Path("plan.json")})
                .code,
            kExitOk);
  auto r = Cli({"simulate", "--gt", Path("toy/ground_truth.json"), "--plan-file", Path("plan.json"),
                "--score-model", "perfect", "--seed", "1", "--out", Path("raw.json")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  r = Cli({"consolidate", "--in", Path("raw.json"), "--plan-file", Path("plan.json"), "--out",
           Path("wbc.json")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  r = Cli({"evaluate", "--dets", Path("wbc.json"), "--gt", Path("toy/ground_truth.json"), "--out",
           Path("eval.json"), "--curves", Path("curves.csv")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto ev = ReadJson(Path("eval.json"));
  EXPECT_EQ(ev["map"].get<double>(), 1.0);
  EXPECT_EQ(ev["patient_map"].get<double>(), 1.0);
  EXPECT_NE(r.out.find("mAP10 [%]"), std::string::npos);
  EXPECT_NE(r.out.find("AP_pat [%]"), std::string::npos);
  EXPECT_NE(r.out.find("100.0"), std::string::npos);
  EXPECT_EQ(Slurp(Path("curves.csv")).rfind("class_id,rank,score,precision,recall\n", 0), 0u);
}

TEST_F(CliTest, EvaluateRejectsUnknownImages) {
  ASSERT_EQ(Cli({"gen-toy", "--n", "2", "--seed", "3", "--out-dir", Path("toy"), "--no-arrays"}).code,
            kExitOk);
  WriteFile("dets.json", R"({"schema_version": 1, "dimensionality": 2, "detections": [
      {"image_id": "ghost_7", "class_id": 1, "score": 0.5, "box": [0, 0, 4, 4]}]})");
  const auto r = Cli({"evaluate", "--dets", Path("dets.json"), "--gt", Path("toy/ground_truth.json")});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("ghost_7"), std::string::npos);
}

TEST_F(CliTest, MergeSlicesMode) {
  WriteFile("slices.json", R"({"schema_version": 1, "dimensionality": 2, "detections": [
      {"image_id": "v", "class_id": 1, "score": 0.5, "box": [10, 10, 20, 20], "slice_id": 3},
      {"image_id": "v", "class_id": 1, "score": 0.9, "box": [10, 10, 20, 20], "slice_id": 4},
      {"image_id": "v", "class_id": 1, "score": 0.6, "box": [10, 10, 20, 20], "slice_id": 5}]})");
  const auto r = Cli({"consolidate", "--in", Path("slices.json"), "--mode", "merge2d3d", "--out",
                      Path("cubes.json")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = ReadJson(Path("cubes.json"));
  EXPECT_EQ(j["dimensionality"], 3);
  EXPECT_EQ(j["detections"][0]["box"], json({10, 10, 3, 20, 20, 6}));
}

}  // namespace
}  // namespace boxforge
