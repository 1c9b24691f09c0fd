#include <gtest/gtest.h>

#include <fstream>

#include "tabaudit/error.hpp"
#include "tabaudit/manifest.hpp"

using namespace tabaudit;
using cli::parse_manifest;

namespace {

std::optional<ErrorCode> code_of(std::string_view text) {
  try {
    parse_manifest(text, "/base").validate();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace

TEST(Manifest, FullExample) {
  const auto m = parse_manifest(R"(
out = "runs"
seed = 42
trials = 10
window = 8
fewshot = 3
backend = "noisy"
noise_p = 0.25
model = "gpt-4o"
temperature = 0.5
max_tokens = 64
timeout_ms = 5000
cache = "cache.jsonl"
concurrency = 2
granularity = "char"
role_map = "user_system"
include_header = true
strip_fences = false

[datasets]
imu = "data/imu_*.csv"
gait = ["a.txt", "/abs/b.txt"]

[parse]
has_header = true

[parse.gait]
delimiter = "tab"
comment_prefix = "%"
columns = 4

[thresholds]
margin_min = 0.2
min_run = 30
)",
                                "/base");
  ASSERT_EQ(m.datasets.size(), 2u);
  EXPECT_EQ(m.datasets[0], (cli::DatasetSpec{"imu", {"/base/data/imu_*.csv"}}));
  EXPECT_EQ(m.datasets[1], (cli::DatasetSpec{"gait", {"/base/a.txt", "/abs/b.txt"}}));
  EXPECT_EQ(m.out_dir, "/base/runs");
  EXPECT_EQ(m.audit.seed, 42u);
  EXPECT_EQ(m.audit.n_trials, 10u);
  EXPECT_EQ(m.audit.window_len, 8u);
  EXPECT_EQ(m.audit.n_fewshot, 3u);
  EXPECT_EQ(m.backend, cli::BackendKind::kNoisy);
  EXPECT_EQ(m.noise_p, 0.25);
  EXPECT_EQ(m.generation.model_id, "gpt-4o");
  EXPECT_EQ(m.generation.temperature, 0.5);
  EXPECT_EQ(m.generation.max_output_tokens, 64);
  EXPECT_EQ(m.generation.timeout.count(), 5000);
  EXPECT_EQ(m.cache, std::filesystem::path("/base/cache.jsonl"));
  EXPECT_EQ(m.concurrency, 2u);
  EXPECT_EQ(m.granularity, report::Granularity::kChar);
  EXPECT_EQ(m.role_map, prompt::RoleMap::kUserSystem);
  EXPECT_TRUE(m.include_header);
  EXPECT_FALSE(m.extract.strip_fences);
  EXPECT_TRUE(m.extract.trim_whitespace);
  EXPECT_EQ(m.thresholds.margin_min, 0.2);
  EXPECT_EQ(m.thresholds.min_run, 30u);

  const auto imu = m.parse_config_for("imu");
  ASSERT_TRUE(imu);
  EXPECT_TRUE(imu->has_header);
  const auto gait = m.parse_config_for("gait");
  ASSERT_TRUE(gait);
  EXPECT_EQ(gait->delimiter, '\t');
  EXPECT_EQ(gait->comment_prefix, "%");
  EXPECT_EQ(gait->expected_column_count, 4u);
}

TEST(Manifest, DefaultsWhenOnlyDatasetsGiven) {
  const auto m = parse_manifest("[datasets]\nd = \"x.csv\"\n", "/base");
  EXPECT_EQ(m.audit, sampling::AuditConfig{});
  EXPECT_EQ(m.generation, backend::GenParams{});
  EXPECT_FALSE(m.backend);
  EXPECT_FALSE(m.parse_config_for("d"));
  EXPECT_EQ(m.concurrency, 4u);
}

TEST(Manifest, InvalidInputsAreInvalidConfig) {
  EXPECT_EQ(code_of("seed = 1\n"), ErrorCode::kInvalidConfig);
  EXPECT_EQ(code_of("[datasets]\nd = \"x\"\n[x]\nk = 1\n"), ErrorCode::kInvalidConfig);
  EXPECT_EQ(code_of("trials = -3\n[datasets]\nd = \"x\"\n"), ErrorCode::kInvalidConfig);
  EXPECT_EQ(code_of("trials = 0\n[datasets]\nd = \"x\"\n"), ErrorCode::kInvalidConfig);
  EXPECT_EQ(code_of("backend = \"oracle\"\n[datasets]\nd = \"x\"\n"), ErrorCode::kInvalidConfig);
  EXPECT_EQ(code_of("backend = \"replay\"\n[datasets]\nd = \"x\"\n"), ErrorCode::kInvalidConfig);
  EXPECT_EQ(code_of("noise_p = 2\n[datasets]\nd = \"x\"\n"), ErrorCode::kInvalidConfig);
  EXPECT_EQ(code_of("[datasets]\nd = \"x\"\n[parse.other]\nhas_header = true\n"),
            ErrorCode::kInvalidConfig);
  EXPECT_EQ(code_of("[datasets]\nd = \"x\"\n[parse]\ndelimiter = \"|\"\n"),
            ErrorCode::kInvalidConfig);
  EXPECT_EQ(code_of("[datasets]\nd = \"x\"\n[thresholds]\nconfound_dup = 3\n"),
            ErrorCode::kInvalidConfig);
  EXPECT_EQ(code_of("include_header = maybe\n[datasets]\nd = \"x\"\n"), ErrorCode::kInvalidConfig);
}

TEST(Manifest, LoadResolvesAgainstManifestDirectory) {
  const auto dir = std::filesystem::temp_directory_path() / "tabaudit_manifest";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "audit.toml") << "[datasets]\nd = \"rows.csv\"\n";
  }
  const auto m = cli::load_manifest(dir / "audit.toml");
  EXPECT_EQ(m.datasets[0].patterns[0], (dir / "rows.csv").string());
  std::filesystem::remove_all(dir);
  EXPECT_THROW(cli::load_manifest(dir / "missing.toml"), Error);
}

TEST(BackendKind, NamesRoundTrip) {
  for (auto k : {cli::BackendKind::kHttp, cli::BackendKind::kReplay, cli::BackendKind::kMemorizer,
                 cli::BackendKind::kCopy, cli::BackendKind::kRandom, cli::BackendKind::kNoisy}) {
    EXPECT_EQ(cli::parse_backend_kind(cli::to_string(k)), k);
  }
}
