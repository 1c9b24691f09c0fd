#include <gtest/gtest.h>

#include <memory>
#include <thread>

#include "synth.hpp"
#include "tabaudit/backend.hpp"
#include "tabaudit/error.hpp"
#include "tabaudit/text.hpp"

using namespace tabaudit;
using backend::GenParams;

namespace {

std::shared_ptr<const ingest::DatasetFile> make_file(std::size_t n, std::uint64_t seed,
                                                     std::string name = "f.csv") {
  return std::make_shared<const ingest::DatasetFile>(ingest::parse_dataset_file(
      synth::to_text(synth::distinct_rows(n, 3, seed)), {}, std::move(name)));
}

prompt::PromptTranscript golden_transcript() {
  prompt::PromptTranscript t;
  t.messages = {{prompt::Role::kSystem, std::string(prompt::system_message())},
                {prompt::Role::kUser, "0,1.0\n15,1.1"},
                {prompt::Role::kAssistant, "31,1.2"},
                {prompt::Role::kUser, "46,1.3\n62,1.4"}};
  return t;
}

prompt::PromptTranscript prefix_transcript(std::vector<std::string> rows,
                                           std::string file_ref = "") {
  sampling::WindowSample w;
  w.prefix_rows = std::move(rows);
  w.target_row = "unused";
  return prompt::assemble_transcript(w, {}, {}, 0, std::move(file_ref));
}

}  // namespace

TEST(GenParams, Defaults) {
  GenParams p;
  EXPECT_EQ(p.temperature, 0.0);
  EXPECT_EQ(p.max_output_tokens, 256);
  EXPECT_NO_THROW(p.validate());
  p.temperature = -0.1;
  EXPECT_THROW(p.validate(), Error);
  p = {};
  p.max_output_tokens = 0;
  EXPECT_THROW(p.validate(), Error);
}

// Golden digests, computed once by an independent implementation of the
// length-prefixed encoding.
TEST(CacheKey, GoldenTranscript) {
  const auto t = golden_transcript();
  EXPECT_EQ(backend::cache_key(t, GenParams{}),
            "f5c14a554687f44b1f576179fea8b988167e9e0419060ca649e733a954ec37c2");
  EXPECT_EQ(backend::transcript_digest(t),
            "1bb8c01f1b257bcb2cc0cce4a558f598ed8769b93f6761fd4afcb87587186af1");
}

TEST(CacheKey, StableAndSensitive) {
  const auto t = golden_transcript();
  const GenParams p;
  EXPECT_EQ(backend::cache_key(t, p), backend::cache_key(t, p));
  auto t2 = t;
  t2.messages[1].content[0] = '1';
  EXPECT_NE(backend::cache_key(t, p), backend::cache_key(t2, p));
  auto t3 = t;
  t3.messages[2].role = prompt::Role::kSystem;
  EXPECT_NE(backend::cache_key(t, p), backend::cache_key(t3, p));
  GenParams p2;
  p2.temperature = 0.5;
  EXPECT_NE(backend::cache_key(t, p), backend::cache_key(t, p2));
  GenParams p3;
  p3.max_output_tokens = 128;
  EXPECT_NE(backend::cache_key(t, p), backend::cache_key(t, p3));
  GenParams p4;
  p4.model_id = "gpt-4o";
  EXPECT_NE(backend::cache_key(t, p), backend::cache_key(t, p4));
  // trial metadata is not part of the key
  auto t5 = t;
  t5.trial_id = 9;
  t5.file_ref = "elsewhere";
  EXPECT_EQ(backend::cache_key(t, p), backend::cache_key(t5, p));
}

TEST(CacheKey, LengthPrefixPreventsBoundaryCollisions) {
  prompt::PromptTranscript a, b;
  a.messages = {{prompt::Role::kUser, "ab"}, {prompt::Role::kUser, "c"}};
  b.messages = {{prompt::Role::kUser, "a"}, {prompt::Role::kUser, "bc"}};
  EXPECT_NE(backend::cache_key(a, {}), backend::cache_key(b, {}));
}

TEST(CopyLast, ReturnsLastPrefixRow) {
  backend::CopyLastBackend b;
  const auto r = b.complete(prefix_transcript({"0,0.97,0.03", "15,0.98,0.02"}), {});
  EXPECT_EQ(r.text, "15,0.98,0.02");
  EXPECT_EQ(r.backend_id, "copy_last");
  EXPECT_FALSE(r.timestamp.empty());
}

TEST(Memorizer, ReturnsTrueNextRow) {
  auto f = make_file(400, 2);
  auto files = std::make_shared<const backend::FileSet>(
      std::vector<std::shared_ptr<const ingest::DatasetFile>>{f});
  backend::MemorizerBackend b(files);
  const auto plan = sampling::build_trial_plan(*f, {});
  for (const auto& trial : plan.trials) {
    EXPECT_EQ(b.complete(prompt::transcript_for(plan, trial), {}).text, trial.test.target_row);
  }
}

TEST(Memorizer, PrefixNotFound) {
  auto files = std::make_shared<const backend::FileSet>(
      std::vector<std::shared_ptr<const ingest::DatasetFile>>{make_file(50, 1)});
  backend::MemorizerBackend b(files);
  try {
    b.complete(prefix_transcript({"not,in,file"}, "f.csv"), {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPrefixNotFound);
  }
}

TEST(Memorizer, FirstOccurrenceWinsForAmbiguousPrefix) {
  auto f = std::make_shared<const ingest::DatasetFile>(
      ingest::parse_dataset_file("1\n2\nA\n1\n2\nB\n", {}, "amb.csv"));
  auto files = std::make_shared<const backend::FileSet>(
      std::vector<std::shared_ptr<const ingest::DatasetFile>>{f});
  backend::MemorizerBackend b(files);
  EXPECT_EQ(b.complete(prefix_transcript({"1", "2"}, "amb.csv"), {}).text, "A");
}

TEST(NoisyMemorizer, ZeroNoiseEqualsMemorizer) {
  auto f = make_file(400, 3);
  auto files = std::make_shared<const backend::FileSet>(
      std::vector<std::shared_ptr<const ingest::DatasetFile>>{f});
  backend::MemorizerBackend mem(files);
  backend::NoisyMemorizerBackend noisy(files, 0.0, 77);
  const auto plan = sampling::build_trial_plan(*f, {});
  for (const auto& trial : plan.trials) {
    const auto t = prompt::transcript_for(plan, trial);
    EXPECT_EQ(noisy.complete(t, {}).text, mem.complete(t, {}).text);
  }
}

TEST(NoisyMemorizer, FullNoiseChangesEveryPosition) {
  auto f = make_file(400, 4);
  auto files = std::make_shared<const backend::FileSet>(
      std::vector<std::shared_ptr<const ingest::DatasetFile>>{f});
  backend::NoisyMemorizerBackend noisy(files, 1.0, 5);
  const auto plan = sampling::build_trial_plan(*f, {});
  for (const auto& trial : plan.trials) {
    const auto out = text::to_scalars(noisy.complete(prompt::transcript_for(plan, trial), {}).text);
    const auto truth = text::to_scalars(trial.test.target_row);
    ASSERT_EQ(out.size(), truth.size());
    for (std::size_t i = 0; i < out.size(); ++i) EXPECT_NE(out[i], truth[i]);
  }
}

TEST(RandomBackend, KeepsLayoutRedrawsDigits) {
  backend::RandomBackend b(1);
  const std::string last = "15,0.98,-0.02";
  const auto t = prefix_transcript({"0,0.97,0.03", last});
  const auto out = b.complete(t, {}).text;
  ASSERT_EQ(out.size(), last.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const bool digit = last[i] >= '0' && last[i] <= '9';
    if (digit) {
      EXPECT_TRUE(out[i] >= '0' && out[i] <= '9');
    } else {
      EXPECT_EQ(out[i], last[i]);
    }
  }
  EXPECT_EQ(text::split(out, ',').size(), 3u);
  EXPECT_EQ(b.complete(t, {}).text, out);  // pure in (seed, transcript)
}

TEST(TrialSeed, DependsOnFileAndTrial) {
  auto t = prefix_transcript({"1"}, "a.csv");
  const auto s0 = backend::trial_seed(1, t);
  t.trial_id = 1;
  EXPECT_NE(backend::trial_seed(1, t), s0);
  t.trial_id = 0;
  t.file_ref = "b.csv";
  EXPECT_NE(backend::trial_seed(1, t), s0);
  EXPECT_NE(backend::trial_seed(2, prefix_transcript({"1"}, "a.csv")), s0);
}

// Synthetic backends must not depend on call order or thread interleaving.
TEST(SyntheticBackends, ConcurrentCallsMatchSequential) {
  auto f = make_file(1000, 6);
  auto files = std::make_shared<const backend::FileSet>(
      std::vector<std::shared_ptr<const ingest::DatasetFile>>{f});
  backend::NoisyMemorizerBackend noisy(files, 0.3, 11);
  sampling::AuditConfig cfg;
  cfg.n_trials = 40;
  const auto plan = sampling::build_trial_plan(*f, cfg);
  std::vector<prompt::PromptTranscript> ts;
  for (const auto& trial : plan.trials) ts.push_back(prompt::transcript_for(plan, trial));
  std::vector<std::string> seq, par(ts.size());
  for (const auto& t : ts) seq.push_back(noisy.complete(t, {}).text);
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < 4; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = ts.size(); i-- > 0;) {
          if (i % 4 == static_cast<std::size_t>(w)) par[i] = noisy.complete(ts[i], {}).text;
        }
      });
    }
  }
  EXPECT_EQ(seq, par);
}

TEST(UtcTimestamp, IsoShape) {
  const auto ts = backend::utc_timestamp_now();
  ASSERT_EQ(ts.size(), 24u);
  EXPECT_EQ(ts[4], '-');
  EXPECT_EQ(ts[10], 'T');
  EXPECT_EQ(ts.back(), 'Z');
}
