#include <gtest/gtest.h>

#include <thread>

#include <atomic>
#include <filesystem>

#include "tabaudit/cache.hpp"
#include "tabaudit/error.hpp"
#include "tabaudit/text.hpp"

using namespace tabaudit;
using backend::CacheRecord;

namespace {

std::filesystem::path temp_path(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "tabaudit_cache_tests";
  std::filesystem::create_directories(dir);
  auto p = dir / name;
  std::filesystem::remove(p);
  return p;
}

prompt::PromptTranscript transcript(std::string last) {
  prompt::PromptTranscript t;
  t.messages = {{prompt::Role::kSystem, "s"}, {prompt::Role::kUser, std::move(last)}};
  return t;
}

// Counts calls; answers with the user text reversed.
class CountingBackend : public backend::CompletionBackend {
 public:
  backend::CompletionResult complete(const prompt::PromptTranscript& t,
                                     const backend::GenParams&) override {
    ++calls;
    backend::CompletionResult r;
    r.text = std::string(t.messages.back().content.rbegin(), t.messages.back().content.rend());
    r.backend_id = "counting";
    r.timestamp = "2026-01-01T00:00:0" + std::to_string(calls.load() % 10) + ".000Z";
    r.token_usage = backend::TokenUsage{10, 2};
    return r;
  }
  std::string id() const override { return "counting"; }
  std::atomic<int> calls{0};
};

}  // namespace

TEST(CacheRecord, JsonlRoundTrip) {
  CacheRecord r{"k", "d", "gpt-4", "1,2\n3", "2026-01-01T00:00:00.000Z",
                backend::TokenUsage{5, 7}, "http_chat"};
  const auto line = backend::cache_record_to_jsonl(r);
  EXPECT_EQ(line.find('\n'), std::string::npos);
  EXPECT_EQ(backend::cache_record_from_json(line), r);
  r.token_usage.reset();
  EXPECT_EQ(backend::cache_record_from_json(backend::cache_record_to_jsonl(r)), r);
}

TEST(CacheRecord, CarriesSpecifiedFields) {
  const auto line = backend::cache_record_to_jsonl({"k", "d", "m", "t", "ts", {}, "b"});
  for (const char* f : {"\"key\"", "\"transcript_digest\"", "\"model_id\"", "\"text\"",
                        "\"timestamp\"", "\"token_usage\""}) {
    EXPECT_NE(line.find(f), std::string::npos) << f;
  }
}

TEST(CompletionCache, RecordThenReplayWithoutCallingInner) {
  const auto path = temp_path("record.jsonl");
  auto inner = std::make_shared<CountingBackend>();
  std::vector<backend::CompletionResult> recorded;
  {
    auto cache = std::make_shared<backend::CompletionCache>(path);
    backend::RecordingBackend rec(inner, cache);
    for (int i = 0; i < 5; ++i) recorded.push_back(rec.complete(transcript("row" + std::to_string(i)), {}));
    // second pass is served from the cache
    for (int i = 0; i < 5; ++i) rec.complete(transcript("row" + std::to_string(i)), {});
    EXPECT_EQ(inner->calls, 5);
  }
  auto cache = std::make_shared<const backend::CompletionCache>(path);
  EXPECT_EQ(cache->size(), 5u);
  backend::ReplayBackend replay(cache);
  for (int i = 0; i < 5; ++i) {
    const auto r = replay.complete(transcript("row" + std::to_string(i)), {});
    EXPECT_EQ(r.text, recorded[i].text);
    EXPECT_EQ(r.timestamp, recorded[i].timestamp);
    EXPECT_EQ(r.backend_id, "counting");
    EXPECT_EQ(r.token_usage, recorded[i].token_usage);
    EXPECT_TRUE(r.cached);
  }
  EXPECT_EQ(inner->calls, 5);
}

TEST(CompletionCache, ReplayMissIsCacheMiss) {
  auto cache = std::make_shared<const backend::CompletionCache>();
  backend::ReplayBackend replay(cache);
  try {
    replay.complete(transcript("x"), {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCacheMiss);
    EXPECT_FALSE(e.retryable());
  }
}

TEST(CompletionCache, KeyIncludesParams) {
  auto cache = std::make_shared<backend::CompletionCache>();
  backend::RecordingBackend rec(std::make_shared<CountingBackend>(), cache);
  rec.complete(transcript("x"), {});
  backend::ReplayBackend replay(cache);
  backend::GenParams other;
  other.temperature = 1.0;
  EXPECT_THROW(replay.complete(transcript("x"), other), Error);
  EXPECT_NO_THROW(replay.complete(transcript("x"), {}));
}

TEST(CompletionCache, LastRecordWinsAndCorruptLineIsParseError) {
  const auto path = temp_path("dups.jsonl");
  text::write_file(path, backend::cache_record_to_jsonl({"k", "d", "m", "first", "t1", {}, "b"}) +
                             "\n\n" +
                             backend::cache_record_to_jsonl({"k", "d", "m", "second", "t2", {}, "b"}) +
                             "\n");
  backend::CompletionCache cache(path);
  EXPECT_EQ(cache.lookup("k")->text, "second");

  const auto bad = temp_path("bad.jsonl");
  text::write_file(bad, "{not json\n");
  try {
    backend::CompletionCache c(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParseError);
  }
}

TEST(CompletionCache, ConcurrentAppendsAllPersist) {
  const auto path = temp_path("concurrent.jsonl");
  {
    backend::CompletionCache cache(path);
    std::vector<std::jthread> pool;
    for (int w = 0; w < 4; ++w) {
      pool.emplace_back([&, w] {
        for (int i = 0; i < 50; ++i) {
          cache.append({std::to_string(w) + "-" + std::to_string(i), "d", "m", "t", "ts", {}, "b"});
        }
      });
    }
  }
  EXPECT_EQ(backend::CompletionCache(path).size(), 200u);
}
