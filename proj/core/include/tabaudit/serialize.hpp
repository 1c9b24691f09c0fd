#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tabaudit/backend.hpp"
#include "tabaudit/prompt.hpp"
#include "tabaudit/sampler.hpp"

// Canonical JSON forms of the intermediate stage outputs, so each stage can
// be rerun from the previous one's files.
namespace tabaudit::serialize {

// A dataset's plans: {"plans": [...]}, pretty-printed.
std::string plans_to_json(const std::vector<sampling::TrialPlan>& plans);
std::vector<sampling::TrialPlan> plans_from_json(std::string_view text);

// One transcript per line.
std::string transcript_to_jsonl(const prompt::PromptTranscript& transcript);
prompt::PromptTranscript transcript_from_json(std::string_view line);

struct CompletionRecord {
  std::string file_ref;
  std::size_t trial_id = 0;
  backend::CompletionResult result;
};

// One completion per line; latency and the cached flag are not stored.
std::string completion_to_jsonl(const CompletionRecord& record);
CompletionRecord completion_from_json(std::string_view line);

// Applies `parse` to every non-blank line.
template <typename F>
auto parse_jsonl(std::string_view text, F parse) {
  std::vector<decltype(parse(std::string_view{}))> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = text.substr(pos, end - pos);
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) out.push_back(parse(line));
    pos = end + 1;
  }
  return out;
}

}  // namespace tabaudit::serialize
