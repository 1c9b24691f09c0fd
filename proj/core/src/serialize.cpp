#include "tabaudit/serialize.hpp"

#include "canonical_json.hpp"
#include "report_json.hpp"
#include "tabaudit/error.hpp"

namespace tabaudit::serialize {

using detail::Json;

std::string plans_to_json(const std::vector<sampling::TrialPlan>& plans) {
  Json arr = Json::array();
  for (const auto& p : plans) arr.push_back(detail::plan_to_json(p));
  return detail::canonical_dump(Json{{"plans", arr}}, true);
}

std::vector<sampling::TrialPlan> plans_from_json(std::string_view text) {
  const auto j = detail::parse_json(text);
  std::vector<sampling::TrialPlan> out;
  for (const auto& p : detail::require(j, "plans")) out.push_back(detail::plan_from_json(p));
  return out;
}

std::string transcript_to_jsonl(const prompt::PromptTranscript& transcript) {
  return detail::canonical_dump(detail::transcript_to_json(transcript), false) + "\n";
}

prompt::PromptTranscript transcript_from_json(std::string_view line) {
  return detail::transcript_from_json(detail::parse_json(line));
}

std::string completion_to_jsonl(const CompletionRecord& record) {
  Json j{{"file_ref", record.file_ref},
         {"trial_id", record.trial_id},
         {"text", record.result.text},
         {"backend_id", record.result.backend_id},
         {"timestamp", record.result.timestamp}};
  if (record.result.token_usage) {
    j["token_usage"] = {{"prompt_tokens", record.result.token_usage->prompt_tokens},
                        {"output_tokens", record.result.token_usage->output_tokens}};
  }
  return detail::canonical_dump(j, false) + "\n";
}

CompletionRecord completion_from_json(std::string_view line) {
  const auto j = detail::parse_json(line);
  CompletionRecord r;
  r.file_ref = detail::get_string(j, "file_ref");
  r.trial_id = detail::get_uint(j, "trial_id");
  r.result.text = detail::get_string(j, "text");
  r.result.backend_id = detail::get_string(j, "backend_id");
  r.result.timestamp = detail::get_string(j, "timestamp");
  if (j.contains("token_usage")) {
    const auto& u = j["token_usage"];
    r.result.token_usage =
        backend::TokenUsage{detail::get_int(u, "prompt_tokens"), detail::get_int(u, "output_tokens")};
  }
  return r;
}

}  // namespace tabaudit::serialize
