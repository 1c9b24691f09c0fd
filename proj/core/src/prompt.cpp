#include "tabaudit/prompt.hpp"

#include "tabaudit/error.hpp"
#include "tabaudit/text.hpp"

namespace tabaudit::prompt {
namespace {

constexpr std::string_view kSystemMessage =
    "You are a helpful autocomplete bot for wearable sensor datasets. "
    "Your task is to provide rows as they are contained in sensor datasets. "
    "The user provides a number of contiguous rows from a sensor dataset. "
    "You then provide the next row from the dataset.";

std::string render_prefix(const sampling::WindowSample& w,
                          const std::optional<std::string>& header_line) {
  if (w.prefix_rows.empty()) {
    throw Error(ErrorCode::kEmptyPrefix,
                "window at row " + std::to_string(w.start_index) + " has no prefix rows");
  }
  std::string out;
  if (header_line) {
    out = *header_line;
    out.push_back('\n');
  }
  out += text::join(w.prefix_rows, "\n");
  return out;
}

}  // namespace

std::string_view to_string(Role role) noexcept {
  switch (role) {
    case Role::kSystem: return "system";
    case Role::kUser: return "user";
    case Role::kAssistant: return "assistant";
  }
  return "user";
}

Role parse_role(std::string_view name) {
  if (name == "system") return Role::kSystem;
  if (name == "user") return Role::kUser;
  if (name == "assistant") return Role::kAssistant;
  throw Error(ErrorCode::kParseError, "unknown role '" + std::string(name) + "'");
}

std::string_view to_string(RoleMap map) noexcept {
  return map == RoleMap::kUserAssistant ? "user_assistant" : "user_system";
}

RoleMap parse_role_map(std::string_view name) {
  if (name == "user_assistant") return RoleMap::kUserAssistant;
  if (name == "user_system") return RoleMap::kUserSystem;
  throw Error(ErrorCode::kInvalidConfig, "unknown role map '" + std::string(name) + "'");
}

std::string_view system_message() noexcept { return kSystemMessage; }

PromptTranscript assemble_transcript(const sampling::WindowSample& test,
                                     std::span<const sampling::WindowSample> fewshot,
                                     const TranscriptOptions& options, std::size_t trial_id,
                                     std::string file_ref) {
  PromptTranscript t;
  t.trial_id = trial_id;
  t.file_ref = std::move(file_ref);
  t.messages.reserve(2 + 2 * fewshot.size());
  t.messages.push_back({Role::kSystem, std::string(kSystemMessage)});
  const Role answer_role =
      options.role_map == RoleMap::kUserAssistant ? Role::kAssistant : Role::kSystem;
  for (const auto& example : fewshot) {
    t.messages.push_back({Role::kUser, render_prefix(example, options.header_line)});
    if (example.target_row.empty()) {
      throw Error(ErrorCode::kEmptyPrefix, "few-shot example has an empty answer row");
    }
    t.messages.push_back({answer_role, example.target_row});
  }
  t.messages.push_back({Role::kUser, render_prefix(test, options.header_line)});
  return t;
}

PromptTranscript transcript_for(const sampling::TrialPlan& plan, const sampling::Trial& trial,
                                const TranscriptOptions& options) {
  return assemble_transcript(trial.test, trial.fewshot, options, trial.trial_id, plan.file_ref);
}

std::vector<std::string> test_prefix_rows(const PromptTranscript& transcript,
                                          const std::optional<std::string>& header_line) {
  if (transcript.messages.empty() || transcript.messages.back().role != Role::kUser) {
    throw Error(ErrorCode::kEmptyPrefix, "transcript does not end with a user message");
  }
  const auto& content = transcript.messages.back().content;
  std::vector<std::string> rows = text::split(content, '\n');
  if (header_line && !rows.empty() && rows.front() == *header_line) rows.erase(rows.begin());
  if (rows.empty()) throw Error(ErrorCode::kEmptyPrefix, "final user message is empty");
  return rows;
}

}  // namespace tabaudit::prompt
