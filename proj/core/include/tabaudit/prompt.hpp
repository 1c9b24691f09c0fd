#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tabaudit/sampler.hpp"

namespace tabaudit::prompt {

enum class Role { kSystem, kUser, kAssistant };

std::string_view to_string(Role role) noexcept;
Role parse_role(std::string_view name);

// How few-shot answers are attributed. kUserAssistant is the usual chat-API
// demonstration form; kUserSystem sends the answers as system turns.
enum class RoleMap { kUserAssistant, kUserSystem };

std::string_view to_string(RoleMap map) noexcept;
RoleMap parse_role_map(std::string_view name);

struct ChatMessage {
  Role role = Role::kUser;
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

struct PromptTranscript {
  std::vector<ChatMessage> messages;
  std::size_t trial_id = 0;
  std::string file_ref;

  bool operator==(const PromptTranscript&) const = default;
};

struct TranscriptOptions {
  RoleMap role_map = RoleMap::kUserAssistant;
  // When set, prepended as the first line of every user message.
  std::optional<std::string> header_line;
};

// The fixed instruction that opens every transcript.
std::string_view system_message() noexcept;

// system, then (user prefix, answer) per example, then the test prefix as the
// final user message. Rows are joined with '\n' without a trailing newline.
// The test target row is never inserted.
PromptTranscript assemble_transcript(const sampling::WindowSample& test,
                                     std::span<const sampling::WindowSample> fewshot,
                                     const TranscriptOptions& options = {},
                                     std::size_t trial_id = 0, std::string file_ref = {});

PromptTranscript transcript_for(const sampling::TrialPlan& plan, const sampling::Trial& trial,
                                const TranscriptOptions& options = {});

// Rows of the final user message (header line excluded when it was injected).
std::vector<std::string> test_prefix_rows(const PromptTranscript& transcript,
                                          const std::optional<std::string>& header_line = {});

}  // namespace tabaudit::prompt
