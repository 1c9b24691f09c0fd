#pragma once

#include "canonical_json.hpp"
#include "tabaudit/report.hpp"

namespace tabaudit::detail {

Json audit_config_to_json(const sampling::AuditConfig& c);
sampling::AuditConfig audit_config_from_json(const Json& j);

Json window_to_json(const sampling::WindowSample& w);
sampling::WindowSample window_from_json(const Json& j);

Json plan_to_json(const sampling::TrialPlan& plan);
sampling::TrialPlan plan_from_json(const Json& j);

Json transcript_to_json(const prompt::PromptTranscript& t);
prompt::PromptTranscript transcript_from_json(const Json& j);

Json trial_to_json(const report::ReportTrial& t);
report::ReportTrial trial_from_json(const Json& j);

Json report_to_json(const report::AuditReport& r);
report::AuditReport report_from_json_value(const Json& j);

}  // namespace tabaudit::detail
