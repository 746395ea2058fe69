#pragma once

#include "repurpose/analytics/records.hpp"

namespace repurpose::analytics {

enum class StdDevConvention { Population, Sample };

struct LikertSummary {
    std::size_t n = 0;
    double mean = 0;
    double stddev = 0;
};

/// Mean and standard deviation of the ratings in `group` (nullopt = all).
/// Throws EmptySelection when nothing matches.
LikertSummary summarize(std::span<const PromptRecord> records, std::optional<Group> group,
                        StdDevConvention convention = StdDevConvention::Population);

struct GroupRow {
    std::string label; ///< "A", "B", "C" or "all"
    LikertSummary summary;
};

/// One row per non-empty group, then the overall row.
std::vector<GroupRow> report(std::span<const PromptRecord> records,
                             StdDevConvention convention = StdDevConvention::Population);
std::string report_text(const std::vector<GroupRow>& rows);
std::string report_json(const std::vector<GroupRow>& rows);

/// Questionnaire aggregates as published; the per-participant answers were
/// never released, so these are reference values only.
struct QuestionnaireItem {
    std::string_view id;
    std::string_view topic;
    double mean;
    double stddev;
};
std::span<const QuestionnaireItem> reported_questionnaire() noexcept;

} // namespace repurpose::analytics
