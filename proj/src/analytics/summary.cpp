#include "repurpose/analytics/summary.hpp"

#include "repurpose/error.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cmath>
#include <cstdio>

namespace repurpose::analytics {

LikertSummary summarize(std::span<const PromptRecord> records, std::optional<Group> group,
                        StdDevConvention convention)
{
    std::size_t n = 0;
    double sum = 0;
    for (const auto& r : records) {
        if (group && r.group != group)
            continue;
        ++n;
        sum += r.rating;
    }
    if (n == 0)
        throw Error(ErrorKind::EmptySelection,
                    std::string("no records for group ") + (group ? std::string(to_string(*group)) : "all"));

    const double mean = sum / double(n);
    double ss = 0;
    for (const auto& r : records) {
        if (group && r.group != group)
            continue;
        ss += (r.rating - mean) * (r.rating - mean);
    }
    const double divisor = convention == StdDevConvention::Population ? double(n) : double(n) - 1.0;
    const double stddev = divisor > 0 ? std::sqrt(ss / divisor) : 0.0;
    return {n, mean, stddev};
}

std::vector<GroupRow> report(std::span<const PromptRecord> records, StdDevConvention convention)
{
    if (records.empty())
        throw Error(ErrorKind::EmptySelection, "no records");
    std::vector<GroupRow> rows;
    for (Group g : {Group::A, Group::B, Group::C}) {
        try {
            rows.push_back({std::string(to_string(g)), summarize(records, g, convention)});
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::EmptySelection)
                throw;
        }
    }
    rows.push_back({"all", summarize(records, std::nullopt, convention)});
    return rows;
}

std::string report_text(const std::vector<GroupRow>& rows)
{
    std::string out = "group      n    mean  stddev\n";
    char buf[96];
    for (const auto& r : rows) {
        const int n = std::snprintf(buf, sizeof buf, "%-6s %5zu  %6.3f  %6.3f\n", r.label.c_str(), r.summary.n,
                                    r.summary.mean, r.summary.stddev);
        out.append(buf, static_cast<std::size_t>(n));
    }
    return out;
}

std::string report_json(const std::vector<GroupRow>& rows)
{
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : rows)
        j.push_back({{"group", r.label}, {"n", r.summary.n}, {"mean", r.summary.mean}, {"stddev", r.summary.stddev}});
    return j.dump(2);
}

std::span<const QuestionnaireItem> reported_questionnaire() noexcept
{
    static constexpr std::array<QuestionnaireItem, 4> kItems{{
        {"Q1", "result met expectations", 4.8, 0.97},
        {"Q2", "perceived realism", 5.2, 1.48},
        {"Q3", "engagement", 6.4, 0.52},
        {"Q4", "interest in personal use", 6.1, 0.78},
    }};
    return kItems;
}

} // namespace repurpose::analytics
