#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace repurpose::analytics {

/// Prompt categories by resemblance to the haptic prop: A resembles it in
/// shape and size, B does not, C spans a broad range of shapes.
enum class Group { A, B, C };

std::string_view to_string(Group g) noexcept;
std::optional<Group> parse_group(std::string_view s) noexcept;

struct PromptRecord {
    std::string participant;
    int attempt = 1;
    std::string prompt;
    int rating = 0;               ///< seven-point scale, 1..7
    std::optional<Group> group;   ///< unlabeled records only count toward "all"
};

/// CSV with header participant,attempt,prompt,rating,group. Double-quoted
/// fields may contain commas and "" escapes. Throws ParseError naming the line.
std::vector<PromptRecord> parse_records_csv(std::string_view text);
std::vector<PromptRecord> load_records(const std::filesystem::path& path);
std::string records_to_csv(std::span<const PromptRecord> records);

/// The 27 recorded usability-study prompts (9 participants x 3 attempts).
std::string_view study_fixture_csv() noexcept;
std::vector<PromptRecord> study_fixture();

} // namespace repurpose::analytics
