#include "repurpose/analytics/records.hpp"

#include "repurpose/error.hpp"

#include <charconv>
#include <fstream>
#include <iterator>

namespace repurpose::analytics {

std::string_view to_string(Group g) noexcept
{
    switch (g) {
    case Group::A: return "A";
    case Group::B: return "B";
    case Group::C: return "C";
    }
    return "?";
}

std::optional<Group> parse_group(std::string_view s) noexcept
{
    if (s == "A")
        return Group::A;
    if (s == "B")
        return Group::B;
    if (s == "C")
        return Group::C;
    return std::nullopt;
}

namespace {

[[noreturn]] void parse_error(std::size_t line, const std::string& what)
{
    throw Error(ErrorKind::ParseError, "line " + std::to_string(line) + ": " + what);
}

std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no)
{
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else {
            fields.back() += c;
        }
    }
    if (quoted)
        parse_error(line_no, "unterminated quoted field");
    return fields;
}

int parse_int(const std::string& s, std::size_t line, const char* field)
{
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        parse_error(line, std::string(field) + " '" + s + "' is not an integer");
    return v;
}

std::string quote(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

} // namespace

std::vector<PromptRecord> parse_records_csv(std::string_view text)
{
    std::vector<PromptRecord> out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool header_seen = false;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (line.empty())
            continue;

        const auto f = split_csv_line(line, line_no);
        if (!header_seen) {
            if (f != std::vector<std::string>{"participant", "attempt", "prompt", "rating", "group"})
                parse_error(line_no, "expected header participant,attempt,prompt,rating,group");
            header_seen = true;
            continue;
        }
        if (f.size() != 5)
            parse_error(line_no, "expected 5 fields, got " + std::to_string(f.size()));

        PromptRecord r;
        r.participant = f[0];
        if (r.participant.empty())
            parse_error(line_no, "participant is empty");
        r.attempt = parse_int(f[1], line_no, "attempt");
        if (r.attempt < 1 || r.attempt > 3)
            parse_error(line_no, "attempt must be 1..3");
        r.prompt = f[2];
        r.rating = parse_int(f[3], line_no, "rating");
        if (r.rating < 1 || r.rating > 7)
            parse_error(line_no, "rating must be 1..7");
        r.group = parse_group(f[4]);
        if (!r.group)
            parse_error(line_no, "group must be A, B or C, got '" + f[4] + "'");
        out.push_back(std::move(r));
    }
    if (!header_seen)
        parse_error(line_no, "missing header");
    return out;
}

std::vector<PromptRecord> load_records(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::NotFound, "cannot open " + path.string());
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return parse_records_csv(text);
}

std::string records_to_csv(std::span<const PromptRecord> records)
{
    std::string out = "participant,attempt,prompt,rating,group\n";
    for (const auto& r : records) {
        out += quote(r.participant) + "," + std::to_string(r.attempt) + "," + quote(r.prompt) + "," +
               std::to_string(r.rating) + "," + (r.group ? std::string(to_string(*r.group)) : "") + "\n";
    }
    return out;
}

std::vector<PromptRecord> study_fixture()
{
    return parse_records_csv(study_fixture_csv());
}

} // namespace repurpose::analytics
