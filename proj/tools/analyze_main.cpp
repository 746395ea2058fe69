// analyze: per-group rating statistics for prompt records.

#include "repurpose/analytics/summary.hpp"
#include "repurpose/error.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace repurpose;

int main(int argc, char** argv)
{
    CLI::App app{"Rating statistics per prompt group"};
    std::string records_path;
    std::string group = "all";
    bool as_json = false;
    bool sample = false;
    app.add_option("--records", records_path, "records CSV (default: the recorded study prompts)")
        ->check(CLI::ExistingFile);
    app.add_option("--group", group, "A, B, C, all, or report for every group")
        ->check(CLI::IsMember({"A", "B", "C", "all", "report"}));
    app.add_flag("--json", as_json, "print JSON");
    app.add_flag("--sample", sample, "sample standard deviation instead of population");
    CLI11_PARSE(app, argc, argv);

    try {
        const auto records = records_path.empty() ? analytics::study_fixture() : analytics::load_records(records_path);
        const auto conv = sample ? analytics::StdDevConvention::Sample : analytics::StdDevConvention::Population;
        if (group == "report") {
            const auto rows = analytics::report(records, conv);
            std::cout << (as_json ? analytics::report_json(rows) + "\n" : analytics::report_text(rows));
            return 0;
        }
        const auto sel = group == "all" ? std::nullopt : analytics::parse_group(group);
        const auto s = analytics::summarize(records, sel, conv);
        if (as_json) {
            std::printf("{\"group\":\"%s\",\"n\":%zu,\"mean\":%.17g,\"stddev\":%.17g}\n", group.c_str(), s.n, s.mean,
                        s.stddev);
        } else {
            std::printf("group %s: n=%zu mean=%.3f sd=%.3f\n", group.c_str(), s.n, s.mean, s.stddev);
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
