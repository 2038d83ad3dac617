#include "report.hpp"

#include "iacvlab/csv.hpp"

#include <algorithm>

namespace iacvlab::report {

void render_table(std::ostream& out, const std::string& title,
                  const std::vector<Metric>& metrics, const RunManifest& manifest) {
    out << title << '\n' << std::string(title.size(), '=') << '\n';
    std::size_t width = 0;
    for (const Metric& metric : metrics) {
        width = std::max(width, metric.name.size());
    }
    for (const Metric& metric : metrics) {
        out << metric.name << std::string(width - metric.name.size() + 2, ' ')
            << csv::format_number(metric.value) << '\n';
    }
    for (const std::string& line : manifest.comment_lines()) {
        out << line << '\n';
    }
}

void render_csv(std::ostream& out, const std::vector<Metric>& metrics,
                const RunManifest& manifest) {
    for (const std::string& line : manifest.comment_lines()) {
        out << line << '\n';
    }
    out << "metric,value\n";
    for (const Metric& metric : metrics) {
        out << metric.name << ',' << csv::format_number(metric.value) << '\n';
    }
}

} // namespace iacvlab::report
