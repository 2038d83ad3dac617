#pragma once

#include "iacvlab/manifest.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace iacvlab::report {

struct Metric {
    std::string name;
    double value = 0.0;
};

/// Two-column aligned table with the manifest as trailing comment lines.
/// Numbers render in shortest round-trip form so output is byte-stable.
void render_table(std::ostream& out, const std::string& title,
                  const std::vector<Metric>& metrics, const RunManifest& manifest);

/// metric,value CSV with the manifest embedded as leading comment lines.
void render_csv(std::ostream& out, const std::vector<Metric>& metrics,
                const RunManifest& manifest);

} // namespace iacvlab::report
