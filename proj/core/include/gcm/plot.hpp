#pragma once

#include <filesystem>

#include "gcm/report.hpp"

namespace gcm {

/// Per-attribute box plots (consistent vs inconsistent) plus the composite
/// panel, drawn onto a grayscale raster.
ImageGrid render_attribute_boxplots(const MetricReport& report);

/// Implicit similarity (x) against explicit composite (y) for every evaluated
/// image; consistent points hollow, inconsistent points filled.
ImageGrid render_similarity_scatter(const MetricReport& report);

/// Renders both figures as 8-bit PGM files next to a report.
void render_report_plots(const MetricReport& report, const std::filesystem::path& boxplot_path,
                         const std::filesystem::path& scatter_path);

}  // namespace gcm
