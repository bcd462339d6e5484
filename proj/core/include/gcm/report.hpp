#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gcm/encoder.hpp"
#include "gcm/frechet.hpp"
#include "gcm/referee.hpp"
#include "gcm/types.hpp"
#include "gcm/views.hpp"

namespace gcm {

/// The six referees keyed by (attribute, side). Every lookup verifies side
/// discipline: a missing pair is a configuration error naming the gap.
class RefereeSet {
public:
    void insert(RefereeModel model);
    const RefereeModel& get(Attribute attribute, Side side) const;
    bool complete() const;
    /// Names the missing (attribute, side) pairs, empty when complete.
    std::vector<std::string> missing() const;
    std::size_t size() const { return models_.size(); }

    /// Loads the six conventionally named referee directories under root.
    static RefereeSet load(const std::filesystem::path& models_root);

private:
    std::map<std::pair<Attribute, Side>, RefereeModel> models_;
};

/// Per-attribute |superior prediction - inferior prediction| for one image
/// (already band-removed under the evaluation protocol).
std::map<Attribute, double> explicit_error(const RefereeSet& referees, const ImageGrid& image);

/// (min, max) per attribute used to scale raw errors into [0,1].
struct NormalizationConstants {
    std::map<Attribute, std::pair<double, double>> minmax;
};

/// Min-max normalizes each attribute's errors across the pool (or applies the
/// provided constants, clamping to [0,1]) and averages the three normalized
/// errors per image. Returns the composites and the constants used.
std::pair<std::vector<double>, NormalizationConstants> explicit_composite(
    std::span<const std::map<Attribute, double>> per_image_errors,
    const std::optional<NormalizationConstants>& normalization = std::nullopt);

/// Cosine similarity between the embeddings of the superior and inferior
/// views, in [-1, 1].
double implicit_consistency(const EncoderModel& encoder, const ImageGrid& image);

/// Wraps a trained encoder as the FID feature extractor.
FeatureExtractor encoder_extractor(const EncoderModel& encoder);

struct PerImageMetrics {
    std::string id;
    std::string role;  // "consistent" | "inconsistent"
    std::map<Attribute, double> attribute_errors;
    double explicit_composite = 0.0;
    double implicit_similarity = 0.0;
};

struct AggregateStats {
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation
    int count = 0;
};

AggregateStats aggregate(std::span<const double> values);

struct SetAggregates {
    AggregateStats explicit_composite;
    AggregateStats implicit_similarity;
    std::map<Attribute, AggregateStats> attribute_errors;
};

struct MetricReport {
    std::string config_digest;
    double band_fraction = 0.10;
    std::vector<PerImageMetrics> per_image;  // consistent rows first, then inconsistent
    SetAggregates consistent;
    SetAggregates inconsistent;
    NormalizationConstants normalization_constants;
    std::string fid_extractor;
    std::optional<double> fid_consistent;
    std::optional<double> fid_inconsistent;
    /// Pearson r between implicit similarity and explicit composite over the
    /// union pool; absent when the correlation is undefined (zero variance).
    std::optional<double> implicit_explicit_correlation;
};

/// Runs the full per-image metric suite over the evaluation sets: explicit
/// errors and implicit similarities for the consistent and inconsistent sets,
/// composites normalized over the union of both (constants recorded),
/// aggregates, both FIDs against the reference set, and the implicit-explicit
/// correlation.
MetricReport evaluate_dataset(const EvalSets& sets, const RefereeSet& referees,
                              const EncoderModel& encoder);

/// Structured-text (JSON) round trip for reports.
void write_report(const MetricReport& report, const std::filesystem::path& path);
MetricReport read_report(const std::filesystem::path& path);

/// The stdout summary: FID / explicit / implicit for consistent vs
/// inconsistent, one row per set.
std::string format_summary_table(const MetricReport& report);

}  // namespace gcm
