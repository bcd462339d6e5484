#include "gcm/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "gcm/imgops.hpp"
#include "gcm/stats.hpp"

namespace gcm {

void RefereeSet::insert(RefereeModel model) {
    models_[{model.attribute, model.side}] = std::move(model);
}

const RefereeModel& RefereeSet::get(Attribute attribute, Side side) const {
    const auto it = models_.find({attribute, side});
    if (it == models_.end()) {
        throw config_error(std::string("missing referee for (") + to_string(attribute) + ", " +
                           to_string(side) + ")");
    }
    return it->second;
}

bool RefereeSet::complete() const { return missing().empty(); }

std::vector<std::string> RefereeSet::missing() const {
    std::vector<std::string> out;
    for (Attribute a : kAllAttributes) {
        for (Side s : kAllSides) {
            if (!models_.contains({a, s})) {
                out.push_back(referee_dir_name(a, s));
            }
        }
    }
    return out;
}

RefereeSet RefereeSet::load(const std::filesystem::path& models_root) {
    RefereeSet set;
    std::vector<std::string> absent;
    for (Attribute a : kAllAttributes) {
        for (Side s : kAllSides) {
            const auto dir = models_root / referee_dir_name(a, s);
            if (std::filesystem::exists(dir / "metadata.txt")) {
                set.insert(load_referee(dir));
            } else {
                absent.push_back(referee_dir_name(a, s));
            }
        }
    }
    if (!absent.empty()) {
        std::string msg = "missing referee models under " + models_root.string() + ":";
        for (const auto& name : absent) msg += " " + name;
        throw config_error(msg);
    }
    return set;
}

std::map<Attribute, double> explicit_error(const RefereeSet& referees, const ImageGrid& image) {
    image.require_valid();
    const ImageGrid superior = superior_half(image);
    const ImageGrid inferior = inferior_half(image);
    std::map<Attribute, double> errors;
    for (Attribute a : kAllAttributes) {
        const double sup = predict_attribute(referees.get(a, Side::superior), superior);
        const double inf = predict_attribute(referees.get(a, Side::inferior), inferior);
        errors[a] = std::abs(sup - inf);
    }
    return errors;
}

std::pair<std::vector<double>, NormalizationConstants> explicit_composite(
    std::span<const std::map<Attribute, double>> per_image_errors,
    const std::optional<NormalizationConstants>& normalization) {
    if (per_image_errors.empty()) {
        throw invalid_input_error("explicit_composite: empty error pool");
    }
    for (const auto& m : per_image_errors) {
        for (Attribute a : kAllAttributes) {
            if (!m.contains(a)) {
                throw invalid_input_error(std::string("explicit_composite: missing attribute ") +
                                          to_string(a) + " in error map");
            }
        }
    }

    NormalizationConstants constants;
    std::map<Attribute, std::vector<double>> normalized;
    for (Attribute a : kAllAttributes) {
        std::vector<double> raw;
        raw.reserve(per_image_errors.size());
        for (const auto& m : per_image_errors) raw.push_back(m.at(a));

        if (normalization) {
            const auto it = normalization->minmax.find(a);
            if (it == normalization->minmax.end()) {
                throw invalid_input_error(std::string("explicit_composite: provided constants lack ") +
                                          to_string(a));
            }
            const auto [mn, mx] = it->second;
            constants.minmax[a] = {mn, mx};
            std::vector<double> vals(raw.size(), 0.0);
            if (mx > mn) {
                for (std::size_t i = 0; i < raw.size(); ++i) {
                    vals[i] = std::clamp((raw[i] - mn) / (mx - mn), 0.0, 1.0);
                }
            }
            normalized[a] = std::move(vals);
        } else {
            const auto [mn_it, mx_it] = std::minmax_element(raw.begin(), raw.end());
            constants.minmax[a] = {*mn_it, *mx_it};
            normalized[a] = minmax_normalize(raw);
        }
    }

    std::vector<double> composites(per_image_errors.size(), 0.0);
    for (std::size_t i = 0; i < composites.size(); ++i) {
        double sum = 0.0;
        for (Attribute a : kAllAttributes) sum += normalized[a][i];
        composites[i] = sum / 3.0;
    }
    return {std::move(composites), std::move(constants)};
}

double implicit_consistency(const EncoderModel& encoder, const ImageGrid& image) {
    image.require_valid();
    const FeatureVector sup = embed(encoder, superior_half(image));
    const FeatureVector inf = embed(encoder, inferior_half(image));
    return cosine_similarity(sup, inf);
}

FeatureExtractor encoder_extractor(const EncoderModel& encoder) {
    FeatureExtractor extractor;
    extractor.name = std::string("contrastive-encoder:") +
                     (encoder.embed_from_projection ? "projection" : "backbone") + ":" +
                     encoder.training_config_digest;
    extractor.extract = [&encoder](const ImageGrid& img) { return embed(encoder, img); };
    return extractor;
}

AggregateStats aggregate(std::span<const double> values) {
    AggregateStats stats;
    stats.count = static_cast<int>(values.size());
    if (values.empty()) return stats;
    stats.mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - stats.mean) * (v - stats.mean);
        stats.stddev = std::sqrt(ss / (values.size() - 1));
    }
    return stats;
}

namespace {

SetAggregates aggregate_set(std::span<const PerImageMetrics> rows) {
    SetAggregates agg;
    std::vector<double> composites, similarities;
    std::map<Attribute, std::vector<double>> attr_errors;
    for (const auto& row : rows) {
        composites.push_back(row.explicit_composite);
        similarities.push_back(row.implicit_similarity);
        for (const auto& [a, e] : row.attribute_errors) attr_errors[a].push_back(e);
    }
    agg.explicit_composite = aggregate(composites);
    agg.implicit_similarity = aggregate(similarities);
    for (Attribute a : kAllAttributes) agg.attribute_errors[a] = aggregate(attr_errors[a]);
    return agg;
}

}  // namespace

MetricReport evaluate_dataset(const EvalSets& sets, const RefereeSet& referees,
                              const EncoderModel& encoder) {
    if (sets.consistent.empty() || sets.inconsistent.empty()) {
        throw invalid_input_error("evaluate_dataset: consistent and inconsistent sets must be non-empty");
    }
    if (!referees.complete()) {
        std::string msg = "evaluate_dataset: referee set incomplete:";
        for (const auto& name : referees.missing()) msg += " " + name;
        throw config_error(msg);
    }

    MetricReport report;
    report.band_fraction = sets.band_fraction;

    // Per-image passes, consistent rows first for a deterministic layout.
    std::vector<std::map<Attribute, double>> union_errors;
    auto run_set = [&](std::span<const EvalItem> items, const char* role) {
        for (const auto& item : items) {
            PerImageMetrics row;
            row.id = item.id;
            row.role = role;
            row.attribute_errors = explicit_error(referees, item.image);
            row.implicit_similarity = implicit_consistency(encoder, item.image);
            union_errors.push_back(row.attribute_errors);
            report.per_image.push_back(std::move(row));
        }
    };
    run_set(sets.consistent, "consistent");
    run_set(sets.inconsistent, "inconsistent");

    // Composites are normalized over the union of both sets; the constants go
    // into the report so later runs can reuse them.
    auto [composites, constants] = explicit_composite(union_errors);
    report.normalization_constants = std::move(constants);
    for (std::size_t i = 0; i < composites.size(); ++i) {
        report.per_image[i].explicit_composite = composites[i];
    }

    const std::size_t n_consistent = sets.consistent.size();
    report.consistent = aggregate_set(std::span(report.per_image).first(n_consistent));
    report.inconsistent = aggregate_set(std::span(report.per_image).subspan(n_consistent));

    // FID needs a reference pool of at least 2 images.
    if (sets.reference.size() >= 2) {
        const FeatureExtractor extractor = encoder_extractor(encoder);
        report.fid_extractor = extractor.name;
        auto images_of = [](std::span<const EvalItem> items) {
            std::vector<ImageGrid> images;
            images.reserve(items.size());
            for (const auto& item : items) images.push_back(item.image);
            return images;
        };
        const auto ref = images_of(sets.reference);
        report.fid_consistent = fid(ref, images_of(sets.consistent), extractor);
        report.fid_inconsistent = fid(ref, images_of(sets.inconsistent), extractor);
    }

    // Implicit similarity vs explicit composite over the union pool.
    std::vector<double> implicit_vals, composite_vals;
    for (const auto& row : report.per_image) {
        implicit_vals.push_back(row.implicit_similarity);
        composite_vals.push_back(row.explicit_composite);
    }
    try {
        report.implicit_explicit_correlation = pearson_correlation(implicit_vals, composite_vals);
    } catch (const invalid_input_error&) {
        report.implicit_explicit_correlation = std::nullopt;  // degenerate pool
    }
    return report;
}

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json stats_to_json(const AggregateStats& s) {
    return ordered_json{{"mean", s.mean}, {"stddev", s.stddev}, {"count", s.count}};
}

AggregateStats stats_from_json(const ordered_json& j) {
    AggregateStats s;
    s.mean = j.at("mean").get<double>();
    s.stddev = j.at("stddev").get<double>();
    s.count = j.at("count").get<int>();
    return s;
}

ordered_json set_to_json(const SetAggregates& agg) {
    ordered_json attrs;
    for (const auto& [a, s] : agg.attribute_errors) attrs[to_string(a)] = stats_to_json(s);
    return ordered_json{{"explicit_composite", stats_to_json(agg.explicit_composite)},
                        {"implicit_similarity", stats_to_json(agg.implicit_similarity)},
                        {"attribute_errors", attrs}};
}

SetAggregates set_from_json(const ordered_json& j) {
    SetAggregates agg;
    agg.explicit_composite = stats_from_json(j.at("explicit_composite"));
    agg.implicit_similarity = stats_from_json(j.at("implicit_similarity"));
    for (Attribute a : kAllAttributes) {
        agg.attribute_errors[a] = stats_from_json(j.at("attribute_errors").at(to_string(a)));
    }
    return agg;
}

}  // namespace

void write_report(const MetricReport& report, const std::filesystem::path& path) {
    ordered_json j;
    j["config_digest"] = report.config_digest;
    j["band_fraction"] = report.band_fraction;

    ordered_json fid;
    fid["extractor"] = report.fid_extractor;
    fid["consistent"] = report.fid_consistent ? ordered_json(*report.fid_consistent) : ordered_json();
    fid["inconsistent"] =
        report.fid_inconsistent ? ordered_json(*report.fid_inconsistent) : ordered_json();
    j["fid"] = fid;

    ordered_json norm;
    for (const auto& [a, mm] : report.normalization_constants.minmax) {
        norm[to_string(a)] = ordered_json{{"min", mm.first}, {"max", mm.second}};
    }
    j["normalization_constants"] = norm;
    j["implicit_explicit_correlation"] = report.implicit_explicit_correlation
                                             ? ordered_json(*report.implicit_explicit_correlation)
                                             : ordered_json();
    j["aggregates"] =
        ordered_json{{"consistent", set_to_json(report.consistent)},
                     {"inconsistent", set_to_json(report.inconsistent)}};

    ordered_json rows = ordered_json::array();
    for (const auto& row : report.per_image) {
        ordered_json attrs;
        for (const auto& [a, e] : row.attribute_errors) attrs[to_string(a)] = e;
        rows.push_back(ordered_json{{"id", row.id},
                                    {"role", row.role},
                                    {"attribute_errors", attrs},
                                    {"explicit_composite", row.explicit_composite},
                                    {"implicit_similarity", row.implicit_similarity}});
    }
    j["per_image"] = rows;

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open for writing: " + path.string());
    out << j.dump(2) << "\n";
    if (!out) throw io_error("write failed: " + path.string());
}

MetricReport read_report(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open: " + path.string());
    ordered_json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw io_error("malformed report " + path.string() + ": " + e.what());
    }

    MetricReport report;
    report.config_digest = j.at("config_digest").get<std::string>();
    report.band_fraction = j.at("band_fraction").get<double>();
    const auto& fid = j.at("fid");
    report.fid_extractor = fid.at("extractor").get<std::string>();
    if (!fid.at("consistent").is_null()) report.fid_consistent = fid.at("consistent").get<double>();
    if (!fid.at("inconsistent").is_null()) {
        report.fid_inconsistent = fid.at("inconsistent").get<double>();
    }
    for (Attribute a : kAllAttributes) {
        const auto& mm = j.at("normalization_constants").at(to_string(a));
        report.normalization_constants.minmax[a] = {mm.at("min").get<double>(),
                                                    mm.at("max").get<double>()};
    }
    if (!j.at("implicit_explicit_correlation").is_null()) {
        report.implicit_explicit_correlation = j.at("implicit_explicit_correlation").get<double>();
    }
    report.consistent = set_from_json(j.at("aggregates").at("consistent"));
    report.inconsistent = set_from_json(j.at("aggregates").at("inconsistent"));
    for (const auto& row_json : j.at("per_image")) {
        PerImageMetrics row;
        row.id = row_json.at("id").get<std::string>();
        row.role = row_json.at("role").get<std::string>();
        for (Attribute a : kAllAttributes) {
            row.attribute_errors[a] = row_json.at("attribute_errors").at(to_string(a)).get<double>();
        }
        row.explicit_composite = row_json.at("explicit_composite").get<double>();
        row.implicit_similarity = row_json.at("implicit_similarity").get<double>();
        report.per_image.push_back(std::move(row));
    }
    return report;
}

std::string format_summary_table(const MetricReport& report) {
    std::ostringstream ss;
    ss.setf(std::ios::fixed);
    auto fid_str = [](const std::optional<double>& v) {
        if (!v) return std::string("   n/a");
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%6.3f", *v);
        return std::string(buf);
    };
    auto ms = [](const AggregateStats& s) {
        char buf[48];
        std::snprintf(buf, sizeof(buf), "%.3f +/- %.3f", s.mean, s.stddev);
        return std::string(buf);
    };
    ss << "dataset       FID     explicit (v)        implicit (^)\n";
    ss << "consistent    " << fid_str(report.fid_consistent) << "  " << ms(report.consistent.explicit_composite)
       << "   " << ms(report.consistent.implicit_similarity) << "\n";
    ss << "inconsistent  " << fid_str(report.fid_inconsistent) << "  "
       << ms(report.inconsistent.explicit_composite) << "   "
       << ms(report.inconsistent.implicit_similarity) << "\n";
    if (report.implicit_explicit_correlation) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "implicit/explicit correlation r = %.3f\n",
                      *report.implicit_explicit_correlation);
        ss << buf;
    }
    return ss.str();
}

}  // namespace gcm
