#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "gcm/error.hpp"

namespace gcm {

/// A 2D grayscale raster, the unit of evaluation. Pixels are stored row-major.
/// Normalized images keep every intensity in [0,1]; raw grids (e.g. a slice
/// fresh out of a volume) may exceed that range until normalize_intensity().
struct ImageGrid {
    int height = 0;
    int width = 0;
    std::vector<double> pixels;

    ImageGrid() = default;
    ImageGrid(int h, int w, double fill = 0.0)
        : height(h), width(w), pixels(static_cast<std::size_t>(h) * static_cast<std::size_t>(w), fill) {}

    double& at(int r, int c) { return pixels[static_cast<std::size_t>(r) * width + c]; }
    double at(int r, int c) const { return pixels[static_cast<std::size_t>(r) * width + c]; }

    bool same_shape(const ImageGrid& other) const {
        return height == other.height && width == other.width;
    }

    /// Checks the structural invariants: consistent storage size, height >= 2
    /// (splittable into halves), width >= 1, finite pixels. Raw grids that are
    /// not evaluation units (e.g. a single-row slice) may pass min_height = 1.
    void require_valid(int min_height = 2) const;

    /// Additionally checks all intensities are in [0,1].
    void require_unit_range() const;
};

enum class Attribute { age, bmi, body_fat_pct };
enum class Side { superior, inferior };
enum class Split { train, val, test };

inline constexpr Attribute kAllAttributes[] = {Attribute::age, Attribute::bmi, Attribute::body_fat_pct};
inline constexpr Side kAllSides[] = {Side::superior, Side::inferior};

const char* to_string(Attribute a);
const char* to_string(Side s);
const char* to_string(Split s);
Attribute attribute_from_string(const std::string& s);
Side side_from_string(const std::string& s);
Split split_from_string(const std::string& s);

/// Per-subject ground-truth attributes. Units: years, kg/m^2, percent.
struct AttributeVector {
    double age = 0.0;
    double bmi = 0.0;
    double body_fat_pct = 0.0;

    double get(Attribute a) const {
        switch (a) {
            case Attribute::age: return age;
            case Attribute::bmi: return bmi;
            case Attribute::body_fat_pct: return body_fat_pct;
        }
        return 0.0;
    }

    void set(Attribute a, double v) {
        switch (a) {
            case Attribute::age: age = v; break;
            case Attribute::bmi: bmi = v; break;
            case Attribute::body_fat_pct: body_fat_pct = v; break;
        }
    }

    bool finite() const {
        return std::isfinite(age) && std::isfinite(bmi) && std::isfinite(body_fat_pct);
    }
};

/// Embedding produced by an encoder; length is fixed per trained model.
using FeatureVector = std::vector<double>;

/// One subject: image, ground truth and split assignment.
struct SubjectRecord {
    std::string id;
    ImageGrid image;
    AttributeVector attributes;
    Split split = Split::train;
};

}  // namespace gcm
