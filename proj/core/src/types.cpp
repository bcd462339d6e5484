#include "gcm/types.hpp"

#include <cmath>

namespace gcm {

void ImageGrid::require_valid(int min_height) const {
    if (height < min_height || width < 1) {
        throw invalid_input_error("ImageGrid: height must be >= " + std::to_string(min_height) +
                                  " and width >= 1, got " + std::to_string(height) + "x" +
                                  std::to_string(width));
    }
    if (pixels.size() != static_cast<std::size_t>(height) * static_cast<std::size_t>(width)) {
        throw invalid_input_error("ImageGrid: pixel storage does not match dimensions");
    }
    for (double v : pixels) {
        if (!std::isfinite(v)) throw invalid_input_error("ImageGrid: non-finite intensity");
    }
}

void ImageGrid::require_unit_range() const {
    require_valid();
    for (double v : pixels) {
        if (v < 0.0 || v > 1.0) {
            throw invalid_input_error("ImageGrid: intensity " + std::to_string(v) + " outside [0,1]");
        }
    }
}

const char* to_string(Attribute a) {
    switch (a) {
        case Attribute::age: return "age";
        case Attribute::bmi: return "bmi";
        case Attribute::body_fat_pct: return "body_fat_pct";
    }
    return "?";
}

const char* to_string(Side s) {
    return s == Side::superior ? "superior" : "inferior";
}

const char* to_string(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::val: return "val";
        case Split::test: return "test";
    }
    return "?";
}

Attribute attribute_from_string(const std::string& s) {
    if (s == "age") return Attribute::age;
    if (s == "bmi") return Attribute::bmi;
    if (s == "body_fat_pct") return Attribute::body_fat_pct;
    throw invalid_input_error("unknown attribute '" + s + "' (expected age|bmi|body_fat_pct)");
}

Side side_from_string(const std::string& s) {
    if (s == "superior") return Side::superior;
    if (s == "inferior") return Side::inferior;
    throw invalid_input_error("unknown side '" + s + "' (expected superior|inferior)");
}

Split split_from_string(const std::string& s) {
    if (s == "train") return Split::train;
    if (s == "val") return Split::val;
    if (s == "test") return Split::test;
    throw invalid_input_error("unknown split '" + s + "' (expected train|val|test)");
}

}  // namespace gcm
