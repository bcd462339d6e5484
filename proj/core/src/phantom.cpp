#include "gcm/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "gcm/rng.hpp"

namespace gcm {
namespace {

int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }

// Golden-ratio dither sequence. Rim widths are rounded to whole pixels per
// row; dithering the rounding makes the row-averaged rim thickness track the
// continuous target with O(1/H) error, so body fat stays recoverable at
// sub-pixel resolution.
double rim_dither(int row) {
    constexpr double inv_phi = 0.6180339887498949;
    double v = (row + 1) * inv_phi;
    return v - std::floor(v);
}

// Fixed anatomical taper: widest at the top and bottom rows, 5% narrower at
// the waist. Symmetric about the row center so both halves see the same
// width statistics.
double taper(int row, int height) {
    const double u = height > 1 ? static_cast<double>(row) / (height - 1) : 0.0;
    const double s = std::sin(std::numbers::pi * u);
    return 1.0 - 0.05 * s * s;
}

void require_in_range(double v, const std::pair<double, double>& range, const char* name) {
    if (!(v >= range.first && v <= range.second)) {
        throw invalid_input_error(std::string("generate_phantom: ") + name + "=" +
                                  std::to_string(v) + " outside configured range [" +
                                  std::to_string(range.first) + ", " + std::to_string(range.second) + "]");
    }
}

}  // namespace

void PhantomConfig::validate() const {
    if (height < 2 || width < 2) throw config_error("PhantomConfig: dimensions too small");
    if (height % 2 != 0 || width % 2 != 0) {
        throw config_error("PhantomConfig: dimensions must be even (halving must be exact), got " +
                           std::to_string(height) + "x" + std::to_string(width));
    }
    auto check = [](const std::pair<double, double>& r, const char* name) {
        if (!(r.second > r.first)) {
            throw config_error(std::string("PhantomConfig: degenerate ") + name + " (max must exceed min)");
        }
    };
    check(age_range, "age_range");
    check(bmi_range, "bmi_range");
    check(body_fat_range, "body_fat_range");
    if (!(noise_level >= 0.0 && noise_level <= 0.1)) {
        throw config_error("PhantomConfig: noise_level must be in [0, 0.1]");
    }
}

std::pair<double, double> PhantomConfig::range(Attribute a) const {
    switch (a) {
        case Attribute::age: return age_range;
        case Attribute::bmi: return bmi_range;
        case Attribute::body_fat_pct: return body_fat_range;
    }
    return {0.0, 0.0};
}

double silhouette_width_fraction(double bmi) { return 0.3 + 0.5 * (bmi - 15.0) / 25.0; }

double rim_thickness_fraction(double body_fat_pct) { return 0.02 + 0.10 * (body_fat_pct - 5.0) / 45.0; }

int stripe_period_pixels(double age) {
    return std::max(2, round_half_up(16.0 - 12.0 * (age - 20.0) / 70.0));
}

ImageGrid generate_phantom(const AttributeVector& attrs, const PhantomConfig& config,
                           std::uint64_t subject_seed) {
    config.validate();
    if (!attrs.finite()) throw invalid_input_error("generate_phantom: non-finite attributes");
    require_in_range(attrs.age, config.age_range, "age");
    require_in_range(attrs.bmi, config.bmi_range, "bmi");
    require_in_range(attrs.body_fat_pct, config.body_fat_range, "body_fat_pct");

    const int H = config.height, W = config.width;
    const double w_frac = silhouette_width_fraction(attrs.bmi);
    const double t_frac = rim_thickness_fraction(attrs.body_fat_pct);
    const int period = stripe_period_pixels(attrs.age);

    ImageGrid img(H, W, 0.0);
    for (int r = 0; r < H; ++r) {
        int wpx = round_half_up(w_frac * taper(r, H) * W);
        wpx = std::clamp(wpx, 1, W);
        const int c0 = (W - wpx) / 2;
        int rim = static_cast<int>(std::floor(t_frac * wpx + rim_dither(r)));
        rim = std::clamp(rim, 0, wpx / 2);
        const double interior =
            0.5 + 0.15 * std::sin(2.0 * std::numbers::pi * static_cast<double>(r) / period);
        for (int c = c0; c < c0 + wpx; ++c) {
            const bool in_rim = (c < c0 + rim) || (c >= c0 + wpx - rim);
            img.at(r, c) = in_rim ? 0.9 : interior;
        }
    }

    if (config.noise_level > 0.0) {
        Rng noise(subject_seed);
        for (double& v : img.pixels) {
            v += noise.uniform(-config.noise_level, config.noise_level);
        }
    }
    for (double& v : img.pixels) v = std::clamp(v, 0.0, 1.0);
    return img;
}

std::vector<SubjectRecord> generate_cohort(int n, const PhantomConfig& config) {
    config.validate();
    if (n < 1) throw invalid_input_error("generate_cohort: n must be >= 1, got " + std::to_string(n));

    Rng rng(config.seed);
    std::vector<SubjectRecord> records;
    records.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        AttributeVector attrs;
        attrs.age = rng.uniform(config.age_range.first, config.age_range.second);
        attrs.bmi = rng.uniform(config.bmi_range.first, config.bmi_range.second);
        attrs.body_fat_pct = rng.uniform(config.body_fat_range.first, config.body_fat_range.second);
        const std::uint64_t subject_seed = rng.next_u64();

        char id[32];
        std::snprintf(id, sizeof(id), "phantom-%04d", i);
        SubjectRecord rec;
        rec.id = id;
        rec.attributes = attrs;
        rec.image = generate_phantom(attrs, config, subject_seed);
        rec.split = Split::train;
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace gcm
