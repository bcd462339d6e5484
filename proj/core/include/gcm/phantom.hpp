#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "gcm/types.hpp"

namespace gcm {

/// Configuration of the deterministic phantom cohort generator. The phantom
/// is a desk-scale stand-in for gated whole-body data: a silhouette whose
/// geometry encodes the three attributes so that each one is recoverable from
/// either body half alone.
struct PhantomConfig {
    int height = 192;  // must be even so halving is exact
    int width = 96;
    std::pair<double, double> age_range{20.0, 90.0};        // years
    std::pair<double, double> bmi_range{15.0, 40.0};        // kg/m^2
    std::pair<double, double> body_fat_range{5.0, 50.0};    // percent
    double noise_level = 0.02;                              // additive uniform, in [0, 0.1]
    std::uint64_t seed = 0;

    void validate() const;
    std::pair<double, double> range(Attribute a) const;
};

/// Attribute -> geometry maps. Exposed so oracles and documentation share one
/// definition with the renderer.
///
///   silhouette width fraction  w = 0.3 + 0.5 * (bmi - 15) / 25
///   rim thickness fraction     t = 0.02 + 0.10 * (body_fat_pct - 5) / 45
///   stripe period (pixels)     p = max(2, round(16 - 12 * (age - 20) / 70))
double silhouette_width_fraction(double bmi);
double rim_thickness_fraction(double body_fat_pct);
int stripe_period_pixels(double age);

/// Renders one phantom. Background 0, interior base 0.5 modulated by the
/// stripe texture (amplitude 0.15), rim 0.9; the silhouette tapers by a fixed
/// 5% profile down the body axis with its widest rows at the ends. Additive
/// zero-mean uniform noise of magnitude noise_level is seeded by subject_seed;
/// the result is clamped to [0,1]. Deterministic in (attrs, config, seed).
ImageGrid generate_phantom(const AttributeVector& attrs, const PhantomConfig& config,
                           std::uint64_t subject_seed);

/// n subjects with attributes drawn uniformly from the configured ranges using
/// config.seed; ids run "phantom-0000" onward. Every record starts in the
/// train split until split_dataset() reassigns it.
std::vector<SubjectRecord> generate_cohort(int n, const PhantomConfig& config);

}  // namespace gcm
