#include <doctest.h>

#include <cmath>

#include "gcm/imgops.hpp"
#include "gcm/phantom.hpp"
#include "support/geometry_oracle.hpp"

using namespace gcm;
using testsupport::measure_geometry;

namespace {

PhantomConfig clean_config() {
    PhantomConfig cfg;
    cfg.noise_level = 0.0;
    return cfg;
}

AttributeVector mid_attrs() { return {55.0, 27.5, 27.5}; }

}  // namespace

TEST_CASE("silhouette width tracks bmi at the widest row") {
    // Oracle: count thresholded columns per row and take the widest.
    auto cfg = clean_config();
    AttributeVector thin = mid_attrs();
    thin.bmi = 15.0;
    const auto narrow = measure_geometry(generate_phantom(thin, cfg, 1));
    CHECK(narrow.max_width_px == doctest::Approx(29.0));  // round(0.30 * 96)

    AttributeVector wide = mid_attrs();
    wide.bmi = 40.0;
    const auto broad = measure_geometry(generate_phantom(wide, cfg, 1));
    CHECK(broad.max_width_px == doctest::Approx(77.0));  // round(0.80 * 96)
}

TEST_CASE("stripe period tracks age") {
    auto cfg = clean_config();
    AttributeVector young = mid_attrs();
    young.age = 20.0;
    CHECK(measure_geometry(generate_phantom(young, cfg, 2)).stripe_period_px == 16);

    AttributeVector old = mid_attrs();
    old.age = 90.0;
    CHECK(measure_geometry(generate_phantom(old, cfg, 2)).stripe_period_px == 4);

    CHECK(stripe_period_pixels(20.0) == 16);
    CHECK(stripe_period_pixels(90.0) == 4);
}

TEST_CASE("rim fraction tracks body fat") {
    auto cfg = clean_config();
    for (double fat : {5.0, 27.5, 50.0}) {
        AttributeVector attrs = mid_attrs();
        attrs.body_fat_pct = fat;
        const auto m = measure_geometry(generate_phantom(attrs, cfg, 3));
        CHECK(m.rim_fraction == doctest::Approx(rim_thickness_fraction(fat)).epsilon(0.08));
    }
}

TEST_CASE("phantom output is deterministic and in [0,1]") {
    PhantomConfig cfg;
    cfg.noise_level = 0.05;
    const auto a = generate_phantom(mid_attrs(), cfg, 99);
    const auto b = generate_phantom(mid_attrs(), cfg, 99);
    CHECK(a.pixels == b.pixels);
    a.require_unit_range();

    const auto c = generate_phantom(mid_attrs(), cfg, 100);
    CHECK(a.pixels != c.pixels);  // different subject seed, different noise
}

TEST_CASE("phantom rejects out-of-range attributes") {
    AttributeVector attrs = mid_attrs();
    attrs.age = 19.0;
    CHECK_THROWS_AS(generate_phantom(attrs, clean_config(), 1), invalid_input_error);
    attrs = mid_attrs();
    attrs.bmi = 41.0;
    CHECK_THROWS_AS(generate_phantom(attrs, clean_config(), 1), invalid_input_error);
}

TEST_CASE("config validation catches degenerate ranges and odd dimensions") {
    PhantomConfig cfg;
    cfg.age_range = {30.0, 30.0};
    CHECK_THROWS_AS(cfg.validate(), config_error);
    cfg = PhantomConfig{};
    cfg.height = 191;
    CHECK_THROWS_AS(cfg.validate(), config_error);
    cfg = PhantomConfig{};
    cfg.noise_level = 0.2;
    CHECK_THROWS_AS(cfg.validate(), config_error);
}

TEST_CASE("cohort generation is deterministic with uniform attribute sampling") {
    PhantomConfig cfg;
    cfg.seed = 7;
    const auto a = generate_cohort(5, cfg);
    const auto b = generate_cohort(5, cfg);
    REQUIRE(a.size() == 5);
    CHECK(a[0].id == "phantom-0000");
    CHECK(a[4].id == "phantom-0004");
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].id == b[i].id);
        CHECK(a[i].attributes.age == b[i].attributes.age);
        CHECK(a[i].image.pixels == b[i].image.pixels);
    }

    CHECK_THROWS_AS(generate_cohort(0, cfg), invalid_input_error);

    // Uniform sampling oracle: the mean of U(20, 90) is 55.
    PhantomConfig big = cfg;
    big.seed = 13;
    const auto cohort = generate_cohort(1000, big);
    double mean_age = 0.0;
    for (const auto& rec : cohort) mean_age += rec.attributes.age;
    mean_age /= cohort.size();
    CHECK(mean_age == doctest::Approx(55.0).epsilon(2.0 / 55.0));
}

TEST_CASE("attributes are recoverable from geometry with a linear fit") {
    PhantomConfig cfg;
    cfg.noise_level = 0.02;
    cfg.seed = 21;
    const auto cohort = generate_cohort(200, cfg);

    std::vector<double> width, rim, period, age, bmi, fat;
    for (const auto& rec : cohort) {
        const auto m = measure_geometry(rec.image);
        width.push_back(m.mean_width_px);
        rim.push_back(m.rim_fraction);
        period.push_back(m.stripe_period_px);
        age.push_back(rec.attributes.age);
        bmi.push_back(rec.attributes.bmi);
        fat.push_back(rec.attributes.body_fat_pct);
    }
    const std::vector<std::vector<double>> features{width, rim, period};
    CHECK(testsupport::linear_fit_r2(features, bmi) >= 0.95);
    CHECK(testsupport::linear_fit_r2(features, fat) >= 0.95);
    CHECK(testsupport::linear_fit_r2(features, age) >= 0.95);
}

TEST_CASE("both halves carry the same geometry") {
    PhantomConfig cfg;
    cfg.noise_level = 0.02;
    cfg.seed = 33;
    const auto cohort = generate_cohort(20, cfg);
    for (const auto& rec : cohort) {
        const auto sup = measure_geometry(superior_half(rec.image));
        const auto inf = measure_geometry(inferior_half(rec.image));
        CHECK(std::abs(sup.mean_width_px - inf.mean_width_px) / inf.mean_width_px < 0.10);
        CHECK(std::abs(sup.rim_fraction - inf.rim_fraction) / inf.rim_fraction < 0.10);
        CHECK(std::abs(sup.stripe_period_px - inf.stripe_period_px) /
                  static_cast<double>(inf.stripe_period_px) <
              0.10);
    }
}
