#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "gcm/encoder.hpp"
#include "gcm/imgops.hpp"
#include "gcm/phantom.hpp"
#include "gcm/report.hpp"
#include "gcm/rng.hpp"
#include "gcm/views.hpp"

using namespace gcm;
namespace fs = std::filesystem;

namespace {

PhantomConfig small_config(std::uint64_t seed) {
    PhantomConfig cfg;
    cfg.height = 64;
    cfg.width = 48;
    cfg.noise_level = 0.02;
    cfg.seed = seed;
    return cfg;
}

struct Fixture {
    std::vector<SubjectRecord> cohort;
    RefereeSet referees;
    EncoderModel encoder;

    Fixture() {
        cohort = generate_cohort(20, small_config(42));
        RefereeTrainConfig rc;
        rc.epochs = 3;
        rc.batch_size = 8;
        rc.seed = 2;
        for (Attribute a : kAllAttributes) {
            for (Side s : kAllSides) {
                referees.insert(train_referee(cohort, a, s, rc));
            }
        }
        ContrastiveTrainConfig ec;
        ec.epochs = 2;
        ec.batch_size = 8;
        ec.seed = 2;
        encoder = train_encoder(cohort, ec);
    }
};

Fixture& fixture() {
    static Fixture f;
    return f;
}

}  // namespace

TEST_CASE("referee set lookup enforces coverage") {
    RefereeSet set;
    CHECK_FALSE(set.complete());
    CHECK(set.missing().size() == 6);
    CHECK_THROWS_AS(set.get(Attribute::age, Side::superior), config_error);

    const auto& full = fixture().referees;
    CHECK(full.complete());
    CHECK(full.get(Attribute::bmi, Side::inferior).side == Side::inferior);
}

TEST_CASE("explicit error is zero when both halves are identical and models match") {
    auto& f = fixture();
    // Build an image whose halves are pixel-identical, and mirror the
    // superior models onto the inferior slots: predictions must agree exactly.
    const auto view = referee_view(f.cohort.front().image, Side::superior, 0.10);
    ImageGrid doubled(view.height * 2, view.width);
    for (int r = 0; r < view.height; ++r) {
        for (int c = 0; c < view.width; ++c) {
            doubled.at(r, c) = view.at(r, c);
            doubled.at(r + view.height, c) = view.at(r, c);
        }
    }

    RefereeSet mirrored;
    for (Attribute a : kAllAttributes) {
        RefereeModel sup = f.referees.get(a, Side::superior);
        RefereeModel inf = f.referees.get(a, Side::superior);
        inf.side = Side::inferior;
        mirrored.insert(std::move(sup));
        mirrored.insert(std::move(inf));
    }
    const auto errors = explicit_error(mirrored, doubled);
    for (Attribute a : kAllAttributes) {
        CHECK(errors.at(a) == doctest::Approx(0.0));
    }

    // Implicit similarity of identical halves is exactly 1.
    CHECK(implicit_consistency(f.encoder, doubled) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("explicit composite: degenerate and two-image pools") {
    std::vector<std::map<Attribute, double>> one{{
        {Attribute::age, 3.0}, {Attribute::bmi, 1.0}, {Attribute::body_fat_pct, 2.0}}};
    const auto [composites_one, constants_one] = explicit_composite(one);
    CHECK(composites_one.size() == 1);
    CHECK(composites_one[0] == doctest::Approx(0.0));

    std::vector<std::map<Attribute, double>> two{
        {{Attribute::age, 2.0}, {Attribute::bmi, 1.0}, {Attribute::body_fat_pct, 0.0}},
        {{Attribute::age, 4.0}, {Attribute::bmi, 3.0}, {Attribute::body_fat_pct, 5.0}}};
    const auto [composites_two, constants_two] = explicit_composite(two);
    CHECK(composites_two[0] == doctest::Approx(0.0));
    CHECK(composites_two[1] == doctest::Approx(1.0));
    CHECK(constants_two.minmax.at(Attribute::age) == std::pair{2.0, 4.0});

    // Applying stored constants reproduces the same composites and clamps.
    const auto [reapplied, _] = explicit_composite(two, constants_two);
    CHECK(reapplied[0] == doctest::Approx(0.0));
    CHECK(reapplied[1] == doctest::Approx(1.0));

    std::vector<std::map<Attribute, double>> outside{
        {{Attribute::age, 10.0}, {Attribute::bmi, 10.0}, {Attribute::body_fat_pct, 10.0}}};
    const auto [clamped, __] = explicit_composite(outside, constants_two);
    CHECK(clamped[0] == doctest::Approx(1.0));

    CHECK_THROWS_AS(explicit_composite({}), invalid_input_error);
}

TEST_CASE("evaluate_dataset produces a coherent, recomputable report") {
    auto& f = fixture();
    const auto sets = build_eval_sets(f.cohort, 9);
    const auto report = evaluate_dataset(sets, f.referees, f.encoder);

    CHECK(report.per_image.size() == sets.consistent.size() + sets.inconsistent.size());
    CHECK(report.band_fraction == doctest::Approx(0.10));
    REQUIRE(report.fid_consistent.has_value());
    REQUIRE(report.fid_inconsistent.has_value());
    CHECK(*report.fid_consistent >= 0.0);
    CHECK(*report.fid_inconsistent >= 0.0);
    CHECK_FALSE(report.fid_extractor.empty());

    // Aggregates equal recomputation from the per-image rows.
    std::vector<double> cons_comp, incons_comp;
    for (const auto& row : report.per_image) {
        CHECK(row.explicit_composite >= 0.0);
        CHECK(row.explicit_composite <= 1.0);
        CHECK(row.implicit_similarity >= -1.0);
        CHECK(row.implicit_similarity <= 1.0);
        (row.role == "consistent" ? cons_comp : incons_comp).push_back(row.explicit_composite);
    }
    const auto cons_stats = aggregate(cons_comp);
    CHECK(report.consistent.explicit_composite.mean ==
          doctest::Approx(cons_stats.mean).epsilon(1e-9));
    CHECK(report.consistent.explicit_composite.stddev ==
          doctest::Approx(cons_stats.stddev).epsilon(1e-9));
    CHECK(report.consistent.explicit_composite.count == static_cast<int>(cons_comp.size()));

    // Normalization constants cover all three attributes.
    CHECK(report.normalization_constants.minmax.size() == 3);

    // Missing referee -> configuration error naming the absent model.
    RefereeSet incomplete;
    incomplete.insert(f.referees.get(Attribute::age, Side::superior));
    try {
        evaluate_dataset(sets, incomplete, f.encoder);
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("referee_age_inferior") != std::string::npos);
    }
}

TEST_CASE("all-identical evaluation sets degrade to zero composites and zero FIDs") {
    auto& f = fixture();
    const auto trimmed = remove_central_band(f.cohort.front().image, 0.10);

    EvalSets degenerate;
    for (int i = 0; i < 3; ++i) {
        EvalItem item;
        item.id = "same-" + std::to_string(i);
        item.image = trimmed;
        degenerate.reference.push_back(item);
        item.id = "cons-" + std::to_string(i);
        degenerate.consistent.push_back(item);
        item.id = "incons-" + std::to_string(i);
        degenerate.inconsistent.push_back(std::move(item));
    }

    const auto report = evaluate_dataset(degenerate, f.referees, f.encoder);
    for (const auto& row : report.per_image) {
        CHECK(row.explicit_composite == doctest::Approx(0.0));
    }
    REQUIRE(report.fid_consistent.has_value());
    REQUIRE(report.fid_inconsistent.has_value());
    CHECK(*report.fid_consistent == doctest::Approx(0.0).epsilon(1e-8));
    CHECK(*report.fid_inconsistent == doctest::Approx(0.0).epsilon(1e-8));
    // Correlation is undefined on a zero-variance pool and must be absent.
    CHECK_FALSE(report.implicit_explicit_correlation.has_value());
}

TEST_CASE("composite values are invariant under per-attribute positive rescaling") {
    Rng rng(64);
    std::vector<std::map<Attribute, double>> pool;
    for (int i = 0; i < 20; ++i) {
        pool.push_back({{Attribute::age, rng.uniform(0.0, 10.0)},
                        {Attribute::bmi, rng.uniform(0.0, 4.0)},
                        {Attribute::body_fat_pct, rng.uniform(0.0, 6.0)}});
    }
    const auto [base, _] = explicit_composite(pool);

    auto scaled_pool = pool;
    for (auto& m : scaled_pool) m[Attribute::age] *= 3.0;  // uniform positive rescale
    const auto [scaled, __] = explicit_composite(scaled_pool);
    for (std::size_t i = 0; i < base.size(); ++i) {
        CHECK(scaled[i] == doctest::Approx(base[i]).epsilon(1e-12));
    }
}

TEST_CASE("report JSON round trip preserves every field") {
    auto& f = fixture();
    const auto sets = build_eval_sets(f.cohort, 9);
    auto report = evaluate_dataset(sets, f.referees, f.encoder);
    report.config_digest = "deadbeefdeadbeef";

    const auto path = fs::temp_directory_path() / "gcm_report_roundtrip.json";
    write_report(report, path);
    const auto loaded = read_report(path);

    CHECK(loaded.config_digest == report.config_digest);
    CHECK(loaded.band_fraction == report.band_fraction);
    CHECK(loaded.per_image.size() == report.per_image.size());
    for (std::size_t i = 0; i < report.per_image.size(); ++i) {
        CHECK(loaded.per_image[i].id == report.per_image[i].id);
        CHECK(loaded.per_image[i].role == report.per_image[i].role);
        CHECK(loaded.per_image[i].explicit_composite ==
              doctest::Approx(report.per_image[i].explicit_composite).epsilon(1e-12));
        CHECK(loaded.per_image[i].implicit_similarity ==
              doctest::Approx(report.per_image[i].implicit_similarity).epsilon(1e-12));
    }
    CHECK(loaded.fid_consistent.has_value());
    CHECK(*loaded.fid_consistent == doctest::Approx(*report.fid_consistent).epsilon(1e-12));
    CHECK(loaded.normalization_constants.minmax == report.normalization_constants.minmax);
    CHECK(loaded.implicit_explicit_correlation.has_value() ==
          report.implicit_explicit_correlation.has_value());

    const auto table = format_summary_table(loaded);
    CHECK(table.find("consistent") != std::string::npos);
    CHECK(table.find("inconsistent") != std::string::npos);
    fs::remove(path);
}
