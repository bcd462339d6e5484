#include <doctest.h>

#include <set>

#include "gcm/phantom.hpp"
#include "gcm/views.hpp"

using namespace gcm;

namespace {

/// Image whose every pixel encodes its source row, scaled into [0,1].
ImageGrid row_coded(int h, int w, double offset = 0.0) {
    ImageGrid img(h, w);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) img.at(r, c) = (r + offset) / (2.0 * h);
    }
    return img;
}

double row_code(const ImageGrid& img, int r) { return img.at(r, 0); }

}  // namespace

TEST_CASE("band removal deletes exactly rows [45,55) for H=100") {
    const auto img = row_coded(100, 8);
    const auto out = remove_central_band(img, 0.10);
    REQUIRE(out.height == 90);
    for (int r = 0; r < 45; ++r) CHECK(row_code(out, r) == row_code(img, r));
    for (int r = 45; r < 90; ++r) CHECK(row_code(out, r) == row_code(img, r + 10));
}

TEST_CASE("band removal on H=192 removes rows [86,106)") {
    const auto img = row_coded(192, 4);
    const auto out = remove_central_band(img, 0.10);
    REQUIRE(out.height == 172);
    CHECK(row_code(out, 85) == row_code(img, 85));
    CHECK(row_code(out, 86) == row_code(img, 106));
    CHECK(row_code(out, 171) == row_code(img, 191));
}

TEST_CASE("vanishing band fraction leaves the image unchanged") {
    const auto img = row_coded(100, 4);
    const auto out = remove_central_band(img, 1e-9);
    CHECK(out.pixels == img.pixels);
}

TEST_CASE("band removal rejects bad fractions") {
    const auto img = row_coded(10, 4);
    CHECK_THROWS_AS(remove_central_band(img, 0.0), invalid_input_error);
    CHECK_THROWS_AS(remove_central_band(img, 1.0), invalid_input_error);
    CHECK_THROWS_AS(remove_central_band(img, -0.5), invalid_input_error);
    CHECK_THROWS_AS(remove_central_band(img, 0.95), invalid_input_error);  // < 2 rows left
}

TEST_CASE("stitching copies rows from the right sources") {
    const auto a = row_coded(4, 3, 0.0);
    const auto b = row_coded(4, 3, 0.43);

    SUBCASE("self-stitch is the identity") {
        const auto out = stitch_inconsistent(a, a);
        CHECK(out.pixels == a.pixels);
    }
    SUBCASE("rows 0-1 come from the top source, rows 2-3 from the bottom") {
        const auto out = stitch_inconsistent(a, b);
        for (int r = 0; r < 2; ++r) {
            for (int c = 0; c < 3; ++c) CHECK(out.at(r, c) == a.at(r, c));
        }
        for (int r = 2; r < 4; ++r) {
            for (int c = 0; c < 3; ++c) CHECK(out.at(r, c) == b.at(r, c));
        }
    }
    SUBCASE("zeros over ones average to one half") {
        const ImageGrid zeros(4, 4, 0.0), ones(4, 4, 1.0);
        const auto out = stitch_inconsistent(zeros, ones);
        double mean = 0.0;
        for (double v : out.pixels) mean += v;
        CHECK(mean / out.pixels.size() == doctest::Approx(0.5));
    }
    SUBCASE("dimension mismatch is rejected") {
        const ImageGrid small(2, 3, 0.0);
        CHECK_THROWS_AS(stitch_inconsistent(a, small), invalid_input_error);
    }
}

TEST_CASE("superior/inferior crop halves the image as given") {
    const auto full = row_coded(100, 6);
    const auto pair = crop_views(full, CropMode::superior_inferior, {}, 0);
    CHECK(pair.view_a.height == 50);
    CHECK(pair.view_b.height == 50);
    CHECK(row_code(pair.view_a, 0) == row_code(full, 0));
    CHECK(row_code(pair.view_b, 0) == row_code(full, 50));

    // After 10% band removal from H=100 the halves split at row 45 and the
    // seam rows are in neither view.
    const auto trimmed = remove_central_band(full, 0.10);
    const auto trimmed_pair = crop_views(trimmed, CropMode::superior_inferior, {}, 0);
    CHECK(trimmed_pair.view_a.height == 45);
    CHECK(trimmed_pair.view_b.height == 45);
    CHECK(row_code(trimmed_pair.view_a, 44) == row_code(full, 44));
    CHECK(row_code(trimmed_pair.view_b, 0) == row_code(full, 55));
}

TEST_CASE("grid crop partitions evenly") {
    const auto img = row_coded(100, 96);
    CropParams params;
    params.grid_rows = 2;
    params.grid_cols = 2;
    params.cell_a = {0, 0};
    params.cell_b = {1, 1};
    const auto pair = crop_views(img, CropMode::grid, params, 0);
    CHECK(pair.view_a.height == 50);
    CHECK(pair.view_a.width == 48);
    CHECK(pair.view_b.height == 50);
    CHECK(pair.view_b.width == 48);
    CHECK(row_code(pair.view_b, 0) == img.at(50, 48));

    params.cell_b = {2, 0};
    CHECK_THROWS_AS(crop_views(img, CropMode::grid, params, 0), invalid_input_error);
}

TEST_CASE("random crops are non-overlapping, deterministic, and bounded") {
    const auto img = row_coded(64, 8);
    CropParams params;
    params.random_band_height = 20;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto pair = crop_views(img, CropMode::random, params, seed);
        CHECK(pair.view_a.height == 20);
        CHECK(pair.view_b.height == 20);
        // Recover each band's start row from the row coding.
        const int start_a = static_cast<int>(row_code(pair.view_a, 0) * 2 * 64 + 0.5);
        const int start_b = static_cast<int>(row_code(pair.view_b, 0) * 2 * 64 + 0.5);
        const bool disjoint = start_a + 20 <= start_b || start_b + 20 <= start_a;
        CHECK(disjoint);
    }
    const auto p1 = crop_views(img, CropMode::random, params, 7);
    const auto p2 = crop_views(img, CropMode::random, params, 7);
    CHECK(p1.view_a.pixels == p2.view_a.pixels);
    CHECK(p1.view_b.pixels == p2.view_b.pixels);

    params.random_band_height = 40;
    CHECK_THROWS_AS(crop_views(img, CropMode::random, params, 0), invalid_input_error);
}

TEST_CASE("eval sets: counts, distinct sources, determinism") {
    PhantomConfig cfg;
    cfg.seed = 3;
    cfg.noise_level = 0.0;
    auto records = generate_cohort(8, cfg);

    const auto sets = build_eval_sets(records, 11);
    CHECK(sets.reference.size() == 4);
    CHECK(sets.consistent.size() == 4);
    CHECK(sets.inconsistent.size() == 4);

    // Reference and consistent pools are disjoint subject sets.
    std::set<std::string> ref_ids, cons_ids;
    for (const auto& item : sets.reference) ref_ids.insert(item.id);
    for (const auto& item : sets.consistent) cons_ids.insert(item.id);
    for (const auto& id : cons_ids) CHECK(ref_ids.count(id) == 0);

    // Every stitched image has distinct top/bottom sources, each subject once
    // per role.
    std::set<std::string> tops, bottoms;
    for (const auto& item : sets.inconsistent) {
        CHECK(item.top_source_id != item.bottom_source_id);
        tops.insert(item.top_source_id);
        bottoms.insert(item.bottom_source_id);
    }
    CHECK(tops.size() == 4);
    CHECK(bottoms.size() == 4);

    // All images share the band-removed dimensions.
    for (const auto& item : sets.consistent) {
        CHECK(item.image.height == 172);
        CHECK(item.image.width == 96);
    }
    for (const auto& item : sets.inconsistent) CHECK(item.image.height == 172);

    const auto again = build_eval_sets(records, 11);
    for (std::size_t i = 0; i < sets.inconsistent.size(); ++i) {
        CHECK(sets.inconsistent[i].id == again.inconsistent[i].id);
        CHECK(sets.inconsistent[i].image.pixels == again.inconsistent[i].image.pixels);
    }

    std::vector<SubjectRecord> few(records.begin(), records.begin() + 3);
    CHECK_THROWS_AS(build_eval_sets(few, 11), invalid_input_error);
}

TEST_CASE("stitch then band removal drops the seam neighborhood") {
    const auto a = row_coded(192, 4, 0.0);
    const auto b = row_coded(192, 4, 0.31);
    const auto stitched = stitch_inconsistent(a, b);          // seam at row 96
    const auto out = remove_central_band(stitched, 0.10);     // drops rows [86,106)
    REQUIRE(out.height == 172);
    // Rows [0,86) must read from A, rows [86,172) from B's rows [106,192);
    // nothing from the 2-row neighborhood around the seam survives.
    for (int r = 0; r < 86; ++r) CHECK(row_code(out, r) == row_code(a, r));
    for (int r = 86; r < 172; ++r) CHECK(row_code(out, r) == row_code(b, r + 20));
}
