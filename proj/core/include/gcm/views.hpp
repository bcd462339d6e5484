#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gcm/types.hpp"

namespace gcm {

enum class CropMode { superior_inferior, random, grid };

const char* to_string(CropMode m);

/// Two crops taken from one image (or, for stitched evaluation images, from
/// two source subjects).
struct ViewPair {
    ImageGrid view_a;
    ImageGrid view_b;
    CropMode mode = CropMode::superior_inferior;
    std::vector<std::string> source_ids;
};

struct CropParams {
    int random_band_height = 0;  // required for CropMode::random
    int grid_rows = 2;
    int grid_cols = 2;
    std::pair<int, int> cell_a{0, 0};
    std::pair<int, int> cell_b{1, 1};
};

/// One evaluation image plus its provenance. Consistent and reference images
/// carry their single source subject; inconsistent images carry the two
/// stitched sources.
struct EvalItem {
    std::string id;
    ImageGrid image;
    std::string top_source_id;     // inconsistent only
    std::string bottom_source_id;  // inconsistent only
    AttributeVector attributes;    // meaningful for single-source items only
    bool has_attributes = false;
};

/// The split-reference evaluation sets: `reference` and `consistent` are
/// disjoint halves of the genuine test pool, `inconsistent` holds stitched
/// images. All images share identical (band-removed) dimensions.
struct EvalSets {
    std::vector<EvalItem> reference;
    std::vector<EvalItem> consistent;
    std::vector<EvalItem> inconsistent;
    double band_fraction = 0.10;
};

/// Number of rows the central band [round(H*(0.5-f/2)), round(H*(0.5+f/2)))
/// covers, rounding half-up. Zero when the band rounds away.
int central_band_rows(int height, double fraction);

/// Deletes the central row band so a seam at the image center cannot leak
/// into either view. Requires 0 < fraction < 1 and at least 2 rows left over.
ImageGrid remove_central_band(const ImageGrid& image, double fraction = 0.10);

/// Rows [0, H/2) from top_source, rows [H/2, H) from bottom_source.
/// Dimensions must match.
ImageGrid stitch_inconsistent(const ImageGrid& top_source, const ImageGrid& bottom_source);

/// Extracts a view pair. superior_inferior halves the image as given (pass a
/// band-removed image to get the evaluation-protocol views). random picks two
/// non-overlapping row bands of params.random_band_height at seeded positions.
/// grid takes two cells of an R x C partition. Deterministic per seed.
ViewPair crop_views(const ImageGrid& image, CropMode mode, const CropParams& params,
                    std::uint64_t seed);

/// Shuffles the test records with `seed`, splits them into halves P and Q:
/// reference = band-removed P, consistent = band-removed Q, inconsistent =
/// band-removed stitch(q_i, q_{i+1 mod |Q|}) (cyclic pairing, so every Q
/// subject appears once as top and once as bottom). Requires >= 4 records.
EvalSets build_eval_sets(std::span<const SubjectRecord> test_records, std::uint64_t seed,
                         double band_fraction = 0.10);

}  // namespace gcm
