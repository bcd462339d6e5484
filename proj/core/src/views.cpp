#include "gcm/views.hpp"

#include <algorithm>
#include <cmath>

#include "gcm/imgops.hpp"
#include "gcm/rng.hpp"

namespace gcm {
namespace {

int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }

}  // namespace

const char* to_string(CropMode m) {
    switch (m) {
        case CropMode::superior_inferior: return "superior_inferior";
        case CropMode::random: return "random";
        case CropMode::grid: return "grid";
    }
    return "?";
}

int central_band_rows(int height, double fraction) {
    const int lo = round_half_up(height * (0.5 - fraction / 2.0));
    const int hi = round_half_up(height * (0.5 + fraction / 2.0));
    return std::max(0, hi - lo);
}

ImageGrid remove_central_band(const ImageGrid& image, double fraction) {
    image.require_valid();
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw invalid_input_error("remove_central_band: fraction must be in (0,1), got " +
                                  std::to_string(fraction));
    }
    const int H = image.height;
    const int lo = round_half_up(H * (0.5 - fraction / 2.0));
    const int hi = round_half_up(H * (0.5 + fraction / 2.0));
    if (H - (hi - lo) < 2) {
        throw invalid_input_error("remove_central_band: band leaves fewer than 2 rows");
    }
    if (hi <= lo) return image;  // band rounds to zero rows

    ImageGrid out(H - (hi - lo), image.width);
    int dst = 0;
    for (int r = 0; r < H; ++r) {
        if (r >= lo && r < hi) continue;
        for (int c = 0; c < image.width; ++c) out.at(dst, c) = image.at(r, c);
        ++dst;
    }
    return out;
}

ImageGrid stitch_inconsistent(const ImageGrid& top_source, const ImageGrid& bottom_source) {
    top_source.require_valid();
    bottom_source.require_valid();
    if (!top_source.same_shape(bottom_source)) {
        throw invalid_input_error("stitch_inconsistent: dimension mismatch (" +
                                  std::to_string(top_source.height) + "x" + std::to_string(top_source.width) +
                                  " vs " + std::to_string(bottom_source.height) + "x" +
                                  std::to_string(bottom_source.width) + ")");
    }
    const int H = top_source.height;
    ImageGrid out(H, top_source.width);
    const int seam = H / 2;
    for (int r = 0; r < H; ++r) {
        const ImageGrid& src = r < seam ? top_source : bottom_source;
        for (int c = 0; c < out.width; ++c) out.at(r, c) = src.at(r, c);
    }
    return out;
}

ViewPair crop_views(const ImageGrid& image, CropMode mode, const CropParams& params,
                    std::uint64_t seed) {
    image.require_valid();
    ViewPair pair;
    pair.mode = mode;

    switch (mode) {
        case CropMode::superior_inferior: {
            pair.view_a = superior_half(image);
            pair.view_b = inferior_half(image);
            break;
        }
        case CropMode::random: {
            const int h = params.random_band_height;
            if (h < 1) throw invalid_input_error("crop_views: random_band_height must be >= 1");
            if (2 * h > image.height) {
                throw invalid_input_error("crop_views: cannot place two non-overlapping bands of height " +
                                          std::to_string(h) + " in " + std::to_string(image.height) + " rows");
            }
            // Gap construction guarantees non-overlap without rejection loops:
            // draw the upper band start, then the lower band start below it,
            // then randomize which view gets which band.
            Rng rng(seed);
            const int y1 = static_cast<int>(rng.uniform_int(image.height - 2 * h + 1));
            const int y2 = y1 + h + static_cast<int>(rng.uniform_int(image.height - h - (y1 + h) + 1));
            ImageGrid band1 = crop_rows(image, y1, y1 + h);
            ImageGrid band2 = crop_rows(image, y2, y2 + h);
            if (rng.uniform01() < 0.5) {
                pair.view_a = std::move(band1);
                pair.view_b = std::move(band2);
            } else {
                pair.view_a = std::move(band2);
                pair.view_b = std::move(band1);
            }
            break;
        }
        case CropMode::grid: {
            const int R = params.grid_rows, C = params.grid_cols;
            if (R < 1 || C < 1 || R > image.height || C > image.width) {
                throw invalid_input_error("crop_views: bad grid partition");
            }
            auto cell = [&](std::pair<int, int> rc) {
                const auto [i, j] = rc;
                if (i < 0 || i >= R || j < 0 || j >= C) {
                    throw invalid_input_error("crop_views: grid cell out of range");
                }
                const int r0 = static_cast<int>(static_cast<long>(image.height) * i / R);
                const int r1 = static_cast<int>(static_cast<long>(image.height) * (i + 1) / R);
                const int c0 = static_cast<int>(static_cast<long>(image.width) * j / C);
                const int c1 = static_cast<int>(static_cast<long>(image.width) * (j + 1) / C);
                return crop(image, r0, r1, c0, c1);
            };
            pair.view_a = cell(params.cell_a);
            pair.view_b = cell(params.cell_b);
            break;
        }
    }
    return pair;
}

EvalSets build_eval_sets(std::span<const SubjectRecord> test_records, std::uint64_t seed,
                         double band_fraction) {
    if (test_records.size() < 4) {
        throw invalid_input_error("build_eval_sets: need at least 4 test records, got " +
                                  std::to_string(test_records.size()));
    }

    std::vector<std::size_t> order(test_records.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(seed);
    rng.shuffle(order);

    const std::size_t half = order.size() / 2;
    EvalSets sets;
    sets.band_fraction = band_fraction;

    auto single = [&](const SubjectRecord& rec) {
        EvalItem item;
        item.id = rec.id;
        item.image = remove_central_band(rec.image, band_fraction);
        item.attributes = rec.attributes;
        item.has_attributes = true;
        return item;
    };

    for (std::size_t i = 0; i < half; ++i) {
        sets.reference.push_back(single(test_records[order[i]]));
    }
    std::vector<const SubjectRecord*> pool;
    for (std::size_t i = half; i < order.size(); ++i) {
        pool.push_back(&test_records[order[i]]);
        sets.consistent.push_back(single(*pool.back()));
    }

    // Cyclic pairing: q_i supplies the top half, q_{i+1} the bottom, so the
    // two sources are always distinct and every subject is used exactly once
    // per role.
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const SubjectRecord& top = *pool[i];
        const SubjectRecord& bottom = *pool[(i + 1) % pool.size()];
        EvalItem item;
        item.id = "stitch-" + top.id + "-" + bottom.id;
        item.image = remove_central_band(stitch_inconsistent(top.image, bottom.image), band_fraction);
        item.top_source_id = top.id;
        item.bottom_source_id = bottom.id;
        sets.inconsistent.push_back(std::move(item));
    }
    return sets;
}

}  // namespace gcm
