#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gcm/types.hpp"
#include "gcm/views.hpp"

namespace gcm {

/// Cohort directory layout:
///   <dir>/manifest.csv             id,filename,age,bmi,body_fat_pct,split
///   <dir>/images/<id>.pgm          16-bit grayscale rasters
/// Attribute fields are printed with shortest round-trip formatting, so a
/// rerun with the same inputs reproduces the manifest byte for byte.
void save_cohort(const std::filesystem::path& dir, std::span<const SubjectRecord> records);

std::vector<SubjectRecord> load_cohort(const std::filesystem::path& dir);

/// Evaluation sets reuse the cohort format with three extra columns:
/// role in {reference, consistent, inconsistent}, and the stitch provenance
/// top_source_id / bottom_source_id (empty for single-source rows, which keep
/// their subject's attributes; stitched rows leave the attribute fields
/// empty).
void save_eval_sets(const std::filesystem::path& dir, const EvalSets& sets);

EvalSets load_eval_sets(const std::filesystem::path& dir);

/// FNV-1a 64 over a file's bytes, rendered as 16 hex digits. Used to compare
/// artifacts across reruns and to stamp reports.
std::string file_digest(const std::filesystem::path& path);

/// FNV-1a 64 over a string.
std::string string_digest(const std::string& text);

}  // namespace gcm
