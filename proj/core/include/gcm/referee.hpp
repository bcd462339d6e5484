#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

#include "gcm/nn.hpp"
#include "gcm/types.hpp"

namespace gcm {

enum class BackboneCapacity { tiny, small, paper_scale };

const char* to_string(BackboneCapacity c);
BackboneCapacity capacity_from_string(const std::string& s);

/// Referee training hyperparameters. The loss is fixed to mean absolute
/// error so training aligns with the reported validation metric.
/// band_fraction controls the view geometry: training views are the halves
/// of the band-removed image, matching the evaluation protocol exactly
/// (0 disables band removal).
struct RefereeTrainConfig {
    int epochs = 40;
    int batch_size = 16;
    double learning_rate = 3e-3;
    std::uint64_t seed = 1;
    BackboneCapacity backbone_capacity = BackboneCapacity::tiny;
    double band_fraction = 0.10;

    void validate() const;
    std::string digest() const;
};

/// A trained regressor for one (attribute, side) pair. Predictions are
/// standardized during training; label_mean/label_scale restore attribute
/// units at inference.
struct RefereeModel {
    Attribute attribute = Attribute::age;
    Side side = Side::superior;
    BackboneCapacity capacity = BackboneCapacity::tiny;
    nn::Network net;
    int input_rows = 0;
    int input_cols = 0;
    double band_fraction = 0.10;
    double label_mean = 0.0;
    double label_scale = 1.0;
    std::string training_config_digest;
};

/// The side view a referee consumes: central band removed (when fraction > 0),
/// then the superior or inferior half.
ImageGrid referee_view(const ImageGrid& image, Side side, double band_fraction);

/// Trains one referee on the side-appropriate crops of the training images
/// against the scalar ground truth. Deterministic given config.seed.
RefereeModel train_referee(std::span<const SubjectRecord> train, Attribute attribute, Side side,
                           const RefereeTrainConfig& config);

/// Finite scalar prediction in attribute units. The view must match the
/// model's input shape exactly.
double predict_attribute(const RefereeModel& model, const ImageGrid& view);

struct MaeStats {
    double mean = 0.0;
    double stddev = 0.0;
    int count = 0;
};

/// Mean and sample standard deviation of |prediction - truth| over the
/// side-appropriate crops of the validation records.
MaeStats validate_referee(const RefereeModel& model, std::span<const SubjectRecord> val);

/// Model directory: weights.bin + metadata.txt (UTF-8 key=value sidecar
/// recording attribute, side, input shape and the config digest, so loaders
/// can verify side discipline).
void save_referee(const RefereeModel& model, const std::filesystem::path& dir);
RefereeModel load_referee(const std::filesystem::path& dir);

/// Conventional directory name for one referee, e.g. "referee_age_superior".
std::string referee_dir_name(Attribute attribute, Side side);

/// Backbone spec string for a capacity preset (regression head included).
std::string referee_arch(BackboneCapacity capacity);

}  // namespace gcm
