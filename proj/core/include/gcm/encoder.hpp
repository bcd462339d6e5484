#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gcm/nn.hpp"
#include "gcm/referee.hpp"  // BackboneCapacity
#include "gcm/types.hpp"

namespace gcm {

enum class Augmentation { crop_resize, horizontal_flip, intensity_jitter, gaussian_blur };

const char* to_string(Augmentation a);
Augmentation augmentation_from_string(const std::string& s);

/// Contrastive training hyperparameters. The crop sampler draws view heights
/// spanning the body-half geometry so superior/inferior evaluation views are
/// in-distribution; band_fraction fixes the target view shape the same way
/// the referees do.
struct ContrastiveTrainConfig {
    int epochs = 20;
    int batch_size = 64;
    double temperature = 0.5;
    double learning_rate = 2e-3;
    std::vector<Augmentation> augmentations{Augmentation::crop_resize, Augmentation::horizontal_flip,
                                            Augmentation::intensity_jitter, Augmentation::gaussian_blur};
    std::uint64_t seed = 1;
    BackboneCapacity capacity = BackboneCapacity::tiny;
    double band_fraction = 0.10;
    /// embed() returns backbone features by default; set to use the
    /// projection-head output instead. Recorded in the sidecar and report.
    bool embed_from_projection = false;

    void validate() const;
    std::string digest() const;
};

/// Contrastive encoder: convolutional backbone plus a small projection head
/// used during training. embedding_dim reflects the configured feature
/// source.
struct EncoderModel {
    nn::Network backbone;
    nn::Network projection_head;
    BackboneCapacity capacity = BackboneCapacity::tiny;
    int input_rows = 0;
    int input_cols = 0;
    int embedding_dim = 0;
    bool embed_from_projection = false;
    double band_fraction = 0.10;
    std::string training_config_digest;
    double final_epoch_loss = 0.0;
};

/// Two independently augmented views of one image, each sized to the
/// encoder input shape. Deterministic per draw_seed. With no augmentations
/// both views are the resized original.
std::pair<ImageGrid, ImageGrid> augment_pair(const ImageGrid& image,
                                             const ContrastiveTrainConfig& config,
                                             std::uint64_t draw_seed);

/// Normalized temperature-scaled cross entropy over 2N embeddings ordered as
/// N positive pairs (2k, 2k+1): the mean over anchors of
/// -log( exp(s(anchor,positive)/tau) / sum_{others} exp(s(anchor,other)/tau) )
/// with cosine similarity s. Requires N >= 2 and tau > 0.
double nt_xent_loss(std::span<const FeatureVector> embeddings, double temperature);

/// Same loss over a D x 2N column matrix; optionally fills `grad` with
/// d(loss)/d(embeddings), including the cosine-normalization Jacobian.
double nt_xent_loss(const Eigen::MatrixXd& embeddings, double temperature,
                    Eigen::MatrixXd* grad = nullptr);

/// Trains the encoder by minimizing nt_xent_loss over augmented pairs;
/// labels are ignored. Requires at least batch_size images.
EncoderModel train_encoder(std::span<const SubjectRecord> train, const ContrastiveTrainConfig& config);

/// Length-D embedding of a view. Views are bilinearly resized to the model
/// input shape first (identity when the shape already matches).
FeatureVector embed(const EncoderModel& model, const ImageGrid& view);

/// Model directory: weights.bin (backbone then head) + metadata.txt sidecar
/// with embedding_dim and the feature-source flag.
void save_encoder(const EncoderModel& model, const std::filesystem::path& dir);
EncoderModel load_encoder(const std::filesystem::path& dir);

/// Backbone spec (no regression head) for a capacity preset.
std::string encoder_backbone_arch(BackboneCapacity capacity);

}  // namespace gcm
