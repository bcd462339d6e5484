#include "gcm/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "gcm/cohort_io.hpp"
#include "gcm/imgops.hpp"
#include "gcm/views.hpp"

namespace gcm {
namespace {

std::string format_double(double v) {
    std::ostringstream ss;
    ss.precision(17);
    ss << v;
    return ss.str();
}

std::map<std::string, std::string> read_sidecar(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open: " + path.string());
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw io_error("bad sidecar line in " + path.string());
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return kv;
}

const std::string& sidecar_get(const std::map<std::string, std::string>& kv, const std::string& key,
                               const std::filesystem::path& ctx) {
    const auto it = kv.find(key);
    if (it == kv.end()) throw io_error("missing sidecar key '" + key + "' in " + ctx.string());
    return it->second;
}

/// Target view shape under the band-removal geometry: the height of one half
/// of the band-removed image.
std::pair<int, int> target_view_shape(int height, int width, double band_fraction) {
    int h = height;
    if (band_fraction > 0.0) h -= central_band_rows(height, band_fraction);
    return {h / 2, width};
}

}  // namespace

const char* to_string(Augmentation a) {
    switch (a) {
        case Augmentation::crop_resize: return "crop_resize";
        case Augmentation::horizontal_flip: return "horizontal_flip";
        case Augmentation::intensity_jitter: return "intensity_jitter";
        case Augmentation::gaussian_blur: return "gaussian_blur";
    }
    return "?";
}

Augmentation augmentation_from_string(const std::string& s) {
    if (s == "crop_resize") return Augmentation::crop_resize;
    if (s == "horizontal_flip") return Augmentation::horizontal_flip;
    if (s == "intensity_jitter") return Augmentation::intensity_jitter;
    if (s == "gaussian_blur") return Augmentation::gaussian_blur;
    throw config_error("unknown augmentation '" + s + "'");
}

std::string encoder_backbone_arch(BackboneCapacity capacity) {
    switch (capacity) {
        case BackboneCapacity::tiny:
            return "pool 1 2|conv 8 5 5 2|relu|conv 16 3 3 2|relu|conv 32 3 3 2|relu|gap";
        case BackboneCapacity::small:
            return "pool 1 2|conv 12 7 5 2|relu|conv 24 3 3 2|relu|conv 48 3 3 2|relu|gap";
        case BackboneCapacity::paper_scale:
            return "conv 16 7 7 2|relu|conv 32 3 3 1|relu|conv 32 3 3 2|relu|conv 64 3 3 1|relu|"
                   "conv 64 3 3 2|relu|conv 128 3 3 2|relu|gap";
    }
    throw config_error("unknown capacity");
}

void ContrastiveTrainConfig::validate() const {
    if (epochs < 1) throw config_error("ContrastiveTrainConfig: epochs must be >= 1");
    if (batch_size < 2) throw config_error("ContrastiveTrainConfig: batch_size must be >= 2 (the loss needs negatives)");
    if (!(temperature > 0.0)) throw config_error("ContrastiveTrainConfig: temperature must be > 0");
    if (!(learning_rate > 0.0)) throw config_error("ContrastiveTrainConfig: learning_rate must be > 0");
    if (band_fraction < 0.0 || band_fraction >= 1.0) {
        throw config_error("ContrastiveTrainConfig: band_fraction must be in [0,1)");
    }
}

std::string ContrastiveTrainConfig::digest() const {
    std::ostringstream ss;
    ss << "encoder;epochs=" << epochs << ";batch=" << batch_size
       << ";tau=" << format_double(temperature) << ";lr=" << format_double(learning_rate)
       << ";seed=" << seed << ";capacity=" << to_string(capacity)
       << ";band=" << format_double(band_fraction) << ";proj=" << (embed_from_projection ? 1 : 0)
       << ";augs=";
    for (auto a : augmentations) ss << to_string(a) << ",";
    return string_digest(ss.str());
}

std::pair<ImageGrid, ImageGrid> augment_pair(const ImageGrid& image,
                                             const ContrastiveTrainConfig& config,
                                             std::uint64_t draw_seed) {
    image.require_valid();
    const auto [target_h, target_w] = target_view_shape(image.height, image.width, config.band_fraction);
    if (target_h < 1) throw invalid_input_error("augment_pair: image too small for view geometry");

    Rng rng(draw_seed);
    auto make_view = [&]() {
        ImageGrid view = image;
        bool sized = false;
        for (Augmentation aug : config.augmentations) {
            switch (aug) {
                case Augmentation::crop_resize: {
                    // Heights span [~half-view, 0.75 H] so body halves are
                    // in-distribution crop positions.
                    const double min_frac = std::min(0.75, static_cast<double>(target_h) / image.height);
                    const int ch = std::max(2, static_cast<int>(std::floor(
                                                   rng.uniform(min_frac, 0.75) * image.height + 0.5)));
                    const int cw = std::max(2, static_cast<int>(std::floor(
                                                   rng.uniform(0.8, 1.0) * image.width + 0.5)));
                    const int top = static_cast<int>(rng.uniform_int(image.height - ch + 1));
                    const int left = static_cast<int>(rng.uniform_int(image.width - cw + 1));
                    view = resize_bilinear(crop(image, top, top + ch, left, left + cw), target_h, target_w);
                    sized = true;
                    break;
                }
                case Augmentation::horizontal_flip: {
                    if (rng.uniform01() < 0.5) view = flip_horizontal(view);
                    break;
                }
                case Augmentation::intensity_jitter: {
                    const double scale = rng.uniform(0.9, 1.1);
                    const double shift = rng.uniform(-0.05, 0.05);
                    for (double& v : view.pixels) v = std::clamp(v * scale + shift, 0.0, 1.0);
                    break;
                }
                case Augmentation::gaussian_blur: {
                    const double sigma = rng.uniform(0.0, 1.0);
                    if (sigma > 0.05) view = gaussian_blur(view, sigma);
                    break;
                }
            }
        }
        if (!sized) view = resize_bilinear(view, target_h, target_w);
        return view;
    };

    ImageGrid first = make_view();
    ImageGrid second = make_view();
    return {std::move(first), std::move(second)};
}

double nt_xent_loss(const Eigen::MatrixXd& embeddings, double temperature, Eigen::MatrixXd* grad) {
    const int total = static_cast<int>(embeddings.cols());
    if (total < 4 || total % 2 != 0) {
        throw invalid_input_error("nt_xent_loss: need 2N embeddings with N >= 2, got " +
                                  std::to_string(total));
    }
    if (!(temperature > 0.0)) throw invalid_input_error("nt_xent_loss: temperature must be > 0");

    // Normalize columns; cosine similarity becomes a plain dot product.
    Eigen::VectorXd norms(total);
    Eigen::MatrixXd unit(embeddings.rows(), total);
    for (int i = 0; i < total; ++i) {
        const double n = embeddings.col(i).norm();
        if (n == 0.0) throw invalid_input_error("nt_xent_loss: zero-norm embedding at index " + std::to_string(i));
        norms[i] = n;
        unit.col(i) = embeddings.col(i) / n;
    }
    const Eigen::MatrixXd sim = unit.transpose() * unit;

    const double inv_tau = 1.0 / temperature;
    const double weight = 1.0 / total;
    double loss = 0.0;
    Eigen::MatrixXd coeff;  // d(loss)/d(sim), accumulated over anchors
    if (grad) coeff = Eigen::MatrixXd::Zero(total, total);

    for (int i = 0; i < total; ++i) {
        const int pos = (i % 2 == 0) ? i + 1 : i - 1;
        double max_logit = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < total; ++j) {
            if (j == i) continue;
            max_logit = std::max(max_logit, sim(i, j) * inv_tau);
        }
        double denom = 0.0;
        for (int j = 0; j < total; ++j) {
            if (j == i) continue;
            denom += std::exp(sim(i, j) * inv_tau - max_logit);
        }
        const double lse = max_logit + std::log(denom);
        loss += lse - sim(i, pos) * inv_tau;

        if (grad) {
            for (int j = 0; j < total; ++j) {
                if (j == i) continue;
                const double p = std::exp(sim(i, j) * inv_tau - lse);
                coeff(i, j) += (p - (j == pos ? 1.0 : 0.0)) * inv_tau * weight;
            }
        }
    }
    loss *= weight;

    if (grad) {
        grad->resize(embeddings.rows(), total);
        for (int i = 0; i < total; ++i) {
            Eigen::VectorXd du = Eigen::VectorXd::Zero(embeddings.rows());
            for (int j = 0; j < total; ++j) {
                if (j == i) continue;
                du += (coeff(i, j) + coeff(j, i)) * unit.col(j);
            }
            // Through the normalization: d(e/|e|) = (I - u u^T)/|e|.
            grad->col(i) = (du - unit.col(i) * unit.col(i).dot(du)) / norms[i];
        }
    }
    return loss;
}

double nt_xent_loss(std::span<const FeatureVector> embeddings, double temperature) {
    if (embeddings.size() < 4 || embeddings.size() % 2 != 0) {
        throw invalid_input_error("nt_xent_loss: need 2N embeddings with N >= 2, got " +
                                  std::to_string(embeddings.size()));
    }
    const std::size_t dim = embeddings.front().size();
    Eigen::MatrixXd m(dim, embeddings.size());
    for (std::size_t i = 0; i < embeddings.size(); ++i) {
        if (embeddings[i].size() != dim) {
            throw invalid_input_error("nt_xent_loss: embeddings must share dimension");
        }
        for (std::size_t d = 0; d < dim; ++d) m(static_cast<int>(d), static_cast<int>(i)) = embeddings[i][d];
    }
    return nt_xent_loss(m, temperature, nullptr);
}

EncoderModel train_encoder(std::span<const SubjectRecord> train, const ContrastiveTrainConfig& config) {
    config.validate();
    if (train.size() < static_cast<std::size_t>(config.batch_size)) {
        throw invalid_input_error("train_encoder: need at least batch_size (" +
                                  std::to_string(config.batch_size) + ") images, got " +
                                  std::to_string(train.size()));
    }
    for (const auto& rec : train) {
        if (!rec.image.same_shape(train.front().image)) {
            throw invalid_input_error("train_encoder: training images must share dimensions");
        }
    }

    EncoderModel model;
    model.capacity = config.capacity;
    model.band_fraction = config.band_fraction;
    model.embed_from_projection = config.embed_from_projection;
    model.training_config_digest = config.digest();

    const auto [rows, cols] = target_view_shape(train.front().image.height,
                                                train.front().image.width, config.band_fraction);
    model.input_rows = rows;
    model.input_cols = cols;

    model.backbone = nn::Network::from_spec(encoder_backbone_arch(config.capacity));
    model.backbone.init({1, rows, cols}, derive_seed(config.seed, 1));
    const int feature_dim = model.backbone.output_shape().size();
    model.projection_head = nn::Network::from_spec(
        "dense " + std::to_string(feature_dim) + "|relu|dense " + std::to_string(feature_dim / 2));
    model.projection_head.init({feature_dim, 1, 1}, derive_seed(config.seed, 2));
    model.embedding_dim = config.embed_from_projection ? feature_dim / 2 : feature_dim;

    auto params = model.backbone.params();
    for (auto& p : model.projection_head.params()) params.push_back(p);
    nn::Adam optimizer(std::move(params), config.learning_rate);

    Rng shuffle_rng(derive_seed(config.seed, 3));
    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), 0);

    const int proj_dim = model.projection_head.output_shape().size();
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double epoch_loss = 0.0;
        int batches = 0;
        for (std::size_t start = 0; start + 2 <= order.size(); start += config.batch_size) {
            const std::size_t stop = std::min(order.size(), start + config.batch_size);
            const int n_pairs = static_cast<int>(stop - start);
            if (n_pairs < 2) break;  // a single pair has no negatives

            // Forward all augmented views to collect projections.
            std::vector<Eigen::VectorXd> view_inputs(2 * n_pairs);
            Eigen::MatrixXd projections(proj_dim, 2 * n_pairs);
            for (int k = 0; k < n_pairs; ++k) {
                const std::size_t idx = order[start + k];
                const std::uint64_t draw_seed =
                    derive_seed(config.seed, 0x10000ull * (epoch + 1) + start + k);
                auto [view_a, view_b] = augment_pair(train[idx].image, config, draw_seed);
                view_inputs[2 * k] = nn::image_to_input(view_a);
                view_inputs[2 * k + 1] = nn::image_to_input(view_b);
                projections.col(2 * k) =
                    model.projection_head.infer(model.backbone.infer(view_inputs[2 * k]));
                projections.col(2 * k + 1) =
                    model.projection_head.infer(model.backbone.infer(view_inputs[2 * k + 1]));
            }

            Eigen::MatrixXd dproj;
            epoch_loss += nt_xent_loss(projections, config.temperature, &dproj);
            ++batches;

            // Re-forward with caches and push each column's gradient through.
            model.backbone.zero_grads();
            model.projection_head.zero_grads();
            for (int c = 0; c < 2 * n_pairs; ++c) {
                model.projection_head.forward(model.backbone.forward(view_inputs[c]));
                model.backbone.backward(model.projection_head.backward(dproj.col(c)));
            }
            optimizer.step();
        }
        model.final_epoch_loss = batches ? epoch_loss / batches : 0.0;
    }
    return model;
}

FeatureVector embed(const EncoderModel& model, const ImageGrid& view) {
    view.require_valid();
    const ImageGrid sized = resize_bilinear(view, model.input_rows, model.input_cols);
    Eigen::VectorXd features = model.backbone.infer(nn::image_to_input(sized));
    if (model.embed_from_projection) {
        features = model.projection_head.infer(features);
    }
    FeatureVector out(features.size());
    for (int i = 0; i < features.size(); ++i) out[i] = features[i];
    return out;
}

void save_encoder(const EncoderModel& model, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw io_error("cannot create directory " + dir.string() + ": " + ec.message());

    {
        std::ofstream weights(dir / "weights.bin", std::ios::binary | std::ios::trunc);
        if (!weights) throw io_error("cannot open for writing: " + (dir / "weights.bin").string());
        const_cast<nn::Network&>(model.backbone).save_weights(weights);
        const_cast<nn::Network&>(model.projection_head).save_weights(weights);
    }
    std::ofstream meta(dir / "metadata.txt", std::ios::binary | std::ios::trunc);
    if (!meta) throw io_error("cannot open for writing: " + (dir / "metadata.txt").string());
    meta << "kind=encoder\n"
         << "capacity=" << to_string(model.capacity) << "\n"
         << "backbone_arch=" << model.backbone.spec() << "\n"
         << "head_arch=" << model.projection_head.spec() << "\n"
         << "input_rows=" << model.input_rows << "\n"
         << "input_cols=" << model.input_cols << "\n"
         << "embedding_dim=" << model.embedding_dim << "\n"
         << "feature_source=" << (model.embed_from_projection ? "projection" : "backbone") << "\n"
         << "band_fraction=" << format_double(model.band_fraction) << "\n"
         << "final_epoch_loss=" << format_double(model.final_epoch_loss) << "\n"
         << "backend=cpu-deterministic\n"
         << "config_digest=" << model.training_config_digest << "\n";
    if (!meta) throw io_error("write failed: " + (dir / "metadata.txt").string());
}

EncoderModel load_encoder(const std::filesystem::path& dir) {
    const auto meta_path = dir / "metadata.txt";
    const auto kv = read_sidecar(meta_path);
    if (sidecar_get(kv, "kind", meta_path) != "encoder") {
        throw config_error(dir.string() + " does not contain an encoder model");
    }
    EncoderModel model;
    model.capacity = capacity_from_string(sidecar_get(kv, "capacity", meta_path));
    model.input_rows = std::stoi(sidecar_get(kv, "input_rows", meta_path));
    model.input_cols = std::stoi(sidecar_get(kv, "input_cols", meta_path));
    model.embedding_dim = std::stoi(sidecar_get(kv, "embedding_dim", meta_path));
    model.embed_from_projection = sidecar_get(kv, "feature_source", meta_path) == "projection";
    model.band_fraction = std::stod(sidecar_get(kv, "band_fraction", meta_path));
    model.final_epoch_loss = std::stod(sidecar_get(kv, "final_epoch_loss", meta_path));
    model.training_config_digest = sidecar_get(kv, "config_digest", meta_path);

    model.backbone = nn::Network::from_spec(sidecar_get(kv, "backbone_arch", meta_path));
    model.backbone.init({1, model.input_rows, model.input_cols}, 0);
    const int feature_dim = model.backbone.output_shape().size();
    model.projection_head = nn::Network::from_spec(sidecar_get(kv, "head_arch", meta_path));
    model.projection_head.init({feature_dim, 1, 1}, 0);

    std::ifstream weights(dir / "weights.bin", std::ios::binary);
    if (!weights) throw io_error("cannot open: " + (dir / "weights.bin").string());
    model.backbone.load_weights(weights);
    model.projection_head.load_weights(weights);
    return model;
}

}  // namespace gcm
