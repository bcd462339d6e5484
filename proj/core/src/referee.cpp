#include "gcm/referee.hpp"

#include <cmath>
#include <fstream>
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

}  // namespace

const char* to_string(BackboneCapacity c) {
    switch (c) {
        case BackboneCapacity::tiny: return "tiny";
        case BackboneCapacity::small: return "small";
        case BackboneCapacity::paper_scale: return "paper-scale";
    }
    return "?";
}

BackboneCapacity capacity_from_string(const std::string& s) {
    if (s == "tiny") return BackboneCapacity::tiny;
    if (s == "small") return BackboneCapacity::small;
    if (s == "paper-scale" || s == "paper_scale") return BackboneCapacity::paper_scale;
    throw config_error("unknown backbone capacity '" + s + "' (expected tiny|small|paper-scale)");
}

std::string referee_arch(BackboneCapacity capacity) {
    switch (capacity) {
        case BackboneCapacity::tiny:
            return "pool 1 2|conv 8 5 5 2|relu|conv 16 3 3 2|relu|conv 32 3 3 2|relu|gap|"
                   "dense 32|relu|dense 1";
        case BackboneCapacity::small:
            return "pool 1 2|conv 12 7 5 2|relu|conv 24 3 3 2|relu|conv 48 3 3 2|relu|gap|"
                   "dense 48|relu|dense 1";
        case BackboneCapacity::paper_scale:
            return "conv 16 7 7 2|relu|conv 32 3 3 1|relu|conv 32 3 3 2|relu|conv 64 3 3 1|relu|"
                   "conv 64 3 3 2|relu|conv 128 3 3 2|relu|gap|dense 128|relu|dense 1";
    }
    throw config_error("unknown capacity");
}

void RefereeTrainConfig::validate() const {
    if (epochs < 1) throw config_error("RefereeTrainConfig: epochs must be >= 1");
    if (batch_size < 1) throw config_error("RefereeTrainConfig: batch_size must be >= 1");
    if (!(learning_rate > 0.0)) throw config_error("RefereeTrainConfig: learning_rate must be > 0");
    if (band_fraction < 0.0 || band_fraction >= 1.0) {
        throw config_error("RefereeTrainConfig: band_fraction must be in [0,1)");
    }
}

std::string RefereeTrainConfig::digest() const {
    std::ostringstream ss;
    ss << "referee;epochs=" << epochs << ";batch=" << batch_size << ";lr=" << format_double(learning_rate)
       << ";seed=" << seed << ";capacity=" << to_string(backbone_capacity)
       << ";band=" << format_double(band_fraction);
    return string_digest(ss.str());
}

ImageGrid referee_view(const ImageGrid& image, Side side, double band_fraction) {
    if (band_fraction > 0.0) {
        return half_view(remove_central_band(image, band_fraction), side);
    }
    return half_view(image, side);
}

RefereeModel train_referee(std::span<const SubjectRecord> train, Attribute attribute, Side side,
                           const RefereeTrainConfig& config) {
    config.validate();
    if (train.empty()) throw invalid_input_error("train_referee: empty training set");
    for (const auto& rec : train) {
        if (!rec.image.same_shape(train.front().image)) {
            throw invalid_input_error("train_referee: training images must share dimensions");
        }
    }

    RefereeModel model;
    model.attribute = attribute;
    model.side = side;
    model.capacity = config.backbone_capacity;
    model.band_fraction = config.band_fraction;
    model.training_config_digest = config.digest();

    // Precompute views once; the crop geometry matches evaluation exactly.
    std::vector<Eigen::VectorXd> inputs;
    std::vector<double> labels;
    inputs.reserve(train.size());
    labels.reserve(train.size());
    for (const auto& rec : train) {
        const ImageGrid view = referee_view(rec.image, side, config.band_fraction);
        if (inputs.empty()) {
            model.input_rows = view.height;
            model.input_cols = view.width;
        }
        inputs.push_back(nn::image_to_input(view));
        labels.push_back(rec.attributes.get(attribute));
    }

    // Standardize labels so one learning rate works across attribute units.
    const double n = static_cast<double>(labels.size());
    const double mean = std::accumulate(labels.begin(), labels.end(), 0.0) / n;
    double var = 0.0;
    for (double y : labels) var += (y - mean) * (y - mean);
    const double scale = std::max(std::sqrt(var / n), 1e-9);
    model.label_mean = mean;
    model.label_scale = scale;

    model.net = nn::Network::from_spec(referee_arch(config.backbone_capacity));
    model.net.init({1, model.input_rows, model.input_cols}, derive_seed(config.seed, 1));

    nn::Adam optimizer(model.net.params(), config.learning_rate);
    Rng shuffle_rng(derive_seed(config.seed, 2));

    std::vector<std::size_t> order(inputs.size());
    std::iota(order.begin(), order.end(), 0);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t stop = std::min(order.size(), start + config.batch_size);
            model.net.zero_grads();
            for (std::size_t k = start; k < stop; ++k) {
                const std::size_t idx = order[k];
                const Eigen::VectorXd out = model.net.forward(inputs[idx]);
                const double target = (labels[idx] - mean) / scale;
                const double diff = out[0] - target;
                Eigen::VectorXd dout(1);
                dout[0] = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
                model.net.backward(dout);
            }
            model.net.scale_grads(1.0 / static_cast<double>(stop - start));
            optimizer.step();
        }
    }
    return model;
}

double predict_attribute(const RefereeModel& model, const ImageGrid& view) {
    view.require_valid();
    if (view.height != model.input_rows || view.width != model.input_cols) {
        throw invalid_input_error("predict_attribute: view " + std::to_string(view.height) + "x" +
                                  std::to_string(view.width) + " does not match model input " +
                                  std::to_string(model.input_rows) + "x" +
                                  std::to_string(model.input_cols));
    }
    const Eigen::VectorXd out = model.net.infer(nn::image_to_input(view));
    return out[0] * model.label_scale + model.label_mean;
}

MaeStats validate_referee(const RefereeModel& model, std::span<const SubjectRecord> val) {
    if (val.empty()) throw invalid_input_error("validate_referee: empty validation set");
    std::vector<double> errors;
    errors.reserve(val.size());
    for (const auto& rec : val) {
        const ImageGrid view = referee_view(rec.image, model.side, model.band_fraction);
        errors.push_back(std::abs(predict_attribute(model, view) - rec.attributes.get(model.attribute)));
    }
    MaeStats stats;
    stats.count = static_cast<int>(errors.size());
    stats.mean = std::accumulate(errors.begin(), errors.end(), 0.0) / errors.size();
    if (errors.size() > 1) {
        double ss = 0.0;
        for (double e : errors) ss += (e - stats.mean) * (e - stats.mean);
        stats.stddev = std::sqrt(ss / (errors.size() - 1));
    }
    return stats;
}

std::string referee_dir_name(Attribute attribute, Side side) {
    return std::string("referee_") + to_string(attribute) + "_" + to_string(side);
}

void save_referee(const RefereeModel& model, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw io_error("cannot create directory " + dir.string() + ": " + ec.message());

    {
        std::ofstream weights(dir / "weights.bin", std::ios::binary | std::ios::trunc);
        if (!weights) throw io_error("cannot open for writing: " + (dir / "weights.bin").string());
        const_cast<nn::Network&>(model.net).save_weights(weights);
    }
    std::ofstream meta(dir / "metadata.txt", std::ios::binary | std::ios::trunc);
    if (!meta) throw io_error("cannot open for writing: " + (dir / "metadata.txt").string());
    meta << "kind=referee\n"
         << "attribute=" << to_string(model.attribute) << "\n"
         << "side=" << to_string(model.side) << "\n"
         << "capacity=" << to_string(model.capacity) << "\n"
         << "arch=" << model.net.spec() << "\n"
         << "input_rows=" << model.input_rows << "\n"
         << "input_cols=" << model.input_cols << "\n"
         << "band_fraction=" << format_double(model.band_fraction) << "\n"
         << "label_mean=" << format_double(model.label_mean) << "\n"
         << "label_scale=" << format_double(model.label_scale) << "\n"
         << "backend=cpu-deterministic\n"
         << "config_digest=" << model.training_config_digest << "\n";
    if (!meta) throw io_error("write failed: " + (dir / "metadata.txt").string());
}

RefereeModel load_referee(const std::filesystem::path& dir) {
    const auto meta_path = dir / "metadata.txt";
    const auto kv = read_sidecar(meta_path);
    if (sidecar_get(kv, "kind", meta_path) != "referee") {
        throw config_error(dir.string() + " does not contain a referee model");
    }
    RefereeModel model;
    model.attribute = attribute_from_string(sidecar_get(kv, "attribute", meta_path));
    model.side = side_from_string(sidecar_get(kv, "side", meta_path));
    model.capacity = capacity_from_string(sidecar_get(kv, "capacity", meta_path));
    model.input_rows = std::stoi(sidecar_get(kv, "input_rows", meta_path));
    model.input_cols = std::stoi(sidecar_get(kv, "input_cols", meta_path));
    model.band_fraction = std::stod(sidecar_get(kv, "band_fraction", meta_path));
    model.label_mean = std::stod(sidecar_get(kv, "label_mean", meta_path));
    model.label_scale = std::stod(sidecar_get(kv, "label_scale", meta_path));
    model.training_config_digest = sidecar_get(kv, "config_digest", meta_path);

    model.net = nn::Network::from_spec(sidecar_get(kv, "arch", meta_path));
    model.net.init({1, model.input_rows, model.input_cols}, 0);
    std::ifstream weights(dir / "weights.bin", std::ios::binary);
    if (!weights) throw io_error("cannot open: " + (dir / "weights.bin").string());
    model.net.load_weights(weights);
    return model;
}

}  // namespace gcm
