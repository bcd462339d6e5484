#include "gcm/nn.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "gcm/error.hpp"

namespace gcm::nn {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

class AvgPool final : public Layer {
public:
    AvgPool(int ph, int pw) : ph_(ph), pw_(pw) {}

    void init(Shape3 in, Rng&) override {
        if (in.h < ph_ || in.w < pw_) throw invalid_input_error("AvgPool: input smaller than pool");
        in_ = in;
        out_ = {in.c, in.h / ph_, in.w / pw_};
    }
    Shape3 output_shape() const override { return out_; }

    VectorXd forward(const VectorXd& x) override { return infer(x); }

    VectorXd infer(const VectorXd& x) const override {
        VectorXd y(out_.size());
        const double inv = 1.0 / (ph_ * pw_);
        for (int c = 0; c < in_.c; ++c) {
            for (int r = 0; r < out_.h; ++r) {
                for (int col = 0; col < out_.w; ++col) {
                    double acc = 0.0;
                    for (int dr = 0; dr < ph_; ++dr) {
                        for (int dc = 0; dc < pw_; ++dc) {
                            acc += x[(c * in_.h + r * ph_ + dr) * in_.w + col * pw_ + dc];
                        }
                    }
                    y[(c * out_.h + r) * out_.w + col] = acc * inv;
                }
            }
        }
        return y;
    }

    VectorXd backward(const VectorXd& dy) override {
        VectorXd dx = VectorXd::Zero(in_.size());
        const double inv = 1.0 / (ph_ * pw_);
        for (int c = 0; c < in_.c; ++c) {
            for (int r = 0; r < out_.h; ++r) {
                for (int col = 0; col < out_.w; ++col) {
                    const double g = dy[(c * out_.h + r) * out_.w + col] * inv;
                    for (int dr = 0; dr < ph_; ++dr) {
                        for (int dc = 0; dc < pw_; ++dc) {
                            dx[(c * in_.h + r * ph_ + dr) * in_.w + col * pw_ + dc] += g;
                        }
                    }
                }
            }
        }
        return dx;
    }

    std::string spec() const override {
        return "pool " + std::to_string(ph_) + " " + std::to_string(pw_);
    }

private:
    int ph_, pw_;
    Shape3 in_, out_;
};

class Conv2d final : public Layer {
public:
    Conv2d(int cout, int kh, int kw, int stride) : cout_(cout), kh_(kh), kw_(kw), stride_(stride) {}

    void init(Shape3 in, Rng& rng) override {
        in_ = in;
        if (in.h < kh_ || in.w < kw_) throw invalid_input_error("Conv2d: input smaller than kernel");
        out_ = {cout_, (in.h - kh_) / stride_ + 1, (in.w - kw_) / stride_ + 1};
        const int fan_in = in.c * kh_ * kw_;
        weight_.resize(cout_, fan_in);
        const double std_dev = std::sqrt(2.0 / fan_in);
        for (int i = 0; i < weight_.rows(); ++i) {
            for (int j = 0; j < weight_.cols(); ++j) weight_(i, j) = rng.normal(0.0, std_dev);
        }
        bias_ = VectorXd::Zero(cout_);
        dweight_ = MatrixXd::Zero(weight_.rows(), weight_.cols());
        dbias_ = VectorXd::Zero(cout_);
    }
    Shape3 output_shape() const override { return out_; }

    VectorXd forward(const VectorXd& x) override {
        im2col(x, cols_);
        return apply(cols_);
    }

    VectorXd infer(const VectorXd& x) const override {
        MatrixXd cols;
        im2col(x, cols);
        return apply(cols);
    }

    VectorXd backward(const VectorXd& dy) override {
        const int plane = out_.h * out_.w;
        MatrixXd dY(cout_, plane);
        for (int c = 0; c < cout_; ++c) {
            dY.row(c) = dy.segment(c * plane, plane).transpose();
        }
        dweight_.noalias() += dY * cols_.transpose();
        dbias_ += dY.rowwise().sum();
        const MatrixXd dcols = weight_.transpose() * dY;
        return col2im(dcols);
    }

    void collect_params(std::vector<ParamRef>& out) override {
        out.push_back({weight_.data(), dweight_.data(), static_cast<int>(weight_.size())});
        out.push_back({bias_.data(), dbias_.data(), static_cast<int>(bias_.size())});
    }

    std::string spec() const override {
        return "conv " + std::to_string(cout_) + " " + std::to_string(kh_) + " " +
               std::to_string(kw_) + " " + std::to_string(stride_);
    }

private:
    VectorXd apply(const MatrixXd& cols) const {
        MatrixXd y = weight_ * cols;
        y.colwise() += bias_;
        VectorXd out(out_.size());
        const int plane = out_.h * out_.w;
        for (int c = 0; c < cout_; ++c) {
            out.segment(c * plane, plane) = y.row(c).transpose();
        }
        return out;
    }

    void im2col(const VectorXd& x, MatrixXd& cols) const {
        const int rows = in_.c * kh_ * kw_;
        cols.resize(rows, out_.h * out_.w);
        for (int orow = 0; orow < out_.h; ++orow) {
            for (int ocol = 0; ocol < out_.w; ++ocol) {
                const int col_idx = orow * out_.w + ocol;
                int row_idx = 0;
                for (int c = 0; c < in_.c; ++c) {
                    for (int dr = 0; dr < kh_; ++dr) {
                        const int src = (c * in_.h + orow * stride_ + dr) * in_.w + ocol * stride_;
                        for (int dc = 0; dc < kw_; ++dc) {
                            cols(row_idx++, col_idx) = x[src + dc];
                        }
                    }
                }
            }
        }
    }

    VectorXd col2im(const MatrixXd& dcols) const {
        VectorXd dx = VectorXd::Zero(in_.size());
        for (int orow = 0; orow < out_.h; ++orow) {
            for (int ocol = 0; ocol < out_.w; ++ocol) {
                const int col_idx = orow * out_.w + ocol;
                int row_idx = 0;
                for (int c = 0; c < in_.c; ++c) {
                    for (int dr = 0; dr < kh_; ++dr) {
                        const int dst = (c * in_.h + orow * stride_ + dr) * in_.w + ocol * stride_;
                        for (int dc = 0; dc < kw_; ++dc) {
                            dx[dst + dc] += dcols(row_idx++, col_idx);
                        }
                    }
                }
            }
        }
        return dx;
    }

    int cout_, kh_, kw_, stride_;
    Shape3 in_, out_;
    MatrixXd weight_, dweight_;
    VectorXd bias_, dbias_;
    MatrixXd cols_;  // im2col cache for the sample in flight
};

class Relu final : public Layer {
public:
    void init(Shape3 in, Rng&) override { shape_ = in; }
    Shape3 output_shape() const override { return shape_; }

    VectorXd forward(const VectorXd& x) override {
        mask_ = (x.array() > 0.0).cast<double>();
        return x.cwiseProduct(mask_);
    }
    VectorXd infer(const VectorXd& x) const override { return x.cwiseMax(0.0); }
    VectorXd backward(const VectorXd& dy) override { return dy.cwiseProduct(mask_); }
    std::string spec() const override { return "relu"; }

private:
    Shape3 shape_;
    VectorXd mask_;
};

class GlobalAvgPool final : public Layer {
public:
    void init(Shape3 in, Rng&) override { in_ = in; }
    Shape3 output_shape() const override { return {in_.c, 1, 1}; }

    VectorXd forward(const VectorXd& x) override { return infer(x); }
    VectorXd infer(const VectorXd& x) const override {
        VectorXd y(in_.c);
        const int plane = in_.h * in_.w;
        for (int c = 0; c < in_.c; ++c) y[c] = x.segment(c * plane, plane).mean();
        return y;
    }
    VectorXd backward(const VectorXd& dy) override {
        const int plane = in_.h * in_.w;
        VectorXd dx(in_.size());
        for (int c = 0; c < in_.c; ++c) dx.segment(c * plane, plane).setConstant(dy[c] / plane);
        return dx;
    }
    std::string spec() const override { return "gap"; }

private:
    Shape3 in_;
};

class Dense final : public Layer {
public:
    explicit Dense(int out) : out_dim_(out) {}

    void init(Shape3 in, Rng& rng) override {
        in_dim_ = in.size();
        weight_.resize(out_dim_, in_dim_);
        const double std_dev = std::sqrt(2.0 / in_dim_);
        for (int i = 0; i < weight_.rows(); ++i) {
            for (int j = 0; j < weight_.cols(); ++j) weight_(i, j) = rng.normal(0.0, std_dev);
        }
        bias_ = VectorXd::Zero(out_dim_);
        dweight_ = MatrixXd::Zero(out_dim_, in_dim_);
        dbias_ = VectorXd::Zero(out_dim_);
    }
    Shape3 output_shape() const override { return {out_dim_, 1, 1}; }

    VectorXd forward(const VectorXd& x) override {
        x_ = x;
        return weight_ * x + bias_;
    }
    VectorXd infer(const VectorXd& x) const override { return weight_ * x + bias_; }
    VectorXd backward(const VectorXd& dy) override {
        dweight_.noalias() += dy * x_.transpose();
        dbias_ += dy;
        return weight_.transpose() * dy;
    }
    void collect_params(std::vector<ParamRef>& out) override {
        out.push_back({weight_.data(), dweight_.data(), static_cast<int>(weight_.size())});
        out.push_back({bias_.data(), dbias_.data(), static_cast<int>(bias_.size())});
    }
    std::string spec() const override { return "dense " + std::to_string(out_dim_); }

private:
    int out_dim_, in_dim_ = 0;
    MatrixXd weight_, dweight_;
    VectorXd bias_, dbias_;
    VectorXd x_;
};

}  // namespace

Network::Network(const Network& other) { *this = other; }

Network& Network::operator=(const Network& other) {
    if (this == &other) return *this;
    Network rebuilt = from_spec(other.spec());
    if (other.initialized_) {
        rebuilt.init(other.input_shape_, 0);
        auto src = const_cast<Network&>(other).params();
        auto dst = rebuilt.params();
        for (std::size_t i = 0; i < src.size(); ++i) {
            std::copy(src[i].value, src[i].value + src[i].size, dst[i].value);
        }
    }
    *this = std::move(rebuilt);
    return *this;
}

void Network::add(std::unique_ptr<Layer> layer) { layers_.push_back(std::move(layer)); }

void Network::init(Shape3 input, std::uint64_t seed) {
    input_shape_ = input;
    Rng rng(seed);
    Shape3 shape = input;
    for (auto& layer : layers_) {
        layer->init(shape, rng);
        shape = layer->output_shape();
    }
    initialized_ = true;
}

Shape3 Network::output_shape() const {
    if (layers_.empty()) return input_shape_;
    return layers_.back()->output_shape();
}

Eigen::VectorXd Network::forward(const Eigen::VectorXd& x) {
    if (!initialized_) throw config_error("Network::forward before init");
    Eigen::VectorXd v = x;
    for (auto& layer : layers_) v = layer->forward(v);
    return v;
}

Eigen::VectorXd Network::infer(const Eigen::VectorXd& x) const {
    if (!initialized_) throw config_error("Network::infer before init");
    Eigen::VectorXd v = x;
    for (const auto& layer : layers_) v = layer->infer(v);
    return v;
}

Eigen::VectorXd Network::backward(const Eigen::VectorXd& dy) {
    Eigen::VectorXd v = dy;
    for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) v = (*it)->backward(v);
    return v;
}

std::vector<ParamRef> Network::params() {
    std::vector<ParamRef> out;
    for (auto& layer : layers_) layer->collect_params(out);
    return out;
}

int Network::param_count() {
    int n = 0;
    for (const auto& p : params()) n += p.size;
    return n;
}

void Network::zero_grads() {
    for (auto& p : params()) {
        for (int i = 0; i < p.size; ++i) p.grad[i] = 0.0;
    }
}

void Network::scale_grads(double s) {
    for (auto& p : params()) {
        for (int i = 0; i < p.size; ++i) p.grad[i] *= s;
    }
}

std::string Network::spec() const {
    std::string out;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        if (i) out += "|";
        out += layers_[i]->spec();
    }
    return out;
}

Network Network::from_spec(const std::string& spec) {
    Network net;
    std::stringstream ss(spec);
    std::string part;
    while (std::getline(ss, part, '|')) {
        std::stringstream ps(part);
        std::string kind;
        ps >> kind;
        if (kind == "pool") {
            int ph = 0, pw = 0;
            ps >> ph >> pw;
            net.add(std::make_unique<AvgPool>(ph, pw));
        } else if (kind == "conv") {
            int cout = 0, kh = 0, kw = 0, stride = 0;
            ps >> cout >> kh >> kw >> stride;
            net.add(std::make_unique<Conv2d>(cout, kh, kw, stride));
        } else if (kind == "relu") {
            net.add(std::make_unique<Relu>());
        } else if (kind == "gap") {
            net.add(std::make_unique<GlobalAvgPool>());
        } else if (kind == "dense") {
            int out = 0;
            ps >> out;
            net.add(std::make_unique<Dense>(out));
        } else if (!kind.empty()) {
            throw config_error("Network::from_spec: unknown layer '" + kind + "'");
        }
    }
    return net;
}

void Network::save_weights(std::ostream& out) {
    for (auto& p : params()) {
        out.write(reinterpret_cast<const char*>(p.value), sizeof(double) * p.size);
    }
}

void Network::load_weights(std::istream& in) {
    for (auto& p : params()) {
        in.read(reinterpret_cast<char*>(p.value), sizeof(double) * p.size);
        if (!in) throw io_error("Network::load_weights: truncated weight stream");
    }
}

Eigen::VectorXd image_to_input(const ImageGrid& img) {
    Eigen::VectorXd v(img.pixels.size());
    for (std::size_t i = 0; i < img.pixels.size(); ++i) v[i] = img.pixels[i] - 0.5;
    return v;
}

Adam::Adam(std::vector<ParamRef> params, double lr, double beta1, double beta2, double eps)
    : learning_rate(lr), params_(std::move(params)), beta1_(beta1), beta2_(beta2), eps_(eps) {
    for (const auto& p : params_) {
        m_.push_back(Eigen::VectorXd::Zero(p.size));
        v_.push_back(Eigen::VectorXd::Zero(p.size));
    }
}

void Adam::step() {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t k = 0; k < params_.size(); ++k) {
        auto& p = params_[k];
        for (int i = 0; i < p.size; ++i) {
            const double g = p.grad[i];
            m_[k][i] = beta1_ * m_[k][i] + (1.0 - beta1_) * g;
            v_[k][i] = beta2_ * v_[k][i] + (1.0 - beta2_) * g * g;
            const double mhat = m_[k][i] / bc1;
            const double vhat = v_[k][i] / bc2;
            p.value[i] -= learning_rate * mhat / (std::sqrt(vhat) + eps_);
        }
    }
}

}  // namespace gcm::nn
