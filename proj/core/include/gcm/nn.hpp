#pragma once

#include <Eigen/Core>

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "gcm/rng.hpp"
#include "gcm/types.hpp"

namespace gcm::nn {

/// Feature-map shape, channel-major flat storage: index = (c*H + r)*W + col.
struct Shape3 {
    int c = 1;
    int h = 0;
    int w = 0;
    int size() const { return c * h * w; }
    bool operator==(const Shape3&) const = default;
};

struct ParamRef {
    double* value = nullptr;
    double* grad = nullptr;
    int size = 0;
};

/// Single-sample layer with an in-flight cache: forward() stores whatever
/// backward() needs for the most recent sample, so training loops run
/// backward immediately after the matching forward. infer() is the cache-free
/// const path used at prediction time; it is safe for concurrent callers.
class Layer {
public:
    virtual ~Layer() = default;
    virtual void init(Shape3 in, Rng& rng) = 0;
    virtual Shape3 output_shape() const = 0;
    virtual Eigen::VectorXd forward(const Eigen::VectorXd& x) = 0;
    virtual Eigen::VectorXd infer(const Eigen::VectorXd& x) const = 0;
    virtual Eigen::VectorXd backward(const Eigen::VectorXd& dy) = 0;
    virtual void collect_params(std::vector<ParamRef>& out) {}
    virtual std::string spec() const = 0;
};

/// A plain sequential network. Built either programmatically or from a spec
/// string such as "pool 1 2|conv 8 5 5 2|relu|conv 16 3 3 2|relu|gap|dense 1";
/// the spec round-trips through model sidecars so saved models rebuild
/// themselves exactly.
class Network {
public:
    Network() = default;
    Network(Network&&) = default;
    Network& operator=(Network&&) = default;
    /// Deep copy: rebuilds the layer stack from the spec and copies weights.
    Network(const Network& other);
    Network& operator=(const Network& other);

    void add(std::unique_ptr<Layer> layer);

    /// Allocates parameters for the given input shape with He-normal init.
    void init(Shape3 input, std::uint64_t seed);

    Shape3 input_shape() const { return input_shape_; }
    Shape3 output_shape() const;

    Eigen::VectorXd forward(const Eigen::VectorXd& x);
    Eigen::VectorXd infer(const Eigen::VectorXd& x) const;
    Eigen::VectorXd backward(const Eigen::VectorXd& dy);

    std::vector<ParamRef> params();
    int param_count();
    void zero_grads();
    void scale_grads(double s);

    std::string spec() const;
    static Network from_spec(const std::string& spec);

    /// Raw little-endian doubles in parameter order.
    void save_weights(std::ostream& out);
    void load_weights(std::istream& in);

private:
    std::vector<std::unique_ptr<Layer>> layers_;
    Shape3 input_shape_;
    bool initialized_ = false;
};

/// Converts an image into the network input layout (single channel).
Eigen::VectorXd image_to_input(const ImageGrid& img);

/// Adam with bias correction; owns first/second moment buffers matching the
/// given parameter blocks (pass the concatenation of several networks'
/// params() to optimize them jointly).
class Adam {
public:
    Adam(std::vector<ParamRef> params, double lr, double beta1 = 0.9, double beta2 = 0.999,
         double eps = 1e-8);
    void step();
    double learning_rate = 0.0;

private:
    std::vector<ParamRef> params_;
    std::vector<Eigen::VectorXd> m_, v_;
    double beta1_, beta2_, eps_;
    long t_ = 0;
};

}  // namespace gcm::nn
