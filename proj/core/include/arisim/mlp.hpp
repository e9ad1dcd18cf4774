#pragma once

#include <vector>

#include <Eigen/Dense>

#include "arisim/rng.hpp"

namespace arisim {

enum class Activation { Linear, Tanh };

// Dense network with tanh hidden layers. Rows of batch matrices are samples.
class Mlp {
public:
    Mlp() = default;
    // sizes = {in, hidden..., out}; output_act applies to the last layer
    Mlp(const std::vector<int>& sizes, Activation output_act, Rng& rng);

    int input_dim() const { return weights.empty() ? 0 : static_cast<int>(weights.front().cols()); }
    int output_dim() const { return weights.empty() ? 0 : static_cast<int>(weights.back().rows()); }
    int layer_count() const { return static_cast<int>(weights.size()); }

    struct Cache {
        std::vector<Eigen::MatrixXd> acts;  // acts[0] = input, acts[L] = output
    };

    Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
    Eigen::MatrixXd forward(const Eigen::MatrixXd& x, Cache* cache = nullptr) const;

    struct Gradients {
        std::vector<Eigen::MatrixXd> w;
        std::vector<Eigen::VectorXd> b;
        Eigen::VectorXd flatten() const;
    };

    // Backpropagate d(scalar)/d(output); returns d(scalar)/d(input) and, when
    // grads is non-null, accumulates fresh parameter gradients.
    Eigen::MatrixXd backward(const Cache& cache, const Eigen::MatrixXd& out_cotangent,
                             Gradients* grads) const;

    int parameter_count() const;
    Eigen::VectorXd parameters() const;
    void set_parameters(const Eigen::VectorXd& flat);

    std::vector<Eigen::MatrixXd> weights;  // per layer, out x in
    std::vector<Eigen::VectorXd> biases;
    std::vector<Activation> acts;
};

// Adam on a flat parameter vector.
struct Adam {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    Eigen::VectorXd m, v;
    long long t = 0;

    void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);
};

} // namespace arisim
