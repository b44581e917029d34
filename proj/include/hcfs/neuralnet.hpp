#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

#include "hcfs/errors.hpp"

namespace hcfs {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class Activation { Identity, Relu, Tanh };

struct Layer {
    MatrixXd w;  // out x in
    VectorXd b;  // out
    Activation act = Activation::Identity;
};

// Dense feed-forward net. Parameters are plain values; copying copies the
// whole net.
struct Mlp {
    std::vector<Layer> layers;

    int input_dim() const { return layers.empty() ? 0 : static_cast<int>(layers.front().w.cols()); }
    int output_dim() const { return layers.empty() ? 0 : static_cast<int>(layers.back().w.rows()); }
    std::vector<int> dims() const;
};

// Random net with the given layer widths: hidden weights uniform in
// +-1/sqrt(fan_in), the final layer uniform in +-final_scale so initial
// outputs sit near zero.
Mlp make_mlp(const std::vector<int>& dims, Activation hidden, Activation output,
             std::mt19937_64& rng, double final_scale = 3e-3);

// Activations recorded by a forward pass, consumed by backward.
struct ForwardCache {
    MatrixXd input;
    std::vector<MatrixXd> pre;   // affine outputs z_l
    std::vector<MatrixXd> post;  // activation(z_l)
};

// Batched forward pass; x is input_dim x batch. Records into cache if given.
MatrixXd forward(const Mlp& net, const MatrixXd& x, ForwardCache* cache = nullptr);
VectorXd forward(const Mlp& net, const VectorXd& x);

struct MlpGrads {
    std::vector<MatrixXd> w;
    std::vector<VectorXd> b;
};

// Exact reverse-mode gradients of sum_j upstream(:,j) . output(:,j) with
// respect to every parameter, and optionally the input.
MlpGrads backward(const Mlp& net, const ForwardCache& cache, const MatrixXd& upstream,
                  MatrixXd* input_grad = nullptr);

// Bias-corrected adaptive-moment optimizer state, shaped like the net.
struct AdamState {
    std::vector<MatrixXd> mw, vw;
    std::vector<VectorXd> mb, vb;
    long step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

AdamState make_adam_state(const Mlp& net);
void adam_step(Mlp& net, const MlpGrads& grads, AdamState& state, double lr);

// target <- tau*source + (1-tau)*target, elementwise.
void soft_update(Mlp& target, const Mlp& source, double tau);

// One layer per block: a line of weight entries in row-major order, then a
// line of bias entries, shortest round-trip decimals.
void write_mlp_layers(std::ostream& out, const Mlp& net);
// Reads layer blocks for a net whose shapes and activations are already set.
// `lineno` tracks the 1-based position in the surrounding file.
void read_mlp_layers(std::istream& in, Mlp& net, int& lineno);

}  // namespace hcfs
