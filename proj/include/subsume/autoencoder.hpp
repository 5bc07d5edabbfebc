#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "subsume/matrix.hpp"
#include "subsume/parallel.hpp"

namespace subsume {

/// Single-hidden-layer autoencoder weights. Input width n, code width d;
/// h = ReLU(w_in x + b_in), x' = sigmoid(w_out h + b_out).
struct AEParams {
    std::size_t n = 0;
    std::size_t d = 0;
    std::vector<double> w_in;   // d x n, row-major
    std::vector<double> b_in;   // d
    std::vector<double> w_out;  // n x d, row-major
    std::vector<double> b_out;  // n
};

struct AETrainConfig {
    std::size_t dim = 100;
    double learning_rate = 1e-3;
    std::size_t epochs = 100;
    std::size_t batch_size = 128;  // clamped to the number of rows
    std::uint64_t seed = 0;
    double beta1 = 0.9;  // adaptive-moment decay rates
    double beta2 = 0.999;
    double adam_eps = 1e-8;
};

/// Gradient buffers, same shapes as AEParams.
struct AEGradients {
    std::vector<double> w_in, b_in, w_out, b_out;
    void zero(std::size_t n, std::size_t d, Exec exec);
};

struct AEForward {
    std::vector<double> h;      // d, nonnegative
    std::vector<double> recon;  // n, in (0, 1)
};

/// Word embeddings: one d-dimensional row per matrix row.
struct WordEmbeddingMatrix {
    std::size_t n_rows = 0;
    std::size_t dim = 0;
    std::vector<double> data;  // n_rows x dim, row-major, all >= 0
    std::vector<std::string> row_labels;

    std::span<const double> row(std::size_t i) const { return {data.data() + i * dim, dim}; }
};

/// Weights uniform in +-sqrt(6/(n+d)), biases zero; bit-deterministic per seed.
AEParams init_params(std::size_t n, std::size_t d, std::uint64_t seed);

/// x is the sorted index list of the ones of a binary row of width params.n.
/// Throws NonFiniteActivation if any output is NaN or infinite.
AEForward forward(const AEParams& params, std::span<const std::uint32_t> x);

/// Binary cross-entropy with reconstruction clamped to [eps, 1-eps].
double bce_loss(std::span<const double> x, std::span<const double> recon);
inline constexpr double kBceClamp = 1e-7;

/// Adds the loss gradient of one sample to `grads` (single-threaded path of
/// the same math train() uses).
double accumulate_sample_gradient(const AEParams& params, std::span<const std::uint32_t> x,
                                  AEGradients& grads);

/// Mini-batch adaptive-moment descent over matrix rows as samples. Returns
/// trained parameters and the per-epoch mean loss. Bit-deterministic per
/// (matrix, cfg) for any exec policy and thread count.
std::pair<AEParams, std::vector<double>> train_autoencoder(const SparseBinaryMatrix& matrix,
                                                           const AETrainConfig& cfg,
                                                           Exec exec = Exec::openmp);

/// Encodes every matrix row through the trained input layer.
WordEmbeddingMatrix encode(const AEParams& params, const SparseBinaryMatrix& matrix,
                           Exec exec = Exec::openmp);

void save_params(const AEParams& params, std::ostream& out);
AEParams load_params(std::istream& in);

}  // namespace subsume
