#include "subsume/autoencoder.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "subsume/error.hpp"
#include "subsume/rng.hpp"

namespace subsume {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// NaN falls through both comparisons so a poisoned reconstruction still
// surfaces as a non-finite loss.
double clamp_unit(double p) {
    if (p < kBceClamp) return kBceClamp;
    if (p > 1.0 - kBceClamp) return 1.0 - kBceClamp;
    return p;
}

// Fixed column blocking: the output phase parallelizes over blocks, and the
// per-block loss partial sums reduce serially afterwards, which keeps every
// result bit-identical for any thread count.
constexpr std::size_t kColumnBlock = 256;

struct Workspace {
    std::size_t n = 0, d = 0;
    std::vector<double> z1, h, dz1;  // batch x d
    std::vector<double> dz2;         // batch x n
    std::vector<char> x;             // batch x n dense copy of the binary rows
    std::vector<double> loss_blocks;

    void resize(std::size_t n_, std::size_t d_, std::size_t batch) {
        n = n_;
        d = d_;
        z1.resize(batch * d);
        h.resize(batch * d);
        dz1.resize(batch * d);
        dz2.resize(batch * n);
        x.resize(batch * n);
        loss_blocks.assign((n + kColumnBlock - 1) / kColumnBlock, 0.0);
    }
};

// Adds the gradient of one mini-batch inside an open parallel region. Each
// phase owns disjoint output slices and iterates samples in batch order, so
// the accumulated values do not depend on the thread count; the only
// cross-element reduction, the loss, goes through fixed column blocks.
void batch_pass(const AEParams& params, const SparseBinaryMatrix& matrix,
                std::span<const std::uint32_t> sample_ids, AEGradients& g, Workspace& w) {
    const std::int64_t batch = static_cast<std::int64_t>(sample_ids.size());
    const std::int64_t d = static_cast<std::int64_t>(params.d);
    const std::size_t n = params.n;
    const std::int64_t n_blocks = static_cast<std::int64_t>(w.loss_blocks.size());

#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
    for (std::int64_t s = 0; s < batch; ++s) {
        char* row = w.x.data() + static_cast<std::size_t>(s) * n;
        std::fill(row, row + n, 0);
        for (std::uint32_t i : matrix.rows[sample_ids[static_cast<std::size_t>(s)]]) row[i] = 1;
    }

#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
    for (std::int64_t j = 0; j < d; ++j) {
        const double* wrow = params.w_in.data() + static_cast<std::size_t>(j) * n;
        for (std::int64_t s = 0; s < batch; ++s) {
            double z = params.b_in[static_cast<std::size_t>(j)];
            for (std::uint32_t i : matrix.rows[sample_ids[static_cast<std::size_t>(s)]]) z += wrow[i];
            w.z1[static_cast<std::size_t>(s * d + j)] = z;
            w.h[static_cast<std::size_t>(s * d + j)] = z > 0.0 ? z : 0.0;
        }
    }

#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
    for (std::int64_t block = 0; block < n_blocks; ++block) {
        const std::size_t k_begin = static_cast<std::size_t>(block) * kColumnBlock;
        const std::size_t k_end = std::min(n, k_begin + kColumnBlock);
        double block_loss = 0.0;
        for (std::size_t k = k_begin; k < k_end; ++k) {
            const double* wrow = params.w_out.data() + k * params.d;
            double* grow = g.w_out.data() + k * params.d;
            for (std::int64_t s = 0; s < batch; ++s) {
                const double* hs = w.h.data() + static_cast<std::size_t>(s * d);
                double z = params.b_out[k];
                for (std::size_t j = 0; j < params.d; ++j) z += wrow[j] * hs[j];
                const double pk = sigmoid(z);
                const double xk = w.x[static_cast<std::size_t>(s) * n + k];
                const double pc = clamp_unit(pk);
                block_loss -= xk * std::log(pc) + (1.0 - xk) * std::log(1.0 - pc);
                const double delta = pk - xk;
                w.dz2[static_cast<std::size_t>(s) * n + k] = delta;
                g.b_out[k] += delta;
                for (std::size_t j = 0; j < params.d; ++j) grow[j] += delta * hs[j];
            }
        }
        w.loss_blocks[static_cast<std::size_t>(block)] += block_loss;
    }

    // back-propagate through w_out with row-major streaming, per sample
#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
    for (std::int64_t s = 0; s < batch; ++s) {
        const double* dz2s = w.dz2.data() + static_cast<std::size_t>(s) * n;
        double* dz1s = w.dz1.data() + static_cast<std::size_t>(s * d);
        std::fill(dz1s, dz1s + d, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            const double* wrow = params.w_out.data() + k * params.d;
            const double delta = dz2s[k];
            for (std::size_t j = 0; j < params.d; ++j) dz1s[j] += wrow[j] * delta;
        }
        for (std::int64_t j = 0; j < d; ++j)
            if (!(w.z1[static_cast<std::size_t>(s * d + j)] > 0.0)) dz1s[j] = 0.0;
    }

#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
    for (std::int64_t j = 0; j < d; ++j) {
        double* grow = g.w_in.data() + static_cast<std::size_t>(j) * n;
        for (std::int64_t s = 0; s < batch; ++s) {
            const double dz1 = w.dz1[static_cast<std::size_t>(s * d + j)];
            g.b_in[static_cast<std::size_t>(j)] += dz1;
            for (std::uint32_t i : matrix.rows[sample_ids[static_cast<std::size_t>(s)]]) grow[i] += dz1;
        }
    }
}

void zero_fill(std::vector<double>& v, Exec exec) {
    double* data = v.data();
    parallel_for(exec, static_cast<std::int64_t>(v.size()),
                 [data](std::int64_t i) { data[i] = 0.0; });
}

struct AdamState {
    std::vector<double> m, v;
    explicit AdamState(std::size_t size) : m(size, 0.0), v(size, 0.0) {}
};

void adam_update(std::vector<double>& theta, const std::vector<double>& grad, AdamState& state,
                 const AETrainConfig& cfg, double grad_scale, double bias1, double bias2,
                 Exec exec) {
    double* t = theta.data();
    const double* g = grad.data();
    double* m = state.m.data();
    double* v = state.v.data();
    const double lr = cfg.learning_rate;
    const double b1 = cfg.beta1, b2 = cfg.beta2, eps = cfg.adam_eps;
    parallel_for(exec, static_cast<std::int64_t>(theta.size()), [=](std::int64_t i) {
        const double gi = g[i] * grad_scale;
        m[i] = b1 * m[i] + (1.0 - b1) * gi;
        v[i] = b2 * v[i] + (1.0 - b2) * gi * gi;
        const double mhat = m[i] / bias1;
        const double vhat = v[i] / bias2;
        t[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    });
}

}  // namespace

void AEGradients::zero(std::size_t n, std::size_t d, Exec exec) {
    if (w_in.size() != n * d) {
        w_in.assign(d * n, 0.0);
        b_in.assign(d, 0.0);
        w_out.assign(n * d, 0.0);
        b_out.assign(n, 0.0);
        return;
    }
    zero_fill(w_in, exec);
    zero_fill(b_in, exec);
    zero_fill(w_out, exec);
    zero_fill(b_out, exec);
}

AEParams init_params(std::size_t n, std::size_t d, std::uint64_t seed) {
    if (n == 0 || d == 0) throw ShapeMismatch("init_params: n and d must be positive");
    AEParams params;
    params.n = n;
    params.d = d;
    const double bound = std::sqrt(6.0 / static_cast<double>(n + d));
    Rng rng(seed);
    params.w_in.resize(d * n);
    for (double& w : params.w_in) w = rng.uniform(-bound, bound);
    params.w_out.resize(n * d);
    for (double& w : params.w_out) w = rng.uniform(-bound, bound);
    params.b_in.assign(d, 0.0);
    params.b_out.assign(n, 0.0);
    return params;
}

AEForward forward(const AEParams& params, std::span<const std::uint32_t> x) {
    AEForward out;
    out.h.resize(params.d);
    out.recon.resize(params.n);
    for (std::size_t j = 0; j < params.d; ++j) {
        const double* row = params.w_in.data() + j * params.n;
        double z = params.b_in[j];
        for (std::uint32_t i : x) z += row[i];
        out.h[j] = z > 0.0 ? z : 0.0;
    }
    bool finite = true;
    for (std::size_t k = 0; k < params.n; ++k) {
        const double* row = params.w_out.data() + k * params.d;
        double z = params.b_out[k];
        for (std::size_t j = 0; j < params.d; ++j) z += row[j] * out.h[j];
        out.recon[k] = sigmoid(z);
        finite = finite && std::isfinite(out.recon[k]);
    }
    for (double h : out.h) finite = finite && std::isfinite(h);
    if (!finite) throw NonFiniteActivation();
    return out;
}

double bce_loss(std::span<const double> x, std::span<const double> recon) {
    double loss = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double p = clamp_unit(recon[k]);
        loss -= x[k] * std::log(p) + (1.0 - x[k]) * std::log(1.0 - p);
    }
    return loss;
}

double accumulate_sample_gradient(const AEParams& params, std::span<const std::uint32_t> x,
                                  AEGradients& grads) {
    if (grads.w_in.size() != params.n * params.d) grads.zero(params.n, params.d, Exec::serial);
    SparseBinaryMatrix single;
    single.n_rows = 1;
    single.n_cols = params.n;
    single.rows.emplace_back(x.begin(), x.end());
    const std::uint32_t id = 0;
    Workspace w;
    w.resize(params.n, params.d, 1);
    batch_pass(params, single, {&id, 1}, grads, w);
    double loss = 0.0;
    for (double b : w.loss_blocks) loss += b;
    return loss;
}

std::pair<AEParams, std::vector<double>> train_autoencoder(const SparseBinaryMatrix& matrix,
                                                           const AETrainConfig& cfg, Exec exec) {
    const std::size_t n = matrix.n_cols;
    const std::size_t m = matrix.n_rows;
    if (m == 0 || n == 0) throw ShapeMismatch("train_autoencoder: empty matrix");
    // d >= n trains an overcomplete code; allowed (used by the memorization
    // fixture), it just compresses nothing.
    if (cfg.dim == 0) throw ConfigError("ae.dim", "compressed dimension must be positive");
    if (cfg.learning_rate <= 0.0) throw ConfigError("ae.learning_rate", "must be positive");
    if (cfg.epochs == 0) throw ConfigError("ae.epochs", "must be positive");
    const std::size_t batch = std::max<std::size_t>(1, std::min(cfg.batch_size, m));

    AEParams params = init_params(n, cfg.dim, cfg.seed);
    AdamState st_w_in(params.w_in.size()), st_b_in(params.b_in.size());
    AdamState st_w_out(params.w_out.size()), st_b_out(params.b_out.size());
    AEGradients grads;
    grads.zero(n, cfg.dim, exec);
    Workspace work;
    work.resize(n, cfg.dim, batch);

    std::vector<std::uint32_t> order(m);
    for (std::uint32_t i = 0; i < m; ++i) order[i] = i;

    std::vector<double> history;
    history.reserve(cfg.epochs);
    std::size_t step = 0;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        Rng shuffle_rng(Rng::mix(cfg.seed, epoch));
        shuffle_in_place(order.data(), order.size(), shuffle_rng);

        double epoch_loss = 0.0;
        for (std::size_t begin = 0; begin < m; begin += batch) {
            const std::size_t end = std::min(m, begin + batch);
            grads.zero(n, cfg.dim, exec);
            zero_fill(work.loss_blocks, exec);

#ifdef _OPENMP
#pragma omp parallel if (exec == Exec::openmp)
#endif
            {
                batch_pass(params, matrix, {order.data() + begin, end - begin}, grads, work);
            }

            for (double b : work.loss_blocks) epoch_loss += b;

            ++step;
            const double bias1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
            const double bias2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
            const double scale = 1.0 / static_cast<double>(end - begin);
            adam_update(params.w_in, grads.w_in, st_w_in, cfg, scale, bias1, bias2, exec);
            adam_update(params.b_in, grads.b_in, st_b_in, cfg, scale, bias1, bias2, exec);
            adam_update(params.w_out, grads.w_out, st_w_out, cfg, scale, bias1, bias2, exec);
            adam_update(params.b_out, grads.b_out, st_b_out, cfg, scale, bias1, bias2, exec);
        }

        const double mean_loss = epoch_loss / static_cast<double>(m);
        if (!std::isfinite(mean_loss)) throw DivergedLoss();
        history.push_back(mean_loss);
    }
    return {std::move(params), std::move(history)};
}

WordEmbeddingMatrix encode(const AEParams& params, const SparseBinaryMatrix& matrix, Exec exec) {
    if (matrix.n_cols != params.n)
        throw ShapeMismatch("encode: matrix width " + std::to_string(matrix.n_cols) +
                            " != params width " + std::to_string(params.n));
    WordEmbeddingMatrix out;
    out.n_rows = matrix.n_rows;
    out.dim = params.d;
    out.data.resize(out.n_rows * out.dim);
    out.row_labels = matrix.row_labels;

    parallel_for(exec, static_cast<std::int64_t>(matrix.n_rows), [&](std::int64_t r) {
        const auto& nz = matrix.rows[static_cast<std::size_t>(r)];
        double* dst = out.data.data() + static_cast<std::size_t>(r) * params.d;
        for (std::size_t j = 0; j < params.d; ++j) {
            const double* row = params.w_in.data() + j * params.n;
            double z = params.b_in[j];
            for (std::uint32_t i : nz) z += row[i];
            dst[j] = z > 0.0 ? z : 0.0;
        }
    });
    return out;
}

void save_params(const AEParams& params, std::ostream& out) {
    out << "aeparams v1\n" << params.n << ' ' << params.d << '\n';
    out.precision(17);
    auto write = [&](const std::vector<double>& v) {
        for (std::size_t i = 0; i < v.size(); ++i) out << v[i] << (i + 1 == v.size() ? '\n' : ' ');
        if (v.empty()) out << '\n';
    };
    write(params.w_in);
    write(params.b_in);
    write(params.w_out);
    write(params.b_out);
}

AEParams load_params(std::istream& in) {
    std::string header;
    std::getline(in, header);
    if (header != "aeparams v1") throw Error("params file: bad header");
    AEParams params;
    if (!(in >> params.n >> params.d)) throw Error("params file: bad shape line");
    auto read = [&](std::vector<double>& v, std::size_t size) {
        v.resize(size);
        for (double& x : v)
            if (!(in >> x)) throw Error("params file: truncated values");
    };
    read(params.w_in, params.d * params.n);
    read(params.b_in, params.d);
    read(params.w_out, params.n * params.d);
    read(params.b_out, params.n);
    return params;
}

}  // namespace subsume
