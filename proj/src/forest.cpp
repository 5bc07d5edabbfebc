#include "subsume/forest.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "subsume/error.hpp"
#include "subsume/rng.hpp"

namespace subsume {

namespace {

double gini(std::size_t pos, std::size_t total) {
    if (total == 0) return 0.0;
    const double p = static_cast<double>(pos) / static_cast<double>(total);
    return 1.0 - p * p - (1.0 - p) * (1.0 - p);
}

struct BestSplit {
    double gain = 0.0;
    std::int32_t feature = -1;
    double threshold = 0.0;
};

class TreeBuilder {
public:
    TreeBuilder(const FeatureSet& data, const RFConfig& cfg, std::size_t k_features, Rng rng)
        : data_(data), cfg_(cfg), k_features_(k_features), rng_(rng) {
        feature_pool_.resize(data.n_features);
        for (std::uint32_t f = 0; f < feature_pool_.size(); ++f) feature_pool_[f] = f;
    }

    Tree build(std::vector<std::uint32_t> samples) {
        Tree tree;
        grow(tree, std::move(samples), 0);
        return tree;
    }

private:
    std::int32_t grow(Tree& tree, std::vector<std::uint32_t> samples, std::size_t depth) {
        const std::size_t n = samples.size();
        std::size_t pos = 0;
        for (std::uint32_t s : samples) pos += data_.labels[s];

        const std::int32_t node_id = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.emplace_back();

        const bool pure = pos == 0 || pos == n;
        const bool depth_capped = cfg_.max_depth && depth >= *cfg_.max_depth;
        const bool too_small = n < 2 * cfg_.min_samples_leaf;
        BestSplit best;
        if (!pure && !depth_capped && !too_small) best = find_split(samples, pos);

        if (best.feature < 0) {
            tree.nodes[node_id].leaf_fraction = static_cast<double>(pos) / static_cast<double>(n);
            return node_id;
        }

        std::vector<std::uint32_t> left, right;
        left.reserve(n);
        right.reserve(n);
        for (std::uint32_t s : samples) {
            const double v = data_.row(s)[static_cast<std::size_t>(best.feature)];
            (v < best.threshold ? left : right).push_back(s);
        }
        samples.clear();
        samples.shrink_to_fit();

        tree.nodes[node_id].feature = best.feature;
        tree.nodes[node_id].threshold = best.threshold;
        const std::int32_t l = grow(tree, std::move(left), depth + 1);
        tree.nodes[node_id].left = l;
        const std::int32_t r = grow(tree, std::move(right), depth + 1);
        tree.nodes[node_id].right = r;
        return node_id;
    }

    // Best Gini split over a freshly drawn feature subset; candidates are the
    // midpoints between consecutive distinct values. Ties resolve to the
    // lowest feature index, then the lowest threshold, via the strict `>` and
    // the ascending scan order.
    BestSplit find_split(const std::vector<std::uint32_t>& samples, std::size_t pos_total) {
        const std::size_t n = samples.size();
        const double parent = gini(pos_total, n);

        std::vector<std::uint32_t> chosen(k_features_);
        for (std::size_t i = 0; i < k_features_; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng_.below(feature_pool_.size() - i));
            std::swap(feature_pool_[i], feature_pool_[j]);
            chosen[i] = feature_pool_[i];
        }
        std::sort(chosen.begin(), chosen.end());

        BestSplit best;
        std::vector<std::pair<double, std::uint8_t>> column(n);
        for (std::uint32_t f : chosen) {
            for (std::size_t i = 0; i < n; ++i)
                column[i] = {data_.row(samples[i])[f], data_.labels[samples[i]]};
            std::sort(column.begin(), column.end());

            std::size_t left_n = 0, left_pos = 0;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                ++left_n;
                left_pos += column[i].second;
                if (column[i].first == column[i + 1].first) continue;
                const std::size_t right_n = n - left_n;
                if (left_n < cfg_.min_samples_leaf || right_n < cfg_.min_samples_leaf) continue;
                const double threshold = 0.5 * (column[i].first + column[i + 1].first);
                const double gain = parent -
                                    (static_cast<double>(left_n) / static_cast<double>(n)) *
                                        gini(left_pos, left_n) -
                                    (static_cast<double>(right_n) / static_cast<double>(n)) *
                                        gini(pos_total - left_pos, right_n);
                if (gain > best.gain) {
                    best.gain = gain;
                    best.feature = static_cast<std::int32_t>(f);
                    best.threshold = threshold;
                }
            }
        }
        return best;
    }

    const FeatureSet& data_;
    const RFConfig& cfg_;
    std::size_t k_features_;
    Rng rng_;
    std::vector<std::uint32_t> feature_pool_;
};

}  // namespace

double Tree::predict(std::span<const double> x) const {
    std::int32_t node = 0;
    while (!nodes[static_cast<std::size_t>(node)].is_leaf()) {
        const TreeNode& nd = nodes[static_cast<std::size_t>(node)];
        node = x[static_cast<std::size_t>(nd.feature)] < nd.threshold ? nd.left : nd.right;
    }
    return nodes[static_cast<std::size_t>(node)].leaf_fraction;
}

double gini_gain(std::span<const double> values, std::span<const std::uint8_t> labels,
                 double threshold) {
    std::size_t n = values.size(), pos = 0, left_n = 0, left_pos = 0;
    for (std::size_t i = 0; i < n; ++i) {
        pos += labels[i];
        if (values[i] < threshold) {
            ++left_n;
            left_pos += labels[i];
        }
    }
    const std::size_t right_n = n - left_n;
    return gini(pos, n) -
           (static_cast<double>(left_n) / static_cast<double>(n)) * gini(left_pos, left_n) -
           (static_cast<double>(right_n) / static_cast<double>(n)) * gini(pos - left_pos, right_n);
}

Forest train_forest(const FeatureSet& data, const RFConfig& cfg, Exec exec) {
    if (data.n_rows == 0) throw SingleClassData();
    std::size_t pos = 0;
    for (std::uint8_t label : data.labels) pos += label;
    if (pos == 0 || pos == data.n_rows) throw SingleClassData();
    if (cfg.n_trees == 0) throw ConfigError("rf.n_trees", "must be positive");
    if (cfg.min_samples_leaf == 0) throw ConfigError("rf.min_samples_leaf", "must be positive");
    if (cfg.features_per_split > data.n_features)
        throw ConfigError("rf.features_per_split",
                          "exceeds feature count " + std::to_string(data.n_features));

    const std::size_t k = cfg.features_per_split > 0
                              ? cfg.features_per_split
                              : static_cast<std::size_t>(
                                    std::ceil(std::sqrt(static_cast<double>(data.n_features))));

    Forest forest;
    forest.n_features = data.n_features;
    forest.trees.resize(cfg.n_trees);

    parallel_for(exec, static_cast<std::int64_t>(cfg.n_trees), [&](std::int64_t t) {
        Rng rng(Rng::mix(cfg.seed, static_cast<std::uint64_t>(t)));
        std::vector<std::uint32_t> samples(data.n_rows);
        if (cfg.bootstrap) {
            for (auto& s : samples) s = static_cast<std::uint32_t>(rng.below(data.n_rows));
        } else {
            for (std::uint32_t i = 0; i < samples.size(); ++i) samples[i] = i;
        }
        TreeBuilder builder(data, cfg, k, rng);
        forest.trees[static_cast<std::size_t>(t)] = builder.build(std::move(samples));
    });
    return forest;
}

double predict_proba(const Forest& forest, std::span<const double> x) {
    if (x.size() != forest.n_features)
        throw DimMismatch("predict_proba: expected " + std::to_string(forest.n_features) +
                          " features, got " + std::to_string(x.size()));
    double sum = 0.0;
    for (const Tree& tree : forest.trees) sum += tree.predict(x);
    return sum / static_cast<double>(forest.trees.size());
}

double distance_score(std::span<const double> a, std::span<const double> b) {
    double sq = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sq += d * d;
    }
    return -std::sqrt(sq);
}

double distance_score(const EmbeddingTable& table, const std::string& e1, const std::string& x) {
    return distance_score(table.vec(e1), table.vec(x));
}

void save_forest(const Forest& forest, std::ostream& out) {
    out << "forest v1\n" << forest.n_features << ' ' << forest.trees.size() << '\n';
    out.precision(17);
    for (const Tree& tree : forest.trees) {
        out << "tree " << tree.nodes.size() << '\n';
        for (const TreeNode& nd : tree.nodes)
            out << nd.feature << ' ' << nd.threshold << ' ' << nd.left << ' ' << nd.right << ' '
                << nd.leaf_fraction << '\n';
    }
}

Forest load_forest(std::istream& in) {
    std::string header;
    std::getline(in, header);
    if (header != "forest v1") throw Error("forest file: bad header");
    Forest forest;
    std::size_t n_trees = 0;
    if (!(in >> forest.n_features >> n_trees)) throw Error("forest file: bad shape line");
    forest.trees.resize(n_trees);
    for (Tree& tree : forest.trees) {
        std::string tag;
        std::size_t n_nodes = 0;
        if (!(in >> tag >> n_nodes) || tag != "tree") throw Error("forest file: bad tree header");
        tree.nodes.resize(n_nodes);
        for (TreeNode& nd : tree.nodes)
            if (!(in >> nd.feature >> nd.threshold >> nd.left >> nd.right >> nd.leaf_fraction))
                throw Error("forest file: truncated nodes");
    }
    return forest;
}

}  // namespace subsume
