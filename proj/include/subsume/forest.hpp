#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "subsume/parallel.hpp"
#include "subsume/sampler.hpp"

namespace subsume {

struct RFConfig {
    std::size_t n_trees = 100;
    std::optional<std::size_t> max_depth;      // unset = unlimited
    std::size_t min_samples_leaf = 1;
    std::size_t features_per_split = 0;        // 0 = ceil(sqrt(n_features))
    bool bootstrap = true;
    std::uint64_t seed = 0;
};

/// Array-packed decision tree. Internal nodes route x[feature] < threshold to
/// `left`; leaves store the positive-label fraction.
struct TreeNode {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double leaf_fraction = 0.0;

    bool is_leaf() const { return feature < 0; }
};

struct Tree {
    std::vector<TreeNode> nodes;
    double predict(std::span<const double> x) const;
};

struct Forest {
    std::size_t n_features = 0;
    std::vector<Tree> trees;
};

/// Bagged Gini trees over a random feature subset per split; deterministic per
/// (data, cfg) for any exec policy. Throws SingleClassData unless both labels
/// are present.
Forest train_forest(const FeatureSet& data, const RFConfig& cfg, Exec exec = Exec::openmp);

/// Mean leaf positive-fraction over all trees. Throws DimMismatch.
double predict_proba(const Forest& forest, std::span<const double> x);

/// Negated Euclidean distance; higher is better, zero is the maximum.
double distance_score(std::span<const double> a, std::span<const double> b);
double distance_score(const EmbeddingTable& table, const std::string& e1, const std::string& x);

/// Gini impurity gain of splitting (values, labels) at `threshold`. Exposed
/// for oracle comparison in tests; train_forest maximizes exactly this.
double gini_gain(std::span<const double> values, std::span<const std::uint8_t> labels,
                 double threshold);

void save_forest(const Forest& forest, std::ostream& out);
Forest load_forest(std::istream& in);

}  // namespace subsume
