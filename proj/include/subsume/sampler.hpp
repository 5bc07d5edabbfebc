#pragma once

#include <cstdint>
#include <iosfwd>
#include <unordered_set>
#include <vector>

#include "subsume/embedding.hpp"
#include "subsume/ontology.hpp"

namespace subsume {

using PairVec = std::vector<EntityPair>;

/// Hash set over (sub, sup) pairs packed into one 64-bit key.
class PairKeySet {
public:
    PairKeySet() = default;
    explicit PairKeySet(const PairVec& pairs) {
        keys_.reserve(pairs.size());
        for (const EntityPair& p : pairs) insert(p);
    }
    static std::uint64_t key(EntityPair p) {
        return (static_cast<std::uint64_t>(p.first) << 32) | p.second;
    }
    void insert(EntityPair p) { keys_.insert(key(p)); }
    bool contains(EntityPair p) const { return keys_.count(key(p)) > 0; }
    std::size_t size() const { return keys_.size(); }

private:
    std::unordered_set<std::uint64_t> keys_;
};

struct PairSplit {
    PairVec train_pos;
    PairVec valid;
    PairVec test;
};

struct LabeledPairSet {
    PairVec positives;      // S+_train
    PairVec negatives;      // S-, one per positive
    PairVec self_matching;  // (e, e) for every entity
};

/// Label-1 and label-0 feature rows, each V(sub) followed by V(sup).
struct FeatureSet {
    std::size_t n_rows = 0;
    std::size_t n_features = 0;
    std::vector<double> rows;  // row-major
    std::vector<std::uint8_t> labels;

    std::span<const double> row(std::size_t i) const { return {rows.data() + i * n_features, n_features}; }
};

/// Entities seen in positive training pairs (E+); the rest of the universe is
/// isolated (E^I).
struct EntityPartition {
    std::unordered_set<EntityId> universe;
    std::unordered_set<EntityId> positive;

    bool in_positive(EntityId e) const { return positive.count(e) > 0; }
};

/// Seeded shuffle then contiguous slices: floor(train), floor(valid),
/// remainder to test. Requires at least 10 pairs.
PairSplit split_pairs(const PairVec& pairs, double train_ratio, double valid_ratio,
                      std::uint64_t seed);

/// One corrupted pair per positive: the superclass is resampled uniformly from
/// `pool` until the result is neither in S+_train nor the original pair.
/// `extra_forbidden` optionally widens the rejection set (e.g. the transitive
/// closure of the training subsumptions).
PairVec negative_samples(const PairVec& train_pos, const std::vector<EntityId>& pool,
                         const OntologyStore& store, std::uint64_t seed,
                         const PairKeySet* extra_forbidden = nullptr);

/// All (sub, sup) pairs reachable through one or more hops of `pairs`.
PairKeySet transitive_closure(const PairVec& pairs);

/// The (e, e) pair of every class and individual.
PairVec self_matching_samples(const OntologyStore& store);

/// Rows ordered positives, self-matching (when enabled), negatives; each group
/// sorted by pair. Throws MissingEmbedding if the table lacks an entity.
FeatureSet assemble_features(const LabeledPairSet& sets, const EmbeddingTable& table,
                             const OntologyStore& store, bool use_self);

EntityPartition partition_entities(const PairVec& train_pos, const PairVec& all_pairs);

/// Drops pairs whose two entities have identical distinct label-word sets
/// (trivial assertions in ontologies with IRI-derived one-word labels).
PairVec drop_trivial_pairs(const PairVec& pairs, const OntologyStore& store);

/// Split manifest: three "# <section>" headers with sub<TAB>sup lines.
void save_split(const PairSplit& split, const OntologyStore& store, std::ostream& out);
PairSplit load_split(std::istream& in, const OntologyStore& store);

}  // namespace subsume
