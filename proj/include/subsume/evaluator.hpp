#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "subsume/embedding.hpp"
#include "subsume/forest.hpp"
#include "subsume/ontology.hpp"
#include "subsume/parallel.hpp"
#include "subsume/sampler.hpp"

namespace subsume {

/// Scores a (subclass, candidate-superclass) vector pair; higher means more
/// plausible. Implementations must be safe for concurrent calls.
class Scorer {
public:
    virtual ~Scorer() = default;
    virtual double score(std::span<const double> sub, std::span<const double> sup) const = 0;
};

/// predict_proba over the concatenated pair embedding.
class ForestScorer : public Scorer {
public:
    explicit ForestScorer(const Forest& forest) : forest_(&forest) {}
    double score(std::span<const double> sub, std::span<const double> sup) const override;

private:
    const Forest* forest_;
};

/// Negated Euclidean distance baseline.
class DistanceScorer : public Scorer {
public:
    double score(std::span<const double> sub, std::span<const double> sup) const override {
        return distance_score(sub, sup);
    }
};

/// Candidates already positive for the query subclass: S+_train plus the
/// self-matching pair of every entity.
struct FilterSet {
    const PairKeySet* train_pos = nullptr;
    bool include_self = true;

    bool contains(EntityId sub, EntityId sup) const {
        if (include_self && sub == sup) return true;
        return train_pos && train_pos->contains({sub, sup});
    }
};

/// Entity-id view over an embedding table; resolves each store entity to its
/// table row once. Throws MissingEmbedding for uncovered entities.
class EmbeddingView {
public:
    EmbeddingView(const EmbeddingTable& table, const OntologyStore& store);
    std::span<const double> vec(EntityId e) const { return table_->vec(rows_[e]); }
    const EmbeddingTable& table() const { return *table_; }

private:
    const EmbeddingTable* table_;
    std::vector<std::size_t> rows_;
};

struct RankingResult {
    EntityId sub = 0;
    EntityId true_sup = 0;
    std::uint32_t rank = 0;             // 1-based
    std::uint32_t candidate_count = 0;  // after filtering
};

struct Metrics {
    double mrr = 0.0;
    double hits1 = 0.0;
    double hits5 = 0.0;
    double hits10 = 0.0;
    std::size_t n_queries = 0;

    bool valid() const { return n_queries > 0; }
};

/// Rank of the true superclass among the filtered candidates, scores
/// descending, exact ties broken by ascending IRI. The true superclass itself
/// is never filtered.
RankingResult rank_query(const Scorer& scorer, const EmbeddingView& view, const OntologyStore& store,
                         EntityId sub, EntityId true_sup, std::span<const EntityId> candidates,
                         const FilterSet& filter);

std::vector<RankingResult> rank_all(const Scorer& scorer, const EmbeddingView& view,
                                    const OntologyStore& store, const PairVec& queries,
                                    std::span<const EntityId> candidates, const FilterSet& filter,
                                    Exec exec = Exec::openmp);

Metrics metrics_from_ranks(const std::vector<RankingResult>& results);

Metrics evaluate(const Scorer& scorer, const EmbeddingView& view, const OntologyStore& store,
                 const PairVec& queries, std::span<const EntityId> candidates,
                 const FilterSet& filter, Exec exec = Exec::openmp);

/// Metrics on the full test set and on the four disjoint restrictions by
/// subclass/superclass membership in E+. Order: full, E+xE+, EIxE+, E+xEI,
/// EIxEI. Empty restrictions carry n_queries = 0.
std::vector<std::pair<std::string, Metrics>> restricted_evaluate(
    const Scorer& scorer, const EmbeddingView& view, const OntologyStore& store,
    const PairVec& test_pairs, const EntityPartition& partition,
    std::span<const EntityId> candidates, const FilterSet& filter, Exec exec = Exec::openmp);

/// Ranks `n_trials` synthetic entities, each drawn uniformly inside the
/// componentwise bounding box of the table, as their own superclass against
/// candidates plus themselves. No filtering applies.
Metrics self_prediction(const Scorer& scorer, const EmbeddingTable& table,
                        const OntologyStore& store, std::span<const EntityId> candidates,
                        std::size_t n_trials, std::uint64_t seed, Exec exec = Exec::openmp);

/// Highest validation MRR; ties prefer the smaller dimension, then
/// self-matching enabled. Keys are (dimension, self_matching).
std::pair<std::size_t, bool> select_model(
    const std::map<std::pair<std::size_t, bool>, Metrics>& valid_metrics);

}  // namespace subsume
