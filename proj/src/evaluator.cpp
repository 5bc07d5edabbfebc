#include "subsume/evaluator.hpp"

#include <algorithm>
#include <cstdio>

#include "subsume/error.hpp"
#include "subsume/rng.hpp"

namespace subsume {

double ForestScorer::score(std::span<const double> sub, std::span<const double> sup) const {
    thread_local std::vector<double> buf;
    buf.resize(sub.size() + sup.size());
    std::copy(sub.begin(), sub.end(), buf.begin());
    std::copy(sup.begin(), sup.end(), buf.begin() + static_cast<std::ptrdiff_t>(sub.size()));
    return predict_proba(*forest_, buf);
}

EmbeddingView::EmbeddingView(const EmbeddingTable& table, const OntologyStore& store)
    : table_(&table) {
    rows_.resize(store.n_entities());
    for (EntityId e = 0; e < store.n_entities(); ++e) {
        auto it = table.index.find(store.iri(e));
        if (it == table.index.end()) throw MissingEmbedding(store.iri(e));
        rows_[e] = it->second;
    }
}

RankingResult rank_query(const Scorer& scorer, const EmbeddingView& view, const OntologyStore& store,
                         EntityId sub, EntityId true_sup, std::span<const EntityId> candidates,
                         const FilterSet& filter) {
    const std::span<const double> v_sub = view.vec(sub);
    const double true_score = scorer.score(v_sub, view.vec(true_sup));
    const std::string& true_iri = store.iri(true_sup);

    std::uint32_t rank = 1;
    std::uint32_t count = 1;  // the true superclass itself
    for (EntityId x : candidates) {
        if (x == true_sup) continue;
        if (filter.contains(sub, x)) continue;
        ++count;
        const double s = scorer.score(v_sub, view.vec(x));
        if (s > true_score || (s == true_score && store.iri(x) < true_iri)) ++rank;
    }
    return {sub, true_sup, rank, count};
}

std::vector<RankingResult> rank_all(const Scorer& scorer, const EmbeddingView& view,
                                    const OntologyStore& store, const PairVec& queries,
                                    std::span<const EntityId> candidates, const FilterSet& filter,
                                    Exec exec) {
    std::vector<RankingResult> results(queries.size());
    parallel_for(exec, static_cast<std::int64_t>(queries.size()), [&](std::int64_t q) {
        const auto& [sub, sup] = queries[static_cast<std::size_t>(q)];
        results[static_cast<std::size_t>(q)] =
            rank_query(scorer, view, store, sub, sup, candidates, filter);
    });
    return results;
}

Metrics metrics_from_ranks(const std::vector<RankingResult>& results) {
    Metrics m;
    m.n_queries = results.size();
    if (results.empty()) return m;
    // Summing reciprocal ranks in sorted order keeps the mean bit-identical
    // under any permutation of the queries.
    std::vector<std::uint32_t> ranks;
    ranks.reserve(results.size());
    for (const RankingResult& r : results) ranks.push_back(r.rank);
    std::sort(ranks.begin(), ranks.end());
    double rr = 0.0;
    std::size_t h1 = 0, h5 = 0, h10 = 0;
    for (std::uint32_t rank : ranks) {
        rr += 1.0 / static_cast<double>(rank);
        h1 += rank <= 1;
        h5 += rank <= 5;
        h10 += rank <= 10;
    }
    const double n = static_cast<double>(results.size());
    m.mrr = rr / n;
    m.hits1 = static_cast<double>(h1) / n;
    m.hits5 = static_cast<double>(h5) / n;
    m.hits10 = static_cast<double>(h10) / n;
    return m;
}

Metrics evaluate(const Scorer& scorer, const EmbeddingView& view, const OntologyStore& store,
                 const PairVec& queries, std::span<const EntityId> candidates,
                 const FilterSet& filter, Exec exec) {
    return metrics_from_ranks(rank_all(scorer, view, store, queries, candidates, filter, exec));
}

std::vector<std::pair<std::string, Metrics>> restricted_evaluate(
    const Scorer& scorer, const EmbeddingView& view, const OntologyStore& store,
    const PairVec& test_pairs, const EntityPartition& partition,
    std::span<const EntityId> candidates, const FilterSet& filter, Exec exec) {
    const std::vector<RankingResult> all =
        rank_all(scorer, view, store, test_pairs, candidates, filter, exec);

    auto subset = [&](bool sub_pos, bool sup_pos) {
        std::vector<RankingResult> picked;
        for (const RankingResult& r : all)
            if (partition.in_positive(r.sub) == sub_pos && partition.in_positive(r.true_sup) == sup_pos)
                picked.push_back(r);
        return picked;
    };

    std::vector<std::pair<std::string, Metrics>> out;
    out.emplace_back("full", metrics_from_ranks(all));
    out.emplace_back("E+xE+", metrics_from_ranks(subset(true, true)));
    out.emplace_back("EIxE+", metrics_from_ranks(subset(false, true)));
    out.emplace_back("E+xEI", metrics_from_ranks(subset(true, false)));
    out.emplace_back("EIxEI", metrics_from_ranks(subset(false, false)));
    return out;
}

Metrics self_prediction(const Scorer& scorer, const EmbeddingTable& table,
                        const OntologyStore& store, std::span<const EntityId> candidates,
                        std::size_t n_trials, std::uint64_t seed, Exec exec) {
    if (table.size() == 0 || table.dim == 0) throw Error("self_prediction: empty table");
    std::vector<double> lo(table.dim), hi(table.dim);
    for (std::size_t j = 0; j < table.dim; ++j) {
        lo[j] = table.data[j];
        hi[j] = table.data[j];
    }
    for (std::size_t i = 1; i < table.size(); ++i) {
        const std::span<const double> v = table.vec(i);
        for (std::size_t j = 0; j < table.dim; ++j) {
            lo[j] = std::min(lo[j], v[j]);
            hi[j] = std::max(hi[j], v[j]);
        }
    }

    std::vector<RankingResult> results(n_trials);
    parallel_for(exec, static_cast<std::int64_t>(n_trials), [&](std::int64_t trial) {
        Rng rng(Rng::mix(seed, static_cast<std::uint64_t>(trial)));
        std::vector<double> synth(table.dim);
        for (std::size_t j = 0; j < table.dim; ++j) synth[j] = rng.uniform(lo[j], hi[j]);

        char name[32];
        std::snprintf(name, sizeof(name), "urn:selfpred:%06lld", static_cast<long long>(trial));
        const std::string synth_iri(name);

        const double true_score = scorer.score(synth, synth);
        std::uint32_t rank = 1;
        for (EntityId x : candidates) {
            const double s = scorer.score(synth, table.vec(store.iri(x)));
            if (s > true_score || (s == true_score && store.iri(x) < synth_iri)) ++rank;
        }
        results[static_cast<std::size_t>(trial)] = {0, 0, rank,
                                                    static_cast<std::uint32_t>(candidates.size() + 1)};
    });
    return metrics_from_ranks(results);
}

std::pair<std::size_t, bool> select_model(
    const std::map<std::pair<std::size_t, bool>, Metrics>& valid_metrics) {
    if (valid_metrics.empty()) throw Error("select_model: no configurations evaluated");
    bool have = false;
    std::pair<std::size_t, bool> best{0, false};
    double best_mrr = 0.0;
    for (const auto& [key, metrics] : valid_metrics) {
        const auto& [dim, self_matching] = key;
        bool better = false;
        if (!have || metrics.mrr > best_mrr) {
            better = true;
        } else if (metrics.mrr == best_mrr) {
            if (dim < best.first) better = true;
            else if (dim == best.first && self_matching && !best.second) better = true;
        }
        if (better) {
            best = key;
            best_mrr = metrics.mrr;
            have = true;
        }
    }
    return best;
}

}  // namespace subsume
