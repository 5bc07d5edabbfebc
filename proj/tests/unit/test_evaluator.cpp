#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "subsume/evaluator.hpp"

using namespace subsume;

namespace {

// Scorer with externally fixed scores per candidate row.
class TableScorer : public Scorer {
public:
    explicit TableScorer(const EmbeddingTable& table) : table_(&table) {}
    void set(const std::string& iri, double score) { scores_[table_->index.at(iri)] = score; }
    double score(std::span<const double>, std::span<const double> sup) const override {
        // identify the candidate row by pointer offset
        const std::size_t row =
            static_cast<std::size_t>(sup.data() - table_->data.data()) / table_->dim;
        auto it = scores_.find(row);
        return it == scores_.end() ? 0.0 : it->second;
    }

private:
    const EmbeddingTable* table_;
    std::map<std::size_t, double> scores_;
};

class ConstantScorer : public Scorer {
public:
    double score(std::span<const double>, std::span<const double>) const override { return 0.25; }
};

struct EvalFixture {
    OntologyStore store;
    EmbeddingTable table;

    explicit EvalFixture(std::size_t n_classes) {
        fixtures::NtriplesBuilder b;
        for (std::size_t i = 0; i < n_classes; ++i) {
            const std::string iri = cls(i);
            b.declare_class(iri);
            b.label(iri, fixtures::word_name(3 * i) + " " + fixtures::word_name(3 * i + 1));
        }
        for (std::size_t i = 0; i + 1 < n_classes; ++i) b.subclass(cls(i), cls(i + 1));
        store = fixtures::ingest_string(b.str());

        table.dim = 2;
        table.source = "test";
        table.iris = store.entity_iris;
        Rng rng(1);
        for (std::size_t i = 0; i < store.n_entities(); ++i) {
            table.data.push_back(rng.uniform());
            table.data.push_back(rng.uniform());
        }
        table.rebuild_index();
    }

    static std::string cls(std::size_t i) {
        char buf[24];
        std::snprintf(buf, sizeof(buf), "http://e#C%03zu", i);
        return std::string(buf);
    }
};

}  // namespace

TEST_CASE("rank counts strictly better candidates") {
    EvalFixture fx(5);
    const EmbeddingView view(fx.table, fx.store);
    TableScorer scorer(fx.table);
    scorer.set(EvalFixture::cls(2), 0.9);  // true superclass scores highest
    scorer.set(EvalFixture::cls(3), 0.5);
    scorer.set(EvalFixture::cls(4), 0.1);

    const PairKeySet empty_set{};
    const FilterSet filter{&empty_set, true};
    const RankingResult r =
        rank_query(scorer, view, fx.store, fx.store.id_of(EvalFixture::cls(0)),
                   fx.store.id_of(EvalFixture::cls(2)), fx.store.classes, filter);
    CHECK(r.rank == 1);
    // candidates: 5 classes minus the filtered self pair
    CHECK(r.candidate_count == 4);
}

TEST_CASE("the query subclass is filtered via its self pair") {
    EvalFixture fx(4);
    const EmbeddingView view(fx.table, fx.store);
    TableScorer scorer(fx.table);
    scorer.set(EvalFixture::cls(0), 100.0);  // would dominate if not filtered

    const PairKeySet empty_set{};
    const FilterSet filter{&empty_set, true};
    const EntityId sub = fx.store.id_of(EvalFixture::cls(0));
    const EntityId sup = fx.store.id_of(EvalFixture::cls(2));
    scorer.set(EvalFixture::cls(2), 0.6);
    const RankingResult r = rank_query(scorer, view, fx.store, sub, sup, fx.store.classes, filter);
    CHECK(r.rank == 1);
    CHECK(r.candidate_count == 3);
}

TEST_CASE("train positives are filtered but never the true superclass") {
    EvalFixture fx(5);
    const EmbeddingView view(fx.table, fx.store);
    TableScorer scorer(fx.table);
    const EntityId sub = fx.store.id_of(EvalFixture::cls(0));
    const EntityId sup = fx.store.id_of(EvalFixture::cls(1));
    scorer.set(EvalFixture::cls(3), 7.0);  // in the filter, ignored
    scorer.set(EvalFixture::cls(1), 1.0);

    PairKeySet train;
    train.insert({sub, fx.store.id_of(EvalFixture::cls(3))});
    train.insert({sub, sup});  // true answer in the filter set is still ranked
    const FilterSet filter{&train, true};
    const RankingResult r = rank_query(scorer, view, fx.store, sub, sup, fx.store.classes, filter);
    CHECK(r.rank == 1);
    CHECK(r.candidate_count == 3);  // 5 minus self minus cls(3)
}

TEST_CASE("exact ties break by ascending iri") {
    EvalFixture fx(4);
    const EmbeddingView view(fx.table, fx.store);
    const ConstantScorer scorer;  // every candidate ties
    const PairKeySet empty_set{};
    const FilterSet filter{&empty_set, true};
    const EntityId sub = fx.store.id_of(EvalFixture::cls(0));

    // true sup C001: ties C002, C003 sort after it by IRI -> rank 1
    RankingResult r = rank_query(scorer, view, fx.store, sub,
                                 fx.store.id_of(EvalFixture::cls(1)), fx.store.classes, filter);
    CHECK(r.rank == 1);
    // true sup C003: C001 and C002 sort before it -> rank 3
    r = rank_query(scorer, view, fx.store, sub, fx.store.id_of(EvalFixture::cls(3)),
                   fx.store.classes, filter);
    CHECK(r.rank == 3);
}

TEST_CASE("a candidate with the subclass's exact vector outranks a different true sup") {
    EvalFixture fx(5);
    // make cls(3) identical to the query subclass cls(0)
    const std::size_t row0 = fx.table.index.at(EvalFixture::cls(0));
    const std::size_t row3 = fx.table.index.at(EvalFixture::cls(3));
    for (std::size_t j = 0; j < fx.table.dim; ++j)
        fx.table.data[row3 * fx.table.dim + j] = fx.table.data[row0 * fx.table.dim + j];

    const EmbeddingView view(fx.table, fx.store);
    const DistanceScorer scorer;
    const PairKeySet empty_set{};
    const FilterSet filter{&empty_set, true};
    const RankingResult r =
        rank_query(scorer, view, fx.store, fx.store.id_of(EvalFixture::cls(0)),
                   fx.store.id_of(EvalFixture::cls(2)), fx.store.classes, filter);
    CHECK(r.rank > 1);  // the zero-distance twin wins
}

TEST_CASE("rank is invariant under monotone score transforms") {
    EvalFixture fx(6);
    const EmbeddingView view(fx.table, fx.store);
    const DistanceScorer base;

    class Monotone : public Scorer {
    public:
        explicit Monotone(const Scorer& inner) : inner_(&inner) {}
        double score(std::span<const double> a, std::span<const double> b) const override {
            return 3.0 * std::tanh(inner_->score(a, b)) + 1.0;
        }

    private:
        const Scorer* inner_;
    } wrapped(base);

    const PairKeySet empty_set{};
    const FilterSet filter{&empty_set, true};
    for (std::size_t q = 0; q + 1 < 6; ++q) {
        const EntityId sub = fx.store.id_of(EvalFixture::cls(q));
        const EntityId sup = fx.store.id_of(EvalFixture::cls(q + 1));
        const RankingResult a = rank_query(base, view, fx.store, sub, sup, fx.store.classes, filter);
        const RankingResult b =
            rank_query(wrapped, view, fx.store, sub, sup, fx.store.classes, filter);
        CHECK(a.rank == b.rank);
    }
}

TEST_CASE("metric arithmetic") {
    std::vector<RankingResult> results(3);
    results[0].rank = 1;
    results[1].rank = 2;
    results[2].rank = 4;
    const Metrics m = metrics_from_ranks(results);
    CHECK(m.mrr == doctest::Approx((1.0 + 0.5 + 0.25) / 3.0).epsilon(1e-12));
    CHECK(m.hits1 == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(m.hits5 == 1.0);
    CHECK(m.hits10 == 1.0);

    std::vector<RankingResult> ones(4);
    for (auto& r : ones) r.rank = 1;
    const Metrics perfect = metrics_from_ranks(ones);
    CHECK(perfect.mrr == 1.0);
    CHECK(perfect.hits1 == 1.0);
    CHECK(perfect.hits10 == 1.0);

    std::vector<RankingResult> eleven(1);
    eleven[0].rank = 11;
    const Metrics far = metrics_from_ranks(eleven);
    CHECK(far.hits10 == 0.0);
    CHECK(far.mrr == doctest::Approx(1.0 / 11.0).epsilon(1e-12));
}

TEST_CASE("hits are monotone on random rank sets") {
    Rng rng(6);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<RankingResult> results(1 + rng.below(50));
        for (auto& r : results) r.rank = 1 + static_cast<std::uint32_t>(rng.below(30));
        const Metrics m = metrics_from_ranks(results);
        CHECK(m.hits1 <= m.hits5);
        CHECK(m.hits5 <= m.hits10);
        CHECK(m.mrr >= m.hits1 * (1.0 - 1e-12));
        CHECK(m.mrr <= 1.0);
    }
}

TEST_CASE("evaluate is permutation invariant") {
    EvalFixture fx(8);
    const EmbeddingView view(fx.table, fx.store);
    const DistanceScorer scorer;
    const PairKeySet empty_set{};
    const FilterSet filter{&empty_set, true};
    PairVec queries(fx.store.subsumptions.begin(), fx.store.subsumptions.end());
    const Metrics a = evaluate(scorer, view, fx.store, queries, fx.store.classes, filter);
    std::reverse(queries.begin(), queries.end());
    const Metrics b = evaluate(scorer, view, fx.store, queries, fx.store.classes, filter);
    CHECK(a.mrr == b.mrr);
    CHECK(a.hits1 == b.hits1);
    CHECK(a.n_queries == b.n_queries);
}

TEST_CASE("restricted evaluation partitions the test set") {
    EvalFixture fx(12);
    const EmbeddingView view(fx.table, fx.store);
    const DistanceScorer scorer;
    const PairKeySet empty_set{};
    const FilterSet filter{&empty_set, true};

    PairVec pairs(fx.store.subsumptions.begin(), fx.store.subsumptions.end());
    const PairSplit split = split_pairs(pairs, 0.7, 0.1, 3);
    PairVec universe = split.train_pos;
    universe.insert(universe.end(), split.test.begin(), split.test.end());
    const EntityPartition part = partition_entities(split.train_pos, universe);

    const auto rows =
        restricted_evaluate(scorer, view, fx.store, split.test, part, fx.store.classes, filter);
    REQUIRE(rows.size() == 5);
    CHECK(rows[0].first == "full");
    std::size_t total = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) total += rows[i].second.n_queries;
    CHECK(total == split.test.size());
    CHECK(rows[0].second.n_queries == split.test.size());
}

TEST_CASE("every test pair isolated makes the full metrics equal that subset") {
    EvalFixture fx(6);
    const EmbeddingView view(fx.table, fx.store);
    const DistanceScorer scorer;
    const PairKeySet empty_set{};
    const FilterSet filter{&empty_set, true};

    // no training pairs at all: everything lands in EIxEI
    const PairVec test(fx.store.subsumptions.begin(), fx.store.subsumptions.end());
    const EntityPartition part = partition_entities({}, test);
    const auto rows = restricted_evaluate(scorer, view, fx.store, test, part, fx.store.classes,
                                          filter);
    const Metrics& full = rows[0].second;
    const Metrics& isolated = rows[4].second;
    CHECK(rows[4].first == "EIxEI");
    CHECK(full.n_queries == isolated.n_queries);
    CHECK(full.mrr == isolated.mrr);
    for (std::size_t i = 1; i < 4; ++i) CHECK(rows[i].second.n_queries == 0);
}

TEST_CASE("distance self prediction is exact") {
    EvalFixture fx(30);
    const DistanceScorer scorer;
    const Metrics m = self_prediction(scorer, fx.table, fx.store, fx.store.classes, 50, 9);
    CHECK(m.mrr == 1.0);
    CHECK(m.hits1 == 1.0);
    CHECK(m.n_queries == 50);
}

TEST_CASE("constant scorer self prediction follows iri order") {
    EvalFixture fx(10);
    const ConstantScorer scorer;
    // synthetic IRIs "urn:selfpred:..." sort after "http://e#C...", so every
    // real candidate outranks the tied synthetic entity.
    const Metrics m = self_prediction(scorer, fx.table, fx.store, fx.store.classes, 7, 4);
    CHECK(m.mrr == doctest::Approx(1.0 / 11.0).epsilon(1e-12));
}

TEST_CASE("single trial self prediction is reproducible") {
    EvalFixture fx(10);
    const DistanceScorer scorer;
    const Metrics a = self_prediction(scorer, fx.table, fx.store, fx.store.classes, 1, 42);
    const Metrics b = self_prediction(scorer, fx.table, fx.store, fx.store.classes, 1, 42);
    CHECK(a.mrr == b.mrr);
    CHECK(a.n_queries == 1);
}

TEST_CASE("model selection argmax and tie-breaks") {
    std::map<std::pair<std::size_t, bool>, Metrics> grid;
    Metrics m;
    m.n_queries = 10;

    m.mrr = 0.25;
    grid[{100, true}] = m;
    m.mrr = 0.24;
    grid[{50, true}] = m;
    CHECK(select_model(grid) == std::pair<std::size_t, bool>{100, true});

    m.mrr = 0.25;
    grid[{50, true}] = m;  // exact tie with (100, true)
    CHECK(select_model(grid) == std::pair<std::size_t, bool>{50, true});

    grid.clear();
    m.mrr = 0.3;
    grid[{50, false}] = m;
    grid[{50, true}] = m;  // tie at same dim: self-matching wins
    CHECK(select_model(grid) == std::pair<std::size_t, bool>{50, true});
}

TEST_CASE("selection matches an independent argmax scan") {
    Rng rng(12);
    std::map<std::pair<std::size_t, bool>, Metrics> grid;
    for (std::size_t dim : {50, 100, 200})
        for (bool sm : {false, true}) {
            Metrics m;
            m.n_queries = 5;
            m.mrr = rng.uniform();
            grid[{dim, sm}] = m;
        }
    const auto chosen = select_model(grid);
    for (const auto& [key, m] : grid) CHECK(m.mrr <= grid.at(chosen).mrr);
}
