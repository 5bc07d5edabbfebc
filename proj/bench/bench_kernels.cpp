// Compares the serial and OpenMP execution policies of the data-parallel
// kernels on synthetic inputs and verifies that both produce identical output.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "subsume/autoencoder.hpp"
#include "subsume/evaluator.hpp"
#include "subsume/forest.hpp"
#include "subsume/matrix.hpp"
#include "subsume/ontology.hpp"
#include "subsume/parallel.hpp"
#include "subsume/rng.hpp"
#include "subsume/sampler.hpp"

using namespace subsume;

namespace {

double seconds_of(const std::function<void()>& fn) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void report(const char* name, double serial, double openmp, bool identical) {
    std::printf("%-28s serial %8.3fs   openmp %8.3fs   speedup %5.2fx   identical %s\n", name,
                serial, openmp, serial / openmp, identical ? "yes" : "NO");
}

std::string word_of(std::size_t i) {
    std::string w;
    do {
        w.push_back(static_cast<char>('a' + i % 26));
        i /= 26;
    } while (i > 0);
    while (w.size() < 3) w.push_back('q');
    return w;
}

// Synthetic store: `n_entities` classes, labels of `words_per` words drawn
// from a zipf-ish pool, plus chained subsumptions.
OntologyStore synthetic_store(std::size_t n_entities, std::size_t pool, std::size_t words_per,
                              std::uint64_t seed) {
    std::vector<Triple> triples;
    Rng rng(seed);
    auto iri = [](std::size_t i) {
        char buf[48];
        std::snprintf(buf, sizeof(buf), "http://bench#C%06zu", i);
        return std::string(buf);
    };
    for (std::size_t i = 0; i < n_entities; ++i) {
        Triple type;
        type.subject = iri(i);
        type.predicate = "rdf:type";
        type.object.kind = Term::Kind::iri;
        type.object.value = "owl:Class";
        triples.push_back(type);

        std::string text;
        for (std::size_t w = 0; w < words_per; ++w) {
            if (w) text += ' ';
            // skew towards low word ids so rows overlap
            const std::size_t z = std::min(rng.below(pool), rng.below(pool));
            text += word_of(z);
        }
        Triple label;
        label.subject = iri(i);
        label.predicate = "rdfs:label";
        label.object.kind = Term::Kind::literal;
        label.object.value = text;
        triples.push_back(label);

        if (i > 0) {
            Triple sub;
            sub.subject = iri(i);
            sub.predicate = "rdfs:subClassOf";
            sub.object.kind = Term::Kind::iri;
            sub.object.value = iri(rng.below(i));
            triples.push_back(sub);
        }
    }
    OntologyStore store = build_store(triples, {});
    finalize_words(store);
    return store;
}

bool same(const SparseBinaryMatrix& a, const SparseBinaryMatrix& b) { return a.rows == b.rows; }

}  // namespace

int main(int argc, char** argv) {
    const std::size_t scale = argc > 1 ? std::stoul(argv[1]) : 1;
    std::printf("threads available: %d (set OMP_NUM_THREADS to vary)\n\n", thread_count(Exec::openmp));

    const OntologyStore store = synthetic_store(1500 * scale, 900 * scale, 24, 42);
    const Vocabulary vocab = build_vocabulary(store);
    std::printf("synthetic ontology: %zu entities, %zu words\n\n", store.n_entities(),
                vocab.size());

    {
        SparseBinaryMatrix a, b;
        const double ts = seconds_of([&] { a = build_inverted_index(store, vocab, Exec::serial); });
        const double tp = seconds_of([&] { b = build_inverted_index(store, vocab, Exec::openmp); });
        report("inverted index", ts, tp, same(a, b));
    }

    SparseBinaryMatrix local_serial, local;
    {
        const double ts =
            seconds_of([&] { local_serial = build_cooccurrence(store, vocab, Exec::serial); });
        const double tp = seconds_of([&] { local = build_cooccurrence(store, vocab, Exec::openmp); });
        report("co-occurrence", ts, tp, same(local_serial, local));
    }

    AETrainConfig ae;
    ae.dim = 32;
    ae.epochs = 3;
    ae.batch_size = 128;
    ae.seed = 9;
    AEParams params_serial, params;
    {
        const double ts = seconds_of([&] {
            params_serial = train_autoencoder(local, ae, Exec::serial).first;
        });
        const double tp = seconds_of([&] { params = train_autoencoder(local, ae, Exec::openmp).first; });
        report("autoencoder (3 epochs)", ts, tp,
               params_serial.w_in == params.w_in && params_serial.w_out == params.w_out);
    }

    WordEmbeddingMatrix h_serial, h;
    {
        const double ts = seconds_of([&] { h_serial = encode(params, local, Exec::serial); });
        const double tp = seconds_of([&] { h = encode(params, local, Exec::openmp); });
        report("encode", ts, tp, h_serial.data == h.data);
    }

    const EmbeddingTable table = entity_embeddings(h, store, vocab, "come");
    const PairSplit split = split_pairs(store.subsumptions, 0.7, 0.1, 3);
    LabeledPairSet sets;
    sets.positives = split.train_pos;
    sets.negatives = negative_samples(sets.positives, store.classes, store, 4);
    sets.self_matching = self_matching_samples(store);
    const FeatureSet features = assemble_features(sets, table, store, true);

    RFConfig rf;
    rf.n_trees = 24;
    rf.seed = 5;
    Forest forest_serial, forest;
    {
        const double ts = seconds_of([&] { forest_serial = train_forest(features, rf, Exec::serial); });
        const double tp = seconds_of([&] { forest = train_forest(features, rf, Exec::openmp); });
        bool identical = forest_serial.trees.size() == forest.trees.size();
        Rng rng(6);
        for (int probe = 0; probe < 50 && identical; ++probe) {
            std::vector<double> x(features.n_features);
            for (double& v : x) v = rng.uniform(-1.0, 1.0);
            identical = predict_proba(forest_serial, x) == predict_proba(forest, x);
        }
        report("random forest (24 trees)", ts, tp, identical);
    }

    {
        const PairKeySet train_keys(split.train_pos);
        const FilterSet filter{&train_keys, true};
        const EmbeddingView view(table, store);
        const ForestScorer scorer(forest);
        PairVec queries(split.test.begin(),
                        split.test.begin() + std::min<std::size_t>(split.test.size(), 100));
        std::vector<RankingResult> ra, rb;
        const double ts = seconds_of(
            [&] { ra = rank_all(scorer, view, store, queries, store.classes, filter, Exec::serial); });
        const double tp = seconds_of(
            [&] { rb = rank_all(scorer, view, store, queries, store.classes, filter, Exec::openmp); });
        bool identical = ra.size() == rb.size();
        for (std::size_t i = 0; i < ra.size() && identical; ++i) identical = ra[i].rank == rb[i].rank;
        report("ranking (100 queries)", ts, tp, identical);
    }
    return 0;
}
