#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fixtures.hpp"
#include "subsume/autoencoder.hpp"
#include "subsume/embedding.hpp"
#include "subsume/error.hpp"

using namespace subsume;

namespace {

// A word-embedding matrix with recognizable rows: row i = (i+1, 10*(i+1)).
WordEmbeddingMatrix toy_words(const Vocabulary& vocab) {
    WordEmbeddingMatrix h;
    h.n_rows = vocab.size();
    h.dim = 2;
    h.row_labels = vocab.words;
    for (std::size_t i = 0; i < h.n_rows; ++i) {
        h.data.push_back(static_cast<double>(i + 1));
        h.data.push_back(10.0 * static_cast<double>(i + 1));
    }
    return h;
}

EmbeddingTable random_table(std::size_t n, std::size_t dim, std::uint64_t seed) {
    EmbeddingTable t;
    t.dim = dim;
    t.source = "test";
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        char buf[24];
        std::snprintf(buf, sizeof(buf), "http://t#%04zu", i);
        t.iris.push_back(buf);
        for (std::size_t j = 0; j < dim; ++j) t.data.push_back(rng.uniform(-5.0, 5.0));
    }
    t.rebuild_index();
    return t;
}

}  // namespace

TEST_CASE("singleton label average equals the word row") {
    fixtures::NtriplesBuilder b;
    b.declare_class("http://x#A").label("http://x#A", "nerve");
    b.declare_class("http://x#B").label("http://x#B", "nerve cranial");
    const OntologyStore store = fixtures::ingest_string(b.str());
    const Vocabulary vocab = build_vocabulary(store);
    const WordEmbeddingMatrix h = toy_words(vocab);
    const EmbeddingTable t = entity_embeddings(h, store, vocab, "inme");

    const std::span<const double> nerve_row = h.row(vocab.id_of("nerve"));
    const std::span<const double> va = t.vec("http://x#A");
    CHECK(va[0] == nerve_row[0]);
    CHECK(va[1] == nerve_row[1]);
}

TEST_CASE("worked example: average of the three label words") {
    const OntologyStore store = fixtures::go_mini_store();
    const Vocabulary vocab = build_vocabulary(store);
    const WordEmbeddingMatrix h = toy_words(vocab);
    const EmbeddingTable t = entity_embeddings(h, store, vocab, "inme");

    // cranial, formation, nerve -> rows 0, 2, 4 of the toy matrix
    const double expected0 = (1.0 + 3.0 + 5.0) / 3.0;
    const std::span<const double> v = t.vec(fixtures::obo("GO_0021603"));
    CHECK(v[0] == doctest::Approx(expected0).epsilon(1e-15));
    CHECK(v[1] == doctest::Approx(10.0 * expected0).epsilon(1e-15));
}

TEST_CASE("identical label sets give identical vectors") {
    fixtures::NtriplesBuilder b;
    b.declare_class("http://x#A").label("http://x#A", "whole grain bread");
    b.declare_class("http://x#B").label("http://x#B", "bread grain whole");  // order differs
    b.declare_class("http://x#C").label("http://x#C", "grain bread whole whole");
    const OntologyStore store = fixtures::ingest_string(b.str());
    const Vocabulary vocab = build_vocabulary(store);
    const WordEmbeddingMatrix h = toy_words(vocab);
    const EmbeddingTable t = entity_embeddings(h, store, vocab, "inme");
    const auto va = t.vec("http://x#A"), vb = t.vec("http://x#B"), vc = t.vec("http://x#C");
    for (std::size_t j = 0; j < t.dim; ++j) {
        CHECK(va[j] == vb[j]);
        CHECK(va[j] == vc[j]);
    }
}

TEST_CASE("label-less entities get the zero vector and are reported") {
    fixtures::NtriplesBuilder b;
    b.declare_class("http://x#Named").label("http://x#Named", "alpha");
    b.declare_class("http://x#123");
    const OntologyStore store = fixtures::ingest_string(b.str());
    const Vocabulary vocab = build_vocabulary(store);
    const EmbeddingTable t = entity_embeddings(toy_words(vocab), store, vocab, "inme");
    const std::span<const double> v = t.vec("http://x#123");
    CHECK(v[0] == 0.0);
    CHECK(v[1] == 0.0);
    CHECK(zero_vector_entities(t) == std::vector<std::string>{"http://x#123"});
}

TEST_CASE("concat joins dimensions and preserves halves") {
    const EmbeddingTable a = random_table(5, 3, 1);
    EmbeddingTable b = random_table(5, 2, 2);
    const EmbeddingTable c = concat_tables(a, b);
    CHECK(c.dim == 5);
    for (std::size_t i = 0; i < c.size(); ++i) {
        const auto va = a.vec(c.iris[i]), vb = b.vec(c.iris[i]), vc = c.vec(i);
        for (std::size_t j = 0; j < 3; ++j) CHECK(vc[j] == va[j]);
        for (std::size_t j = 0; j < 2; ++j) CHECK(vc[3 + j] == vb[j]);
    }

    // zero right half: concat(a, zeros) keeps a with zero padding
    EmbeddingTable zeros = b;
    std::fill(zeros.data.begin(), zeros.data.end(), 0.0);
    const EmbeddingTable padded = concat_tables(a, zeros);
    for (std::size_t i = 0; i < padded.size(); ++i) {
        CHECK(padded.vec(i)[0] == a.vec(padded.iris[i])[0]);
        CHECK(padded.vec(i)[3] == 0.0);
        CHECK(padded.vec(i)[4] == 0.0);
    }
}

TEST_CASE("concat order matters") {
    const EmbeddingTable a = random_table(3, 2, 3);
    const EmbeddingTable b = random_table(3, 2, 4);
    const EmbeddingTable ab = concat_tables(a, b);
    const EmbeddingTable ba = concat_tables(b, a);
    bool any_diff = false;
    for (std::size_t i = 0; i < ab.size(); ++i)
        for (std::size_t j = 0; j < ab.dim; ++j) any_diff = any_diff || ab.vec(i)[j] != ba.vec(i)[j];
    CHECK(any_diff);
}

TEST_CASE("concat rejects mismatched entity sets") {
    const EmbeddingTable a = random_table(4, 2, 5);
    EmbeddingTable b = random_table(3, 2, 6);
    CHECK_THROWS_AS(concat_tables(a, b), EntityMismatch);
}

TEST_CASE("import parses a small table") {
    std::stringstream in(
        "dim=4\n"
        "http://t#b\t1 2 3 4\n"
        "http://t#a\t0.5 -0.25 0 9\n"
        "http://t#c\t-1 -2 -3 -4\n");
    const EmbeddingTable t = import_table(in, "imported:test");
    CHECK(t.dim == 4);
    CHECK(t.size() == 3);
    CHECK(t.iris == std::vector<std::string>{"http://t#a", "http://t#b", "http://t#c"});
    CHECK(t.vec("http://t#a")[1] == -0.25);
}

TEST_CASE("import rejects duplicates and bad widths") {
    std::stringstream dup(
        "dim=2\n"
        "http://t#a\t1 2\n"
        "http://t#a\t3 4\n");
    CHECK_THROWS_AS(import_table(dup, "x"), DuplicateEntity);

    std::stringstream narrow(
        "dim=3\n"
        "http://t#a\t1 2\n");
    CHECK_THROWS_AS(import_table(narrow, "x"), DimInconsistent);

    std::stringstream headerless("http://t#a\t1 2\n");
    CHECK_THROWS_AS(import_table(headerless, "x"), ParseError);
}

TEST_CASE("export then import reproduces components within 1e-6") {
    const EmbeddingTable t = random_table(20, 6, 77);
    std::stringstream buffer;
    export_table(t, buffer);
    const EmbeddingTable back = import_table(buffer, t.source);
    REQUIRE(back.size() == t.size());
    REQUIRE(back.dim == t.dim);
    double worst = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const auto va = t.vec(i), vb = back.vec(t.iris[i]);
        for (std::size_t j = 0; j < t.dim; ++j) worst = std::max(worst, std::abs(va[j] - vb[j]));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("averaging respects the convex hull bound") {
    const OntologyStore store = fixtures::go_mini_store();
    const Vocabulary vocab = build_vocabulary(store);
    const WordEmbeddingMatrix h = toy_words(vocab);
    const EmbeddingTable t = entity_embeddings(h, store, vocab, "inme");
    double max_word = 0.0;
    for (double v : h.data) max_word = std::max(max_word, std::abs(v));
    for (std::size_t i = 0; i < t.size(); ++i)
        for (std::size_t j = 0; j < t.dim; ++j) CHECK(std::abs(t.vec(i)[j]) <= max_word);
}
