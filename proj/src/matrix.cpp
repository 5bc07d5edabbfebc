#include "subsume/matrix.hpp"

#include <algorithm>
#include <atomic>
#include <istream>
#include <ostream>

#include "subsume/error.hpp"

namespace subsume {

std::uint32_t Vocabulary::id_of(const std::string& word) const {
    auto it = index.find(word);
    if (it == index.end()) throw Error("word not in vocabulary: " + word);
    return it->second;
}

bool SparseBinaryMatrix::at(std::size_t row, std::uint32_t col) const {
    const auto& r = rows[row];
    return std::binary_search(r.begin(), r.end(), col);
}

std::size_t SparseBinaryMatrix::nnz() const {
    std::size_t total = 0;
    for (const auto& r : rows) total += r.size();
    return total;
}

Vocabulary build_vocabulary(const OntologyStore& store) {
    if (!store.finalized) throw Error("store not finalized");
    Vocabulary vocab;
    // ann_words lists are sorted; a k-way merge via flat sort keeps this simple.
    for (const auto& words : store.ann_words)
        vocab.words.insert(vocab.words.end(), words.begin(), words.end());
    std::sort(vocab.words.begin(), vocab.words.end());
    vocab.words.erase(std::unique(vocab.words.begin(), vocab.words.end()), vocab.words.end());
    if (vocab.words.empty()) throw EmptyVocabulary();
    vocab.index.reserve(vocab.words.size());
    for (std::uint32_t i = 0; i < vocab.words.size(); ++i) vocab.index.emplace(vocab.words[i], i);
    return vocab;
}

std::vector<std::vector<std::uint32_t>> entity_word_ids(const OntologyStore& store,
                                                        const Vocabulary& vocab) {
    std::vector<std::vector<std::uint32_t>> ids(store.n_entities());
    for (EntityId e = 0; e < store.n_entities(); ++e) {
        ids[e].reserve(store.ann_words[e].size());
        for (const std::string& w : store.ann_words[e]) ids[e].push_back(vocab.id_of(w));
        // ann_words is sorted lexicographically and vocab ids follow that
        // order, so each list is already ascending.
    }
    return ids;
}

SparseBinaryMatrix build_inverted_index(const OntologyStore& store, const Vocabulary& vocab,
                                        Exec exec) {
    const std::size_t n_words = vocab.size();
    const std::size_t n_entities = store.n_entities();
    const auto words_of = entity_word_ids(store, vocab);

    SparseBinaryMatrix m;
    m.n_rows = n_words;
    m.n_cols = n_entities;
    m.row_labels = vocab.words;
    m.col_labels = store.entity_iris;
    m.rows.resize(n_words);

    // Count, reserve, scatter with per-row cursors, then sort each row.
    std::vector<std::atomic<std::uint32_t>> cursors(n_words);
    for (auto& c : cursors) c.store(0, std::memory_order_relaxed);
    for (const auto& words : words_of)
        for (std::uint32_t w : words) cursors[w].fetch_add(1, std::memory_order_relaxed);
    for (std::size_t w = 0; w < n_words; ++w) {
        m.rows[w].resize(cursors[w].load(std::memory_order_relaxed));
        cursors[w].store(0, std::memory_order_relaxed);
    }

    parallel_for(exec, static_cast<std::int64_t>(n_entities), [&](std::int64_t e) {
        for (std::uint32_t w : words_of[static_cast<std::size_t>(e)]) {
            const std::uint32_t slot = cursors[w].fetch_add(1, std::memory_order_relaxed);
            m.rows[w][slot] = static_cast<std::uint32_t>(e);
        }
    });
    parallel_for(exec, static_cast<std::int64_t>(n_words), [&](std::int64_t w) {
        std::sort(m.rows[static_cast<std::size_t>(w)].begin(), m.rows[static_cast<std::size_t>(w)].end());
    });
    return m;
}

SparseBinaryMatrix build_cooccurrence(const OntologyStore& store, const Vocabulary& vocab,
                                      Exec exec) {
    const std::size_t n_words = vocab.size();
    const auto words_of = entity_word_ids(store, vocab);
    const SparseBinaryMatrix inverted = build_inverted_index(store, vocab, exec);

    SparseBinaryMatrix m;
    m.n_rows = n_words;
    m.n_cols = n_words;
    m.row_labels = vocab.words;
    m.col_labels = vocab.words;
    m.rows.resize(n_words);

    // Row i is the union of W_ann(e) over all entities e containing word i.
    const int threads = thread_count(exec);
    std::vector<std::vector<char>> seen_per_thread(static_cast<std::size_t>(threads),
                                                   std::vector<char>(n_words, 0));
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16) if (exec == Exec::openmp) num_threads(threads)
#endif
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n_words); ++i) {
#ifdef _OPENMP
        std::vector<char>& seen = seen_per_thread[static_cast<std::size_t>(omp_get_thread_num())];
#else
        std::vector<char>& seen = seen_per_thread[0];
#endif
        std::vector<std::uint32_t>& row = m.rows[static_cast<std::size_t>(i)];
        for (std::uint32_t e : inverted.rows[static_cast<std::size_t>(i)]) {
            for (std::uint32_t w : words_of[e]) {
                if (!seen[w]) {
                    seen[w] = 1;
                    row.push_back(w);
                }
            }
        }
        std::sort(row.begin(), row.end());
        for (std::uint32_t w : row) seen[w] = 0;
    }
    return m;
}

void dump_matrix(const SparseBinaryMatrix& m, std::ostream& out) {
    for (std::size_t r = 0; r < m.n_rows; ++r)
        for (std::uint32_t c : m.rows[r]) out << m.row_labels[r] << '\t' << m.col_labels[c] << '\n';
}

SparseBinaryMatrix load_matrix_dump(std::istream& in, std::vector<std::string> row_labels,
                                    std::vector<std::string> col_labels) {
    SparseBinaryMatrix m;
    m.n_rows = row_labels.size();
    m.n_cols = col_labels.size();
    m.rows.resize(m.n_rows);

    std::unordered_map<std::string, std::uint32_t> row_index, col_index;
    for (std::uint32_t i = 0; i < row_labels.size(); ++i) row_index.emplace(row_labels[i], i);
    for (std::uint32_t i = 0; i < col_labels.size(); ++i) col_index.emplace(col_labels[i], i);

    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        const std::size_t tab = line.find('\t');
        if (tab == std::string::npos) throw ParseError(line_number, "expected row<TAB>col");
        auto r = row_index.find(line.substr(0, tab));
        auto c = col_index.find(line.substr(tab + 1));
        if (r == row_index.end() || c == col_index.end())
            throw ParseError(line_number, "unknown label in matrix dump");
        m.rows[r->second].push_back(c->second);
    }
    for (auto& row : m.rows) std::sort(row.begin(), row.end());
    m.row_labels = std::move(row_labels);
    m.col_labels = std::move(col_labels);
    return m;
}

void save_vocabulary(const Vocabulary& vocab, std::ostream& out) {
    for (const std::string& w : vocab.words) out << w << '\n';
}

Vocabulary load_vocabulary(std::istream& in) {
    Vocabulary vocab;
    std::string word;
    while (std::getline(in, word))
        if (!word.empty()) vocab.words.push_back(word);
    for (std::uint32_t i = 0; i < vocab.words.size(); ++i) vocab.index.emplace(vocab.words[i], i);
    return vocab;
}

}  // namespace subsume
