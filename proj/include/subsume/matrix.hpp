#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "subsume/ontology.hpp"
#include "subsume/parallel.hpp"

namespace subsume {

/// Sorted distinct union of all entity annotation words.
struct Vocabulary {
    std::vector<std::string> words;                      // lexicographic
    std::unordered_map<std::string, std::uint32_t> index;

    std::size_t size() const { return words.size(); }
    std::uint32_t id_of(const std::string& word) const;
};

/// Binary matrix storing only the column indices of the ones, one sorted list
/// per row. Immutable once built; shareable across threads.
struct SparseBinaryMatrix {
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::vector<std::vector<std::uint32_t>> rows;
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;

    bool at(std::size_t row, std::uint32_t col) const;
    std::size_t nnz() const;
};

Vocabulary build_vocabulary(const OntologyStore& store);

/// Per-entity sorted word-id lists (columns of the inverted index).
std::vector<std::vector<std::uint32_t>> entity_word_ids(const OntologyStore& store,
                                                        const Vocabulary& vocab);

/// Word-by-entity occurrence matrix: one at (i, j) iff word i is in W_ann of
/// entity j. Columns follow the store's IRI-sorted entity order.
SparseBinaryMatrix build_inverted_index(const OntologyStore& store, const Vocabulary& vocab,
                                        Exec exec = Exec::openmp);

/// Word-by-word matrix: one at (i, j) iff some entity's W_ann contains both
/// words. Symmetric with an all-ones diagonal.
SparseBinaryMatrix build_cooccurrence(const OntologyStore& store, const Vocabulary& vocab,
                                      Exec exec = Exec::openmp);

/// One nonzero per line as "row_label<TAB>col_label", sorted; bit-exact for
/// golden-file comparisons.
void dump_matrix(const SparseBinaryMatrix& m, std::ostream& out);

/// Rebuilds a matrix from its dump given the full label lists (zero rows and
/// columns are not present in the dump).
SparseBinaryMatrix load_matrix_dump(std::istream& in, std::vector<std::string> row_labels,
                                    std::vector<std::string> col_labels);

void save_vocabulary(const Vocabulary& vocab, std::ostream& out);
Vocabulary load_vocabulary(std::istream& in);

}  // namespace subsume
