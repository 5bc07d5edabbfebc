#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "subsume/autoencoder.hpp"
#include "subsume/matrix.hpp"
#include "subsume/ontology.hpp"

namespace subsume {

/// Entity -> vector map, stored IRI-sorted for reproducible files and diffs.
struct EmbeddingTable {
    std::size_t dim = 0;
    std::string source;              // "inme", "come", "imported:<name>", "concat"
    std::vector<std::string> iris;   // sorted
    std::vector<double> data;        // iris.size() x dim, row-major
    std::unordered_map<std::string, std::size_t> index;

    std::size_t size() const { return iris.size(); }
    std::span<const double> vec(std::size_t row) const { return {data.data() + row * dim, dim}; }
    std::span<const double> vec(const std::string& iri) const;
    bool contains(const std::string& iri) const { return index.count(iri) > 0; }

    void rebuild_index();
};

/// Averages the word-embedding rows of each entity's distinct label words;
/// entities with no label words get the zero vector.
EmbeddingTable entity_embeddings(const WordEmbeddingMatrix& words, const OntologyStore& store,
                                 const Vocabulary& vocab, const std::string& source_tag);

/// Per-entity concatenation a(e) followed by b(e). Both tables must cover the
/// same entity set; throws EntityMismatch listing the missing IRIs otherwise.
EmbeddingTable concat_tables(const EmbeddingTable& a, const EmbeddingTable& b);

/// File format: header "dim=<d>", then "<iri><TAB><v1> <v2> ... <vd>" per
/// entity, sorted by IRI.
void export_table(const EmbeddingTable& table, std::ostream& out);
EmbeddingTable import_table(std::istream& in, const std::string& source_tag);

/// Entities whose vector is exactly zero (no label words at build time).
std::vector<std::string> zero_vector_entities(const EmbeddingTable& table);

}  // namespace subsume
