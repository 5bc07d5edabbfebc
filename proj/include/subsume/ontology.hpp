#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "subsume/ntriples.hpp"

namespace subsume {

/// Entity identifiers are ranks in the lexicographic order of entity IRIs, so
/// id comparisons and id-sorted containers are IRI-order deterministic no
/// matter how the input file was shuffled.
using EntityId = std::uint32_t;

using EntityPair = std::pair<EntityId, EntityId>;

struct IngestConfig {
    // Annotation predicate is kept iff (allow empty or listed) and not denied.
    std::vector<std::string> annotation_allow;
    std::vector<std::string> annotation_deny;
};

struct IngestReport {
    std::size_t n_triples = 0;
    std::size_t skipped_blank_node_lines = 0;
    std::size_t n_classes = 0;
    std::size_t n_individuals = 0;
    std::size_t n_annotation_axioms = 0;
    std::size_t n_subsumptions = 0;
    std::size_t n_assertions = 0;
    std::size_t both_typed_kept_as_class = 0;
    std::vector<std::string> flagged_no_ann_words;  // entities with empty W_ann

    std::string to_text() const;
};

/// Classes, individuals, axiom pairs and per-entity word sets of one ontology.
/// Immutable and safe for concurrent reads once finalize_words has run.
struct OntologyStore {
    std::vector<std::string> entity_iris;  // id -> IRI, sorted lexicographically
    std::unordered_map<std::string, EntityId> entity_index;
    std::vector<char> is_class_flag;       // classes and individuals are disjoint
    std::vector<EntityId> classes;         // ascending (== IRI order)
    std::vector<EntityId> individuals;

    std::vector<EntityPair> subsumptions;  // (sub, sup), both classes, sorted unique
    std::vector<EntityPair> assertions;    // (individual, class), sorted unique

    // Kept annotation literals per subject IRI in file order. Subjects that
    // are not entities are retained but contribute nothing downstream.
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> annotations;

    // Populated by finalize_words.
    std::vector<std::vector<std::string>> label_words;  // per id, ordered tokens
    std::vector<std::vector<std::string>> ann_words;    // per id, sorted distinct
    bool finalized = false;

    std::size_t n_entities() const { return entity_iris.size(); }
    const std::string& iri(EntityId id) const { return entity_iris[id]; }
    bool is_class(EntityId id) const { return is_class_flag[id] != 0; }
    EntityId id_of(const std::string& iri) const;

    /// All entity ids 0..n-1 (already IRI-sorted).
    std::vector<EntityId> all_entities() const;

    /// Distinct label words of an entity, sorted.
    std::vector<std::string> label_word_set(EntityId id) const;
};

/// Builds the store from parsed triples. Does not populate word sets.
OntologyStore build_store(const std::vector<Triple>& triples, const IngestConfig& cfg,
                          IngestReport* report = nullptr);

/// Populates label_words / ann_words, with IRI-fragment fallback for entities
/// lacking an rdfs:label annotation. Flags entities whose W_ann is empty.
void finalize_words(OntologyStore& store, IngestReport* report = nullptr);

/// Convenience: parse + build + finalize.
OntologyStore ingest_file(const std::string& path, const IngestConfig& cfg, IngestReport* report = nullptr);

/// Artifact round trip of a finalized store (text, versioned).
void save_store(const OntologyStore& store, std::ostream& out);
OntologyStore load_store(std::istream& in);

}  // namespace subsume
