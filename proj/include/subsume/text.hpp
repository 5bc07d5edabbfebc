#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace subsume {

/// Lowercases, replaces every non-ASCII-letter byte with a space, splits on
/// whitespace and drops tokens shorter than two letters. Order and duplicates
/// are preserved. Every emitted token matches [a-z]{2,}.
std::vector<std::string> tokenize(std::string_view literal);

/// Words recovered from an IRI for entities without an rdfs:label annotation:
/// the fragment after the last '#' or '/' is split on '_', '-' and camel-case
/// boundaries, purely numeric pieces are dropped, and the rest is tokenized.
std::vector<std::string> iri_fallback_words(std::string_view iri);

namespace terms {

inline constexpr std::string_view kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline constexpr std::string_view kRdfsLabel = "http://www.w3.org/2000/01/rdf-schema#label";
inline constexpr std::string_view kRdfsSubClassOf = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
inline constexpr std::string_view kOwlClass = "http://www.w3.org/2002/07/owl#Class";
inline constexpr std::string_view kOwlNamedIndividual = "http://www.w3.org/2002/07/owl#NamedIndividual";

// The compact forms make hand-written fixtures readable; both spellings are
// recognized wherever the vocabulary term matters.
inline bool is_rdf_type(std::string_view iri) { return iri == kRdfType || iri == "rdf:type"; }
inline bool is_rdfs_label(std::string_view iri) { return iri == kRdfsLabel || iri == "rdfs:label"; }
inline bool is_subclass_of(std::string_view iri) {
    return iri == kRdfsSubClassOf || iri == "rdfs:subClassOf";
}
inline bool is_owl_class(std::string_view iri) { return iri == kOwlClass || iri == "owl:Class"; }
inline bool is_named_individual(std::string_view iri) {
    return iri == kOwlNamedIndividual || iri == "owl:NamedIndividual";
}

}  // namespace terms
}  // namespace subsume
