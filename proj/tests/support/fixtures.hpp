#pragma once

// Shared ontology fixtures for the unit and acceptance suites.

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "subsume/ntriples.hpp"
#include "subsume/ontology.hpp"
#include "subsume/rng.hpp"

namespace fixtures {

inline const char* kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline const char* kRdfsLabel = "http://www.w3.org/2000/01/rdf-schema#label";
inline const char* kRdfsSubClassOf = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
inline const char* kOwlClass = "http://www.w3.org/2002/07/owl#Class";
inline const char* kDefinition = "http://purl.obolibrary.org/obo/IAO_0000115";

inline std::string obo(const std::string& local) { return "http://purl.obolibrary.org/obo/" + local; }

class NtriplesBuilder {
public:
    NtriplesBuilder& declare_class(const std::string& iri) {
        line(iri, kRdfType, "<" + std::string(fixtures::kOwlClass) + ">");
        return *this;
    }
    NtriplesBuilder& declare_individual(const std::string& iri) {
        line(iri, kRdfType, "<http://www.w3.org/2002/07/owl#NamedIndividual>");
        return *this;
    }
    NtriplesBuilder& label(const std::string& iri, const std::string& text) {
        line(iri, kRdfsLabel, "\"" + text + "\"");
        return *this;
    }
    NtriplesBuilder& annotate(const std::string& iri, const std::string& prop, const std::string& text) {
        line(iri, prop, "\"" + text + "\"");
        return *this;
    }
    NtriplesBuilder& subclass(const std::string& sub, const std::string& sup) {
        line(sub, kRdfsSubClassOf, "<" + sup + ">");
        return *this;
    }
    NtriplesBuilder& type(const std::string& individual, const std::string& cls) {
        line(individual, kRdfType, "<" + cls + ">");
        return *this;
    }
    NtriplesBuilder& raw(const std::string& text) {
        out_ << text << "\n";
        return *this;
    }
    std::string str() const { return out_.str(); }

private:
    void line(const std::string& s, const std::string& p, const std::string& object) {
        out_ << "<" << s << "> <" << p << "> " << object << " .\n";
    }
    std::ostringstream out_;
};

inline subsume::OntologyStore ingest_string(const std::string& text,
                                            const subsume::IngestConfig& cfg = {},
                                            subsume::IngestReport* report = nullptr) {
    subsume::ParseResult parsed = subsume::parse_ntriples(text);
    subsume::OntologyStore store = subsume::build_store(parsed.triples, cfg, report);
    if (report) report->skipped_blank_node_lines = parsed.skipped_blank_node_lines;
    subsume::finalize_words(store, report);
    return store;
}

/// The three-class nerve-formation fixture: one superclass with two
/// subclasses and three-word labels sharing "nerve formation".
inline std::string go_mini_ntriples() {
    NtriplesBuilder b;
    b.declare_class(obo("GO_0021603")).label(obo("GO_0021603"), "cranial nerve formation");
    b.declare_class(obo("GO_0021611")).label(obo("GO_0021611"), "facial nerve formation");
    b.declare_class(obo("GO_0021620")).label(obo("GO_0021620"), "hypoglossal nerve formation");
    b.subclass(obo("GO_0021611"), obo("GO_0021603"));
    b.subclass(obo("GO_0021620"), obo("GO_0021603"));
    return b.str();
}

inline subsume::OntologyStore go_mini_store() { return ingest_string(go_mini_ntriples()); }

/// Deterministic pure-alphabetic word, always >= 3 letters.
inline std::string word_name(std::size_t i) {
    std::string w;
    do {
        w.push_back(static_cast<char>('a' + i % 26));
        i /= 26;
    } while (i > 0);
    while (w.size() < 3) w.push_back('x');
    return w;
}

/// Random mini-ontology over a shared word pool: classes with 0-4 label words,
/// optional definition annotations, and random subclass pairs.
inline std::string random_mini_ontology(subsume::Rng& rng) {
    const std::size_t n_entities = 3 + rng.below(28);   // <= 30
    const std::size_t pool = 8 + rng.below(48);         // <= 55 distinct words
    NtriplesBuilder b;
    std::vector<std::string> iris;
    for (std::size_t i = 0; i < n_entities; ++i) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "T_%04zu", i);
        const std::string iri = "http://example.org/rand#" + std::string(buf);
        iris.push_back(iri);
        b.declare_class(iri);
        const std::size_t n_label = rng.below(5);  // 0 means IRI fallback (numeric, empty)
        if (n_label > 0) {
            std::string text;
            for (std::size_t k = 0; k < n_label; ++k) {
                if (k) text += ' ';
                text += word_name(rng.below(pool));
            }
            b.label(iri, text);
        }
        if (rng.below(3) == 0) {
            std::string text = word_name(rng.below(pool)) + " " + word_name(rng.below(pool));
            b.annotate(iri, kDefinition, text);
        }
    }
    const std::size_t n_pairs = n_entities / 2;
    for (std::size_t p = 0; p < n_pairs; ++p) {
        const std::size_t a = rng.below(n_entities), c = rng.below(n_entities);
        if (a != c) b.subclass(iris[a], iris[c]);
    }
    return b.str();
}

/// Family-structured ontology for the self-matching comparison. Every
/// subclass shares two of its three label words with each superclass:
///   single components:  X {a,b,c} <= Y {a,b,d}
///   double components:  U {a,b,c} <= V {a,b,v},  U <= W {a,c,w}
/// The two parents of a double component share only one word with each other,
/// so training on one of them teaches little about the other's region.
inline std::string family_ontology(std::size_t n_single, std::size_t n_double) {
    NtriplesBuilder b;
    std::size_t word = 0;
    auto next_word = [&] { return word_name(1000 + word++); };
    std::size_t entity = 0;
    auto iri = [&entity] {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "N_%05zu", entity++);
        return "http://example.org/fam#" + std::string(buf);
    };

    for (std::size_t i = 0; i < n_single; ++i) {
        const std::string shared = next_word() + " " + next_word();
        const std::string sub = iri(), sup = iri();
        b.declare_class(sub).label(sub, shared + " " + next_word());
        b.declare_class(sup).label(sup, shared + " " + next_word());
        b.subclass(sub, sup);
    }
    for (std::size_t i = 0; i < n_double; ++i) {
        const std::string wa = next_word(), wb = next_word(), wc = next_word();
        const std::string sub = iri(), sup1 = iri(), sup2 = iri();
        b.declare_class(sub).label(sub, wa + " " + wb + " " + wc);
        b.declare_class(sup1).label(sup1, wa + " " + wb + " " + next_word());
        b.declare_class(sup2).label(sup2, wa + " " + wc + " " + next_word());
        b.subclass(sub, sup1);
        b.subclass(sub, sup2);
    }
    return b.str();
}

}  // namespace fixtures
