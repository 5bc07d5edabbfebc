#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace subsume {

/// Object position of a triple: exactly one of IRI or literal.
struct Term {
    enum class Kind { iri, literal };
    Kind kind = Kind::iri;
    std::string value;  // IRI string or decoded lexical form
    std::string lang;   // optional language tag, literals only

    bool is_iri() const { return kind == Kind::iri; }
    bool is_literal() const { return kind == Kind::literal; }
};

struct Triple {
    std::string subject;
    std::string predicate;
    Term object;
};

struct ParseResult {
    std::vector<Triple> triples;
    std::size_t skipped_blank_node_lines = 0;
};

/// Line-oriented N-Triples parser. IRIs in angle brackets, literals in double
/// quotes with optional @lang or ^^<datatype> suffix (the datatype is dropped,
/// the lexical form kept). Blank and comment lines are ignored; lines with
/// blank-node subjects or objects are counted and skipped. Throws
/// MalformedLine on anything else that fails the grammar.
ParseResult parse_ntriples(std::istream& in);
ParseResult parse_ntriples(const std::string& text);
ParseResult parse_ntriples_file(const std::string& path);

}  // namespace subsume
