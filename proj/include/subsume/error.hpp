#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace subsume {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MalformedLine : Error {
    std::size_t line_number;
    MalformedLine(std::size_t line, const std::string& detail)
        : Error("malformed line " + std::to_string(line) + ": " + detail), line_number(line) {}
};

struct EmptyOntology : Error {
    EmptyOntology() : Error("ontology has no classes or individuals") {}
};

struct EmptyVocabulary : Error {
    EmptyVocabulary() : Error("no entity has annotation words") {}
};

struct NonFiniteActivation : Error {
    NonFiniteActivation() : Error("autoencoder produced a non-finite activation") {}
};

struct DivergedLoss : Error {
    DivergedLoss() : Error("training loss became non-finite") {}
};

struct ShapeMismatch : Error {
    using Error::Error;
};

struct EntityMismatch : Error {
    using Error::Error;
};

struct DimInconsistent : Error {
    using Error::Error;
};

struct DuplicateEntity : Error {
    DuplicateEntity(const std::string& iri) : Error("duplicate entity: " + iri) {}
};

struct ParseError : Error {
    std::size_t line_number;
    ParseError(std::size_t line, const std::string& detail)
        : Error("parse error at line " + std::to_string(line) + ": " + detail), line_number(line) {}
};

struct TooFewPairs : Error {
    TooFewPairs(std::size_t n) : Error("need at least 10 pairs to split, got " + std::to_string(n)) {}
};

struct ExhaustedPool : Error {
    ExhaustedPool(const std::string& iri)
        : Error("negative sampling exhausted 1000 resamples for " + iri) {}
};

struct SingleClassData : Error {
    SingleClassData() : Error("training data contains a single class") {}
};

struct DimMismatch : Error {
    using Error::Error;
};

struct MissingEmbedding : Error {
    MissingEmbedding(const std::string& iri) : Error("no embedding for entity: " + iri) {}
};

struct MissingArtifact : Error {
    std::string stage;
    MissingArtifact(const std::string& stage_, const std::string& what_)
        : Error("missing artifact from stage '" + stage_ + "': " + what_), stage(stage_) {}
};

struct ConfigError : Error {
    std::string field;
    ConfigError(const std::string& field_, const std::string& detail)
        : Error("config error (" + field_ + "): " + detail), field(field_) {}
};

}  // namespace subsume
