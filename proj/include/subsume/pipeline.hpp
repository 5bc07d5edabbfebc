#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "subsume/autoencoder.hpp"
#include "subsume/embedding.hpp"
#include "subsume/evaluator.hpp"
#include "subsume/forest.hpp"
#include "subsume/matrix.hpp"
#include "subsume/ontology.hpp"
#include "subsume/parallel.hpp"
#include "subsume/sampler.hpp"

namespace subsume {

/// Which matrix an embedding is encoded from.
enum class EmbKind { inverted_index, cooccurrence };
const char* emb_kind_name(EmbKind kind);  // "inme" / "come"

struct ModelSpec {
    enum class Type { inme, come, inme_come, concat };
    Type type = Type::inme;
    std::string external_path;  // concat only
    std::string base = "come";  // embedding concatenated with the import

    static ModelSpec parse(const std::string& text);
    std::string name() const;
};

struct PipelineConfig {
    std::string ontology_path;
    std::string workdir = "work";
    std::uint64_t seed = 42;
    ModelSpec model;
    std::string self_matching = "auto";  // on | off | auto
    std::vector<std::size_t> dims = {50, 100, 200};
    bool helis_trivial_filter = false;
    bool negatives_exclude_closure = false;  // also reject transitively implied pairs
    double train_ratio = 0.7;
    double valid_ratio = 0.1;
    std::size_t selfpred_trials = 100;
    IngestConfig ingest;
    AETrainConfig ae;  // dim and seed are overridden per grid entry
    RFConfig rf;       // seed is overridden per variant
    Exec exec = Exec::openmp;

    static PipelineConfig from_file(const std::string& path);
    void apply(const std::string& key, const std::string& value);
    void validate() const;

    /// Stable text rendering of every field that affects results; hashed into
    /// artifact names.
    std::string canonical_text() const;
};

/// Holds the workdir lock for the lifetime of one pipeline run.
class WorkdirLock {
public:
    explicit WorkdirLock(const std::string& workdir);
    ~WorkdirLock();
    WorkdirLock(const WorkdirLock&) = delete;
    WorkdirLock& operator=(const WorkdirLock&) = delete;

private:
    std::string path_;
};

std::uint64_t fnv1a(std::string_view bytes);
std::uint64_t fnv1a_file(const std::string& path);
std::string hash_stamp(std::uint64_t h);  // 12 hex chars

/// Config-driven pipeline. Every artifact lands in the workdir under a
/// content-hash-stamped name; a stage whose outputs already exist reloads
/// them instead of recomputing, so reruns with unchanged inputs are no-ops.
class Pipeline {
public:
    explicit Pipeline(PipelineConfig cfg);

    // Stage commands. Each requires the artifacts of the stages before it and
    // throws MissingArtifact when they are absent; cmd_pipeline chains all.
    void cmd_ingest();
    void cmd_build();
    void cmd_train_ae();
    void cmd_embed();
    void cmd_train_rf();
    void cmd_eval();
    void cmd_selfpred();
    void cmd_pipeline();

    // Artifact paths, derived from config alone.
    std::string store_path() const;
    std::string report_path() const;
    std::string vocab_path() const;
    std::string matrix_path(EmbKind kind) const;
    std::string ae_params_path(EmbKind kind, std::size_t dim) const;
    std::string ae_loss_path(EmbKind kind, std::size_t dim) const;
    std::string embedding_path(std::size_t dim) const;
    std::string split_path() const;
    std::string forest_path(std::size_t dim, bool self_matching) const;
    std::string metrics_csv_path() const;
    std::string metrics_text_path() const;
    std::string ranks_csv_path() const;
    std::string selfpred_path() const;
    std::string manifest_path() const;

    const PipelineConfig& config() const { return cfg_; }

    // Loaded-artifact accessors used by the commands and by tests.
    const OntologyStore& store();
    const Vocabulary& vocab();
    const SparseBinaryMatrix& matrix(EmbKind kind);
    const AEParams& ae_params(EmbKind kind, std::size_t dim);
    const EmbeddingTable& table(std::size_t dim);
    const PairSplit& split();

    std::vector<bool> self_matching_variants() const;

private:
    struct EvalOutcome {
        std::size_t dim = 0;
        bool self_matching = false;
        Metrics valid_full;
    };

    std::uint64_t ingest_hash() const;
    std::uint64_t build_hash() const;
    std::uint64_t ae_hash(EmbKind kind, std::size_t dim) const;
    std::uint64_t embed_hash(std::size_t dim) const;
    std::uint64_t split_hash() const;
    std::uint64_t forest_hash(std::size_t dim, bool self_matching) const;
    std::uint64_t eval_hash() const;

    std::vector<EmbKind> kinds_needed() const;
    void require(const std::string& path, const std::string& stage) const;
    const Forest& forest(std::size_t dim, bool self_matching);
    PairVec negatives();
    LabeledPairSet labeled_sets();
    void write_manifest();

    PipelineConfig cfg_;
    mutable std::optional<std::uint64_t> ontology_hash_;

    std::optional<OntologyStore> store_;
    std::optional<Vocabulary> vocab_;
    std::map<EmbKind, SparseBinaryMatrix> matrices_;
    std::map<std::pair<EmbKind, std::size_t>, AEParams> ae_params_;
    std::map<std::size_t, EmbeddingTable> tables_;
    std::optional<PairSplit> split_;
    std::optional<PairVec> negatives_;
    std::map<std::pair<std::size_t, bool>, Forest> forests_;
};

}  // namespace subsume
