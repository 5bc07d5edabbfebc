#include "subsume/pipeline.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "subsume/error.hpp"
#include "subsume/rng.hpp"

namespace fs = std::filesystem;

namespace subsume {

const char* emb_kind_name(EmbKind kind) {
    return kind == EmbKind::inverted_index ? "inme" : "come";
}

ModelSpec ModelSpec::parse(const std::string& text) {
    ModelSpec spec;
    if (text == "inme") {
        spec.type = Type::inme;
    } else if (text == "come") {
        spec.type = Type::come;
    } else if (text == "inme_come") {
        spec.type = Type::inme_come;
    } else if (text.rfind("concat:", 0) == 0) {
        spec.type = Type::concat;
        spec.external_path = text.substr(7);
        if (spec.external_path.empty()) throw ConfigError("model", "concat: needs a file path");
    } else {
        throw ConfigError("model", "expected inme|come|inme_come|concat:<file>, got '" + text + "'");
    }
    return spec;
}

std::string ModelSpec::name() const {
    switch (type) {
        case Type::inme: return "inme";
        case Type::come: return "come";
        case Type::inme_come: return "inme_come";
        case Type::concat: return "concat";
    }
    return "?";
}

namespace {

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(value);
    while (std::getline(in, item, ',')) {
        const std::size_t b = item.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        const std::size_t e = item.find_last_not_of(" \t");
        out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "on" || value == "1") return true;
    if (value == "false" || value == "off" || value == "0") return false;
    throw ConfigError(key, "expected a boolean, got '" + value + "'");
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        return std::stoull(value);
    } catch (const std::exception&) {
        throw ConfigError(key, "expected an integer, got '" + value + "'");
    }
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        return std::stod(value);
    } catch (const std::exception&) {
        throw ConfigError(key, "expected a number, got '" + value + "'");
    }
}

}  // namespace

PipelineConfig PipelineConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open " + path);
    PipelineConfig cfg;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t") != std::string::npos)
                throw ConfigError("config", "line " + std::to_string(line_number) +
                                                ": expected key = value");
            continue;
        }
        auto trim = [](std::string s) {
            const std::size_t b = s.find_first_not_of(" \t");
            if (b == std::string::npos) return std::string();
            const std::size_t e = s.find_last_not_of(" \t");
            return s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config", "line " + std::to_string(line_number) + ": empty key");
        cfg.apply(key, value);
    }
    return cfg;
}

void PipelineConfig::apply(const std::string& key, const std::string& value) {
    if (key == "ontology") ontology_path = value;
    else if (key == "workdir") workdir = value;
    else if (key == "seed") seed = parse_u64(key, value);
    else if (key == "model") {
        const std::string base = model.base;  // key order must not matter
        model = ModelSpec::parse(value);
        model.base = base;
    } else if (key == "concat_base") {
        if (value != "inme" && value != "come") throw ConfigError(key, "expected inme or come");
        model.base = value;
    } else if (key == "self_matching") {
        if (value != "on" && value != "off" && value != "auto")
            throw ConfigError(key, "expected on|off|auto");
        self_matching = value;
    } else if (key == "dims") {
        dims.clear();
        for (const std::string& d : split_list(value)) dims.push_back(parse_u64(key, d));
    } else if (key == "external") model.external_path = value;
    else if (key == "helis_trivial_filter") helis_trivial_filter = parse_bool(key, value);
    else if (key == "negatives_exclude_closure") negatives_exclude_closure = parse_bool(key, value);
    else if (key == "split.train") train_ratio = parse_double(key, value);
    else if (key == "split.valid") valid_ratio = parse_double(key, value);
    else if (key == "selfpred.trials") selfpred_trials = parse_u64(key, value);
    else if (key == "annotation_properties.allow") ingest.annotation_allow = split_list(value);
    else if (key == "annotation_properties.deny") ingest.annotation_deny = split_list(value);
    else if (key == "ae.learning_rate") ae.learning_rate = parse_double(key, value);
    else if (key == "ae.epochs") ae.epochs = parse_u64(key, value);
    else if (key == "ae.batch_size") ae.batch_size = parse_u64(key, value);
    else if (key == "rf.n_trees") rf.n_trees = parse_u64(key, value);
    else if (key == "rf.max_depth") {
        const std::uint64_t depth = parse_u64(key, value);
        rf.max_depth = depth == 0 ? std::nullopt : std::optional<std::size_t>(depth);
    } else if (key == "rf.min_samples_leaf") rf.min_samples_leaf = parse_u64(key, value);
    else if (key == "rf.features_per_split") rf.features_per_split = parse_u64(key, value);
    else if (key == "rf.bootstrap") rf.bootstrap = parse_bool(key, value);
    else if (key == "exec") {
        if (value == "serial") exec = Exec::serial;
        else if (value == "openmp") exec = Exec::openmp;
        else throw ConfigError(key, "expected serial or openmp");
    } else throw ConfigError(key, "unknown configuration key");
}

void PipelineConfig::validate() const {
    if (ontology_path.empty()) throw ConfigError("ontology", "no ontology file configured");
    if (!fs::exists(ontology_path)) throw ConfigError("ontology", ontology_path + " does not exist");
    if (workdir.empty()) throw ConfigError("workdir", "must not be empty");
    if (dims.empty()) throw ConfigError("dims", "at least one dimension required");
    for (std::size_t d : dims)
        if (d == 0) throw ConfigError("dims", "dimensions must be positive");
    if (model.type == ModelSpec::Type::concat) {
        if (model.external_path.empty())
            throw ConfigError("external", "concat model needs an external embedding file");
        if (!fs::exists(model.external_path))
            throw ConfigError("external", model.external_path + " does not exist");
    }
    if (train_ratio <= 0.0 || valid_ratio < 0.0 || train_ratio + valid_ratio >= 1.0)
        throw ConfigError("split", "ratios must satisfy 0 < train, 0 <= valid, train + valid < 1");
    if (selfpred_trials == 0) throw ConfigError("selfpred.trials", "must be positive");
}

std::string PipelineConfig::canonical_text() const {
    std::ostringstream out;
    out.precision(17);
    out << "seed=" << seed << ";model=" << model.name() << ";base=" << model.base
        << ";external=" << model.external_path << ";sm=" << self_matching << ";dims=";
    for (std::size_t d : dims) out << d << ',';
    out << ";trivial=" << helis_trivial_filter << ";closure=" << negatives_exclude_closure
        << ";ratios=" << train_ratio << ',' << valid_ratio << ";trials=" << selfpred_trials
        << ";allow=";
    for (const auto& a : ingest.annotation_allow) out << a << ',';
    out << ";deny=";
    for (const auto& d : ingest.annotation_deny) out << d << ',';
    out << ";ae=" << ae.learning_rate << ',' << ae.epochs << ',' << ae.batch_size
        << ";rf=" << rf.n_trees << ',' << (rf.max_depth ? *rf.max_depth : 0) << ','
        << rf.min_samples_leaf << ',' << rf.features_per_split << ',' << rf.bootstrap;
    return out.str();
}

WorkdirLock::WorkdirLock(const std::string& workdir) : path_(workdir + "/.lock") {
    fs::create_directories(workdir);
    const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) throw Error("workdir is locked by another run (remove " + path_ + " if stale)");
    ::close(fd);
}

WorkdirLock::~WorkdirLock() { ::unlink(path_.c_str()); }

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::uint64_t fnv1a_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::uint64_t h = 0xCBF29CE484222325ULL;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001B3ULL;
        }
    }
    return h;
}

std::string hash_stamp(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf, 12);
}

namespace {

std::uint64_t chain(std::uint64_t h, const std::string& text) { return Rng::mix(h, fnv1a(text)); }

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << contents;
}

template <typename Fn>
void write_stream(const std::string& path, Fn&& fn) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    fn(out);
    if (!out) throw Error("failed writing " + path);
}

std::string fmt6(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", x);
    return buf;
}

}  // namespace

Pipeline::Pipeline(PipelineConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    fs::create_directories(cfg_.workdir);
}

std::uint64_t Pipeline::ingest_hash() const {
    if (!ontology_hash_) ontology_hash_ = fnv1a_file(cfg_.ontology_path);
    std::string tag = "ingest-v1;allow=";
    for (const auto& a : cfg_.ingest.annotation_allow) tag += a + ",";
    tag += ";deny=";
    for (const auto& d : cfg_.ingest.annotation_deny) tag += d + ",";
    return chain(*ontology_hash_, tag);
}

std::uint64_t Pipeline::build_hash() const { return chain(ingest_hash(), "build-v1"); }

std::uint64_t Pipeline::ae_hash(EmbKind kind, std::size_t dim) const {
    std::ostringstream tag;
    tag.precision(17);
    tag << "ae-v1;" << emb_kind_name(kind) << ";d=" << dim << ";lr=" << cfg_.ae.learning_rate
        << ";epochs=" << cfg_.ae.epochs << ";batch=" << cfg_.ae.batch_size << ";seed=" << cfg_.seed;
    return chain(build_hash(), tag.str());
}

std::uint64_t Pipeline::embed_hash(std::size_t dim) const {
    switch (cfg_.model.type) {
        case ModelSpec::Type::inme:
            return chain(ae_hash(EmbKind::inverted_index, dim), "emb-v1;inme");
        case ModelSpec::Type::come:
            return chain(ae_hash(EmbKind::cooccurrence, dim), "emb-v1;come");
        case ModelSpec::Type::inme_come:
            return chain(Rng::mix(ae_hash(EmbKind::inverted_index, dim),
                                  ae_hash(EmbKind::cooccurrence, dim)),
                         "emb-v1;inme_come");
        case ModelSpec::Type::concat: {
            const EmbKind base = cfg_.model.base == "inme" ? EmbKind::inverted_index
                                                           : EmbKind::cooccurrence;
            return chain(Rng::mix(ae_hash(base, dim), fnv1a_file(cfg_.model.external_path)),
                         "emb-v1;concat;" + cfg_.model.base);
        }
    }
    throw Error("unreachable model type");
}

std::uint64_t Pipeline::split_hash() const {
    std::ostringstream tag;
    tag.precision(17);
    tag << "split-v1;seed=" << cfg_.seed << ";train=" << cfg_.train_ratio
        << ";valid=" << cfg_.valid_ratio << ";trivial=" << cfg_.helis_trivial_filter
        << ";closure=" << cfg_.negatives_exclude_closure;
    return chain(ingest_hash(), tag.str());
}

std::uint64_t Pipeline::forest_hash(std::size_t dim, bool self_matching) const {
    std::ostringstream tag;
    tag << "rf-v1;trees=" << cfg_.rf.n_trees << ";depth=" << (cfg_.rf.max_depth ? *cfg_.rf.max_depth : 0)
        << ";leaf=" << cfg_.rf.min_samples_leaf << ";k=" << cfg_.rf.features_per_split
        << ";bootstrap=" << cfg_.rf.bootstrap << ";seed=" << cfg_.seed << ";sm=" << self_matching;
    return chain(Rng::mix(embed_hash(dim), split_hash()), tag.str());
}

std::uint64_t Pipeline::eval_hash() const {
    std::uint64_t h = fnv1a("eval-v1");
    for (std::size_t dim : cfg_.dims)
        for (bool sm : self_matching_variants()) h = Rng::mix(h, forest_hash(dim, sm));
    return chain(h, "trials=" + std::to_string(cfg_.selfpred_trials));
}

std::string Pipeline::store_path() const {
    return cfg_.workdir + "/store_" + hash_stamp(ingest_hash()) + ".txt";
}
std::string Pipeline::report_path() const {
    return cfg_.workdir + "/ingest_report_" + hash_stamp(ingest_hash()) + ".txt";
}
std::string Pipeline::vocab_path() const {
    return cfg_.workdir + "/vocab_" + hash_stamp(build_hash()) + ".txt";
}
std::string Pipeline::matrix_path(EmbKind kind) const {
    return cfg_.workdir + "/mat_" + emb_kind_name(kind) + "_" + hash_stamp(build_hash()) + ".tsv";
}
std::string Pipeline::ae_params_path(EmbKind kind, std::size_t dim) const {
    return cfg_.workdir + "/ae_" + emb_kind_name(kind) + "_d" + std::to_string(dim) + "_" +
           hash_stamp(ae_hash(kind, dim)) + ".txt";
}
std::string Pipeline::ae_loss_path(EmbKind kind, std::size_t dim) const {
    return cfg_.workdir + "/ae_loss_" + emb_kind_name(kind) + "_d" + std::to_string(dim) + "_" +
           hash_stamp(ae_hash(kind, dim)) + ".csv";
}
std::string Pipeline::embedding_path(std::size_t dim) const {
    return cfg_.workdir + "/emb_" + cfg_.model.name() + "_d" + std::to_string(dim) + "_" +
           hash_stamp(embed_hash(dim)) + ".tsv";
}
std::string Pipeline::split_path() const {
    return cfg_.workdir + "/split_" + hash_stamp(split_hash()) + ".txt";
}
std::string Pipeline::forest_path(std::size_t dim, bool self_matching) const {
    return cfg_.workdir + "/rf_" + cfg_.model.name() + "_d" + std::to_string(dim) + "_" +
           (self_matching ? "sm" : "plain") + "_" + hash_stamp(forest_hash(dim, self_matching)) +
           ".txt";
}
std::string Pipeline::metrics_csv_path() const {
    return cfg_.workdir + "/metrics_" + hash_stamp(eval_hash()) + ".csv";
}
std::string Pipeline::metrics_text_path() const {
    return cfg_.workdir + "/metrics_" + hash_stamp(eval_hash()) + ".txt";
}
std::string Pipeline::ranks_csv_path() const {
    return cfg_.workdir + "/ranks_" + hash_stamp(eval_hash()) + ".csv";
}
std::string Pipeline::selfpred_path() const {
    return cfg_.workdir + "/selfpred_" + hash_stamp(chain(eval_hash(), "selfpred-v1")) + ".txt";
}
std::string Pipeline::manifest_path() const { return cfg_.workdir + "/manifest.json"; }

std::vector<bool> Pipeline::self_matching_variants() const {
    if (cfg_.self_matching == "on") return {true};
    if (cfg_.self_matching == "off") return {false};
    return {false, true};
}

std::vector<EmbKind> Pipeline::kinds_needed() const {
    switch (cfg_.model.type) {
        case ModelSpec::Type::inme: return {EmbKind::inverted_index};
        case ModelSpec::Type::come: return {EmbKind::cooccurrence};
        case ModelSpec::Type::inme_come: return {EmbKind::inverted_index, EmbKind::cooccurrence};
        case ModelSpec::Type::concat:
            return {cfg_.model.base == "inme" ? EmbKind::inverted_index : EmbKind::cooccurrence};
    }
    throw Error("unreachable model type");
}

void Pipeline::require(const std::string& path, const std::string& stage) const {
    if (!fs::exists(path)) throw MissingArtifact(stage, path + " (run '" + stage + "' first)");
}

const OntologyStore& Pipeline::store() {
    if (!store_) {
        require(store_path(), "ingest");
        std::ifstream in(store_path());
        store_ = load_store(in);
    }
    return *store_;
}

const Vocabulary& Pipeline::vocab() {
    if (!vocab_) {
        require(vocab_path(), "build");
        std::ifstream in(vocab_path());
        vocab_ = load_vocabulary(in);
    }
    return *vocab_;
}

const SparseBinaryMatrix& Pipeline::matrix(EmbKind kind) {
    auto it = matrices_.find(kind);
    if (it != matrices_.end()) return it->second;
    require(matrix_path(kind), "build");
    std::ifstream in(matrix_path(kind));
    std::vector<std::string> cols = kind == EmbKind::inverted_index ? store().entity_iris
                                                                    : vocab().words;
    SparseBinaryMatrix m = load_matrix_dump(in, vocab().words, std::move(cols));
    return matrices_.emplace(kind, std::move(m)).first->second;
}

const AEParams& Pipeline::ae_params(EmbKind kind, std::size_t dim) {
    const auto key = std::make_pair(kind, dim);
    auto it = ae_params_.find(key);
    if (it != ae_params_.end()) return it->second;
    require(ae_params_path(kind, dim), "train-ae");
    std::ifstream in(ae_params_path(kind, dim));
    return ae_params_.emplace(key, load_params(in)).first->second;
}

const EmbeddingTable& Pipeline::table(std::size_t dim) {
    auto it = tables_.find(dim);
    if (it != tables_.end()) return it->second;
    require(embedding_path(dim), "embed");
    std::ifstream in(embedding_path(dim));
    EmbeddingTable t = import_table(in, cfg_.model.name());
    return tables_.emplace(dim, std::move(t)).first->second;
}

const PairSplit& Pipeline::split() {
    if (!split_) {
        require(split_path(), "train-rf");
        std::ifstream in(split_path());
        split_ = load_split(in, store());
    }
    return *split_;
}

PairVec Pipeline::negatives() {
    if (!negatives_) {
        std::optional<PairKeySet> closure;
        if (cfg_.negatives_exclude_closure) closure = transitive_closure(split().train_pos);
        negatives_ = negative_samples(split().train_pos, store().classes, store(),
                                      Rng::mix(cfg_.seed, 12), closure ? &*closure : nullptr);
    }
    return *negatives_;
}

LabeledPairSet Pipeline::labeled_sets() {
    LabeledPairSet sets;
    sets.positives = split().train_pos;
    sets.negatives = negatives();
    sets.self_matching = self_matching_samples(store());
    return sets;
}

const Forest& Pipeline::forest(std::size_t dim, bool self_matching) {
    const auto key = std::make_pair(dim, self_matching);
    auto it = forests_.find(key);
    if (it != forests_.end()) return it->second;
    require(forest_path(dim, self_matching), "train-rf");
    std::ifstream in(forest_path(dim, self_matching));
    return forests_.emplace(key, load_forest(in)).first->second;
}

void Pipeline::cmd_ingest() {
    if (fs::exists(store_path()) && fs::exists(report_path())) {
        std::cout << "[ingest] cached: " << store_path() << "\n";
        return;
    }
    IngestReport report;
    ParseResult parsed = parse_ntriples_file(cfg_.ontology_path);
    OntologyStore st = build_store(parsed.triples, cfg_.ingest, &report);
    report.skipped_blank_node_lines = parsed.skipped_blank_node_lines;
    finalize_words(st, &report);

    write_stream(store_path(), [&](std::ostream& out) { save_store(st, out); });
    write_file(report_path(), report.to_text());
    store_ = std::move(st);
    std::cout << "[ingest] " << store().classes.size() << " classes, "
              << store().individuals.size() << " individuals -> " << store_path() << "\n";
    write_manifest();
}

void Pipeline::cmd_build() {
    require(store_path(), "ingest");
    bool have_all = fs::exists(vocab_path());
    for (EmbKind kind : kinds_needed()) have_all = have_all && fs::exists(matrix_path(kind));
    if (have_all) {
        std::cout << "[build] cached: " << vocab_path() << "\n";
        return;
    }
    const Vocabulary v = build_vocabulary(store());
    write_stream(vocab_path(), [&](std::ostream& out) { save_vocabulary(v, out); });
    vocab_ = v;
    for (EmbKind kind : kinds_needed()) {
        SparseBinaryMatrix m = kind == EmbKind::inverted_index
                                   ? build_inverted_index(store(), v, cfg_.exec)
                                   : build_cooccurrence(store(), v, cfg_.exec);
        write_stream(matrix_path(kind), [&](std::ostream& out) { dump_matrix(m, out); });
        std::cout << "[build] " << emb_kind_name(kind) << " matrix " << m.n_rows << "x" << m.n_cols
                  << " nnz=" << m.nnz() << " -> " << matrix_path(kind) << "\n";
        matrices_[kind] = std::move(m);
    }
    write_manifest();
}

void Pipeline::cmd_train_ae() {
    require(vocab_path(), "build");
    for (EmbKind kind : kinds_needed()) require(matrix_path(kind), "build");

    for (EmbKind kind : kinds_needed()) {
        for (std::size_t dim : cfg_.dims) {
            if (fs::exists(ae_params_path(kind, dim))) {
                std::cout << "[train-ae] cached: " << ae_params_path(kind, dim) << "\n";
                continue;
            }
            AETrainConfig ae = cfg_.ae;
            ae.dim = dim;
            ae.seed = Rng::mix(cfg_.seed, 1000 + 2 * dim + (kind == EmbKind::cooccurrence ? 1 : 0));
            auto [params, history] = train_autoencoder(matrix(kind), ae, cfg_.exec);
            write_stream(ae_params_path(kind, dim),
                         [&](std::ostream& out) { save_params(params, out); });
            write_stream(ae_loss_path(kind, dim), [&](std::ostream& out) {
                out << "epoch,mean_loss\n";
                out.precision(17);
                for (std::size_t e = 0; e < history.size(); ++e) out << e << ',' << history[e] << '\n';
            });
            std::cout << "[train-ae] " << emb_kind_name(kind) << " d=" << dim
                      << " loss " << history.front() << " -> " << history.back() << "\n";
            ae_params_[{kind, dim}] = std::move(params);
        }
    }
    write_manifest();
}

void Pipeline::cmd_embed() {
    for (EmbKind kind : kinds_needed())
        for (std::size_t dim : cfg_.dims) require(ae_params_path(kind, dim), "train-ae");

    for (std::size_t dim : cfg_.dims) {
        if (fs::exists(embedding_path(dim))) {
            std::cout << "[embed] cached: " << embedding_path(dim) << "\n";
            continue;
        }
        auto build_kind_table = [&](EmbKind kind) {
            const WordEmbeddingMatrix words = encode(ae_params(kind, dim), matrix(kind), cfg_.exec);
            return entity_embeddings(words, store(), vocab(), emb_kind_name(kind));
        };
        EmbeddingTable t;
        switch (cfg_.model.type) {
            case ModelSpec::Type::inme: t = build_kind_table(EmbKind::inverted_index); break;
            case ModelSpec::Type::come: t = build_kind_table(EmbKind::cooccurrence); break;
            case ModelSpec::Type::inme_come:
                t = concat_tables(build_kind_table(EmbKind::inverted_index),
                                  build_kind_table(EmbKind::cooccurrence));
                break;
            case ModelSpec::Type::concat: {
                std::ifstream ext(cfg_.model.external_path);
                if (!ext) throw ConfigError("external", "cannot open " + cfg_.model.external_path);
                const EmbeddingTable imported =
                    import_table(ext, "imported:" + cfg_.model.external_path);
                const EmbKind base = cfg_.model.base == "inme" ? EmbKind::inverted_index
                                                               : EmbKind::cooccurrence;
                t = concat_tables(build_kind_table(base), imported);
                break;
            }
        }
        write_stream(embedding_path(dim), [&](std::ostream& out) { export_table(t, out); });
        const std::size_t zeroes = zero_vector_entities(t).size();
        std::cout << "[embed] " << cfg_.model.name() << " d=" << t.dim << " entities=" << t.size()
                  << (zeroes ? " zero-vector=" + std::to_string(zeroes) : "") << " -> "
                  << embedding_path(dim) << "\n";
    }
    write_manifest();
}

void Pipeline::cmd_train_rf() {
    for (std::size_t dim : cfg_.dims) require(embedding_path(dim), "embed");
    require(store_path(), "ingest");

    if (!fs::exists(split_path())) {
        PairVec pairs = store().subsumptions;
        pairs.insert(pairs.end(), store().assertions.begin(), store().assertions.end());
        PairSplit s = split_pairs(pairs, cfg_.train_ratio, cfg_.valid_ratio, Rng::mix(cfg_.seed, 11));
        if (cfg_.helis_trivial_filter) {
            s.valid = drop_trivial_pairs(s.valid, store());
            s.test = drop_trivial_pairs(s.test, store());
        }
        write_stream(split_path(), [&](std::ostream& out) { save_split(s, store(), out); });
        std::cout << "[train-rf] split " << s.train_pos.size() << "/" << s.valid.size() << "/"
                  << s.test.size() << " -> " << split_path() << "\n";
        split_ = std::move(s);
    }

    const LabeledPairSet sets = labeled_sets();
    for (std::size_t dim : cfg_.dims) {
        for (bool sm : self_matching_variants()) {
            if (fs::exists(forest_path(dim, sm))) {
                std::cout << "[train-rf] cached: " << forest_path(dim, sm) << "\n";
                continue;
            }
            const FeatureSet features = assemble_features(sets, table(dim), store(), sm);
            RFConfig rf = cfg_.rf;
            rf.seed = Rng::mix(cfg_.seed, 2000 + 2 * dim + (sm ? 1 : 0));
            Forest f = train_forest(features, rf, cfg_.exec);
            write_stream(forest_path(dim, sm), [&](std::ostream& out) { save_forest(f, out); });
            std::cout << "[train-rf] d=" << dim << " self_matching=" << (sm ? "on" : "off")
                      << " rows=" << features.n_rows << " -> " << forest_path(dim, sm) << "\n";
            forests_[{dim, sm}] = std::move(f);
        }
    }
    write_manifest();
}

void Pipeline::cmd_eval() {
    require(split_path(), "train-rf");
    for (std::size_t dim : cfg_.dims)
        for (bool sm : self_matching_variants()) require(forest_path(dim, sm), "train-rf");
    if (fs::exists(metrics_csv_path()) && fs::exists(metrics_text_path()) &&
        fs::exists(ranks_csv_path())) {
        std::cout << "[eval] cached: " << metrics_csv_path() << "\n";
        return;
    }

    const PairKeySet train_keys(split().train_pos);
    const FilterSet filter{&train_keys, true};
    const std::span<const EntityId> candidates(store().classes.data(), store().classes.size());

    std::map<std::pair<std::size_t, bool>, Metrics> valid_metrics;
    for (std::size_t dim : cfg_.dims) {
        const EmbeddingView view(table(dim), store());
        for (bool sm : self_matching_variants()) {
            const ForestScorer scorer(forest(dim, sm));
            valid_metrics[{dim, sm}] =
                evaluate(scorer, view, store(), split().valid, candidates, filter, cfg_.exec);
        }
    }
    const auto [best_dim, best_sm] = select_model(valid_metrics);
    std::cout << "[eval] selected d=" << best_dim << " self_matching=" << (best_sm ? "on" : "off")
              << " by validation MRR\n";

    PairVec universe = split().train_pos;
    universe.insert(universe.end(), split().test.begin(), split().test.end());
    const EntityPartition partition = partition_entities(split().train_pos, universe);

    const EmbeddingView view(table(best_dim), store());
    const ForestScorer scorer(forest(best_dim, best_sm));
    const std::vector<RankingResult> test_ranks =
        rank_all(scorer, view, store(), split().test, candidates, filter, cfg_.exec);
    const auto restricted =
        restricted_evaluate(scorer, view, store(), split().test, partition, candidates, filter,
                            cfg_.exec);

    write_stream(metrics_csv_path(), [&](std::ostream& out) {
        out << "model,dim,self_matching,dataset,restriction,n,mrr,hits1,hits5,hits10\n";
        for (const auto& [key, m] : valid_metrics) {
            out << cfg_.model.name() << ',' << key.first << ',' << (key.second ? "on" : "off")
                << ",valid,full," << m.n_queries << ',' << fmt6(m.mrr) << ',' << fmt6(m.hits1)
                << ',' << fmt6(m.hits5) << ',' << fmt6(m.hits10) << '\n';
        }
        for (const auto& [name, m] : restricted) {
            out << cfg_.model.name() << ',' << best_dim << ',' << (best_sm ? "on" : "off")
                << ",test," << name << ',' << m.n_queries << ',';
            if (m.valid())
                out << fmt6(m.mrr) << ',' << fmt6(m.hits1) << ',' << fmt6(m.hits5) << ','
                    << fmt6(m.hits10) << '\n';
            else
                out << "-,-,-,-\n";
        }
    });

    write_stream(ranks_csv_path(), [&](std::ostream& out) {
        out << "sub,sup,rank,candidates\n";
        for (const RankingResult& r : test_ranks)
            out << store().iri(r.sub) << ',' << store().iri(r.true_sup) << ',' << r.rank << ','
                << r.candidate_count << '\n';
    });

    write_stream(metrics_text_path(), [&](std::ostream& out) {
        out << "model " << cfg_.model.name() << ", selected dim " << best_dim << ", self-matching "
            << (best_sm ? "on" : "off") << "\n\n";
        out << "validation (full):\n";
        for (const auto& [key, m] : valid_metrics)
            out << "  d=" << key.first << " sm=" << (key.second ? "on " : "off") << "  n="
                << m.n_queries << "  MRR=" << fmt6(m.mrr) << "  H@1=" << fmt6(m.hits1)
                << "  H@5=" << fmt6(m.hits5) << "  H@10=" << fmt6(m.hits10) << "\n";
        out << "\ntest (selected model):\n";
        for (const auto& [name, m] : restricted) {
            out << "  " << name << "  n=" << m.n_queries;
            if (m.valid())
                out << "  MRR=" << fmt6(m.mrr) << "  H@1=" << fmt6(m.hits1) << "  H@5="
                    << fmt6(m.hits5) << "  H@10=" << fmt6(m.hits10);
            else
                out << "  -";
            out << "\n";
        }
    });

    std::cout << "[eval] metrics -> " << metrics_csv_path() << "\n";
    write_manifest();
}

void Pipeline::cmd_selfpred() {
    for (std::size_t dim : cfg_.dims) {
        require(embedding_path(dim), "embed");
        for (bool sm : self_matching_variants()) require(forest_path(dim, sm), "train-rf");
    }
    if (fs::exists(selfpred_path())) {
        std::cout << "[selfpred] cached: " << selfpred_path() << "\n";
        return;
    }
    const std::span<const EntityId> candidates(store().classes.data(), store().classes.size());
    const std::uint64_t seed = Rng::mix(cfg_.seed, 13);

    write_stream(selfpred_path(), [&](std::ostream& out) {
        out << "self-prediction: rank of a randomly embedded entity as its own superclass ("
            << cfg_.selfpred_trials << " trials)\n";
        for (std::size_t dim : cfg_.dims) {
            const DistanceScorer distance;
            const Metrics dm = self_prediction(distance, table(dim), store(), candidates,
                                               cfg_.selfpred_trials, seed, cfg_.exec);
            out << "  d=" << dim << "  distance  MRR=" << fmt6(dm.mrr) << "\n";
            for (bool sm : self_matching_variants()) {
                const ForestScorer scorer(forest(dim, sm));
                const Metrics rm = self_prediction(scorer, table(dim), store(), candidates,
                                                   cfg_.selfpred_trials, seed, cfg_.exec);
                out << "  d=" << dim << "  rf(" << (sm ? "self-matching" : "conventional")
                    << ")  MRR=" << fmt6(rm.mrr) << "\n";
            }
        }
    });
    std::cout << "[selfpred] -> " << selfpred_path() << "\n";
    write_manifest();
}

void Pipeline::cmd_pipeline() {
    cmd_ingest();
    cmd_build();
    cmd_train_ae();
    cmd_embed();
    cmd_train_rf();
    cmd_eval();
    cmd_selfpred();
}

void Pipeline::write_manifest() {
    nlohmann::json manifest;
    manifest["config_hash"] = hash_stamp(fnv1a(cfg_.canonical_text()));
    manifest["seed"] = cfg_.seed;
    manifest["ontology"] = cfg_.ontology_path;
    manifest["ontology_hash"] = hash_stamp(fnv1a_file(cfg_.ontology_path));
    manifest["model"] = cfg_.model.name();
    nlohmann::json artifacts = nlohmann::json::object();
    auto add = [&](const std::string& path) {
        if (fs::exists(path))
            artifacts[fs::path(path).filename().string()] = hash_stamp(fnv1a_file(path));
    };
    add(store_path());
    add(report_path());
    add(vocab_path());
    for (EmbKind kind : kinds_needed()) add(matrix_path(kind));
    for (EmbKind kind : kinds_needed())
        for (std::size_t dim : cfg_.dims) {
            add(ae_params_path(kind, dim));
            add(ae_loss_path(kind, dim));
        }
    for (std::size_t dim : cfg_.dims) add(embedding_path(dim));
    add(split_path());
    for (std::size_t dim : cfg_.dims)
        for (bool sm : self_matching_variants()) add(forest_path(dim, sm));
    add(metrics_csv_path());
    add(metrics_text_path());
    add(ranks_csv_path());
    add(selfpred_path());
    manifest["artifacts"] = artifacts;
    write_file(manifest_path(), manifest.dump(2) + "\n");
}

}  // namespace subsume
