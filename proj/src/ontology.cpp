#include "subsume/ontology.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "subsume/error.hpp"
#include "subsume/text.hpp"

namespace subsume {

EntityId OntologyStore::id_of(const std::string& iri) const {
    auto it = entity_index.find(iri);
    if (it == entity_index.end()) throw Error("unknown entity: " + iri);
    return it->second;
}

std::vector<EntityId> OntologyStore::all_entities() const {
    std::vector<EntityId> ids(n_entities());
    for (EntityId i = 0; i < ids.size(); ++i) ids[i] = i;
    return ids;
}

std::vector<std::string> OntologyStore::label_word_set(EntityId id) const {
    std::vector<std::string> set = label_words[id];
    std::sort(set.begin(), set.end());
    set.erase(std::unique(set.begin(), set.end()), set.end());
    return set;
}

std::string IngestReport::to_text() const {
    std::ostringstream out;
    out << "ingest report\n";
    out << "  triples parsed:            " << n_triples << "\n";
    out << "  blank-node lines skipped:  " << skipped_blank_node_lines << "\n";
    out << "  classes:                   " << n_classes << "\n";
    out << "  individuals:               " << n_individuals << "\n";
    out << "  annotation axioms:         " << n_annotation_axioms << "\n";
    out << "  subsumptions:              " << n_subsumptions << "\n";
    out << "  assertions:                " << n_assertions << "\n";
    if (both_typed_kept_as_class > 0)
        out << "  typed as class and individual (kept as class): " << both_typed_kept_as_class << "\n";
    out << "  entities with no annotation words: " << flagged_no_ann_words.size() << "\n";
    for (const std::string& iri : flagged_no_ann_words) out << "    " << iri << "\n";
    return out.str();
}

namespace {

bool annotation_property_kept(const std::string& predicate, const IngestConfig& cfg) {
    if (!cfg.annotation_allow.empty() &&
        std::find(cfg.annotation_allow.begin(), cfg.annotation_allow.end(), predicate) ==
            cfg.annotation_allow.end())
        return false;
    return std::find(cfg.annotation_deny.begin(), cfg.annotation_deny.end(), predicate) ==
           cfg.annotation_deny.end();
}

}  // namespace

OntologyStore build_store(const std::vector<Triple>& triples, const IngestConfig& cfg,
                          IngestReport* report) {
    std::set<std::string> class_iris;
    std::set<std::string> individual_iris;
    std::set<std::pair<std::string, std::string>> subclass_pairs;
    std::set<std::pair<std::string, std::string>> type_pairs;

    OntologyStore store;

    for (const Triple& t : triples) {
        if (t.object.is_literal()) {
            if (annotation_property_kept(t.predicate, cfg))
                store.annotations[t.subject].emplace_back(t.predicate, t.object.value);
            continue;
        }
        const std::string& obj = t.object.value;
        if (terms::is_rdf_type(t.predicate)) {
            if (terms::is_owl_class(obj)) {
                class_iris.insert(t.subject);
            } else if (terms::is_named_individual(obj)) {
                individual_iris.insert(t.subject);
            } else {
                type_pairs.emplace(t.subject, obj);
            }
        } else if (terms::is_subclass_of(t.predicate)) {
            subclass_pairs.emplace(t.subject, obj);
        }
    }

    std::size_t both_typed = 0;
    for (const std::string& iri : class_iris) both_typed += individual_iris.erase(iri);

    if (class_iris.empty() && individual_iris.empty()) throw EmptyOntology();

    for (const std::string& iri : class_iris) store.entity_iris.push_back(iri);
    for (const std::string& iri : individual_iris) store.entity_iris.push_back(iri);
    std::sort(store.entity_iris.begin(), store.entity_iris.end());

    store.is_class_flag.resize(store.entity_iris.size());
    for (EntityId id = 0; id < store.entity_iris.size(); ++id) {
        const std::string& iri = store.entity_iris[id];
        store.entity_index.emplace(iri, id);
        const bool is_class = class_iris.count(iri) > 0;
        store.is_class_flag[id] = is_class ? 1 : 0;
        (is_class ? store.classes : store.individuals).push_back(id);
    }

    for (const auto& [sub, sup] : subclass_pairs) {
        auto s = store.entity_index.find(sub);
        auto o = store.entity_index.find(sup);
        if (s == store.entity_index.end() || o == store.entity_index.end()) continue;
        if (store.is_class(s->second) && store.is_class(o->second))
            store.subsumptions.emplace_back(s->second, o->second);
    }
    for (const auto& [subj, type] : type_pairs) {
        auto s = store.entity_index.find(subj);
        auto o = store.entity_index.find(type);
        if (s == store.entity_index.end() || o == store.entity_index.end()) continue;
        if (!store.is_class(s->second) && store.is_class(o->second))
            store.assertions.emplace_back(s->second, o->second);
    }
    std::sort(store.subsumptions.begin(), store.subsumptions.end());
    store.subsumptions.erase(std::unique(store.subsumptions.begin(), store.subsumptions.end()),
                             store.subsumptions.end());
    std::sort(store.assertions.begin(), store.assertions.end());
    store.assertions.erase(std::unique(store.assertions.begin(), store.assertions.end()),
                           store.assertions.end());

    if (report) {
        report->n_triples = triples.size();
        report->n_classes = store.classes.size();
        report->n_individuals = store.individuals.size();
        std::size_t n_ann = 0;
        for (const auto& [subject, list] : store.annotations) n_ann += list.size();
        report->n_annotation_axioms = n_ann;
        report->n_subsumptions = store.subsumptions.size();
        report->n_assertions = store.assertions.size();
        report->both_typed_kept_as_class = both_typed;
    }
    return store;
}

void finalize_words(OntologyStore& store, IngestReport* report) {
    const std::size_t n = store.n_entities();
    store.label_words.assign(n, {});
    store.ann_words.assign(n, {});

    for (EntityId id = 0; id < n; ++id) {
        std::vector<std::string>& labels = store.label_words[id];
        std::set<std::string> ann;

        auto it = store.annotations.find(store.entity_iris[id]);
        const bool has_label_annotation = [&] {
            if (it == store.annotations.end()) return false;
            for (const auto& [prop, literal] : it->second)
                if (terms::is_rdfs_label(prop)) return true;
            return false;
        }();

        if (it != store.annotations.end()) {
            for (const auto& [prop, literal] : it->second) {
                std::vector<std::string> tokens = tokenize(literal);
                ann.insert(tokens.begin(), tokens.end());
                if (terms::is_rdfs_label(prop))
                    labels.insert(labels.end(), tokens.begin(), tokens.end());
            }
        }
        if (!has_label_annotation) {
            labels = iri_fallback_words(store.entity_iris[id]);
            ann.insert(labels.begin(), labels.end());
        }
        store.ann_words[id].assign(ann.begin(), ann.end());

        if (report && ann.empty()) report->flagged_no_ann_words.push_back(store.entity_iris[id]);
    }
    store.finalized = true;
}

OntologyStore ingest_file(const std::string& path, const IngestConfig& cfg, IngestReport* report) {
    ParseResult parsed = parse_ntriples_file(path);
    OntologyStore store = build_store(parsed.triples, cfg, report);
    if (report) report->skipped_blank_node_lines = parsed.skipped_blank_node_lines;
    finalize_words(store, report);
    return store;
}

namespace {

// Word lists are space-joined; words match [a-z]{2,} so the join is lossless.
void write_words(std::ostream& out, const std::vector<std::string>& words) {
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i) out << ' ';
        out << words[i];
    }
}

std::vector<std::string> split_words(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string w;
    while (in >> w) out.push_back(std::move(w));
    return out;
}

}  // namespace

void save_store(const OntologyStore& store, std::ostream& out) {
    out << "store v1\n";
    out << "entities " << store.n_entities() << "\n";
    for (EntityId id = 0; id < store.n_entities(); ++id)
        out << (store.is_class(id) ? 'C' : 'I') << '\t' << store.iri(id) << "\n";
    out << "subsumptions " << store.subsumptions.size() << "\n";
    for (const auto& [sub, sup] : store.subsumptions)
        out << store.iri(sub) << '\t' << store.iri(sup) << "\n";
    out << "assertions " << store.assertions.size() << "\n";
    for (const auto& [ind, cls] : store.assertions)
        out << store.iri(ind) << '\t' << store.iri(cls) << "\n";
    out << "label_words " << store.n_entities() << "\n";
    for (EntityId id = 0; id < store.n_entities(); ++id) {
        write_words(out, store.label_words[id]);
        out << "\n";
    }
    out << "ann_words " << store.n_entities() << "\n";
    for (EntityId id = 0; id < store.n_entities(); ++id) {
        write_words(out, store.ann_words[id]);
        out << "\n";
    }
}

OntologyStore load_store(std::istream& in) {
    auto expect_section = [&](const char* name) -> std::size_t {
        std::string tag;
        std::size_t count = 0;
        if (!(in >> tag >> count) || tag != name) throw Error(std::string("store file: expected ") + name);
        in.ignore();  // newline
        return count;
    };

    std::string header;
    std::getline(in, header);
    if (header != "store v1") throw Error("store file: bad header");

    OntologyStore store;
    const std::size_t n = expect_section("entities");
    store.entity_iris.reserve(n);
    store.is_class_flag.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::string line;
        std::getline(in, line);
        if (line.size() < 3 || line[1] != '\t') throw Error("store file: bad entity line");
        store.is_class_flag.push_back(line[0] == 'C' ? 1 : 0);
        store.entity_iris.push_back(line.substr(2));
    }
    for (EntityId id = 0; id < n; ++id) {
        store.entity_index.emplace(store.entity_iris[id], id);
        (store.is_class(id) ? store.classes : store.individuals).push_back(id);
    }

    auto read_pairs = [&](const char* name, std::vector<EntityPair>& out) {
        const std::size_t count = expect_section(name);
        out.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            std::string line;
            std::getline(in, line);
            const std::size_t tab = line.find('\t');
            if (tab == std::string::npos) throw Error("store file: bad pair line");
            out.emplace_back(store.id_of(line.substr(0, tab)), store.id_of(line.substr(tab + 1)));
        }
    };
    read_pairs("subsumptions", store.subsumptions);
    read_pairs("assertions", store.assertions);

    auto read_words = [&](const char* name, std::vector<std::vector<std::string>>& out) {
        const std::size_t count = expect_section(name);
        if (count != n) throw Error("store file: word section size mismatch");
        out.resize(count);
        for (std::size_t i = 0; i < count; ++i) {
            std::string line;
            std::getline(in, line);
            out[i] = split_words(line);
        }
    };
    read_words("label_words", store.label_words);
    read_words("ann_words", store.ann_words);
    store.finalized = true;
    return store;
}

}  // namespace subsume
