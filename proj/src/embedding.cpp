#include "subsume/embedding.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "subsume/error.hpp"

namespace subsume {

std::span<const double> EmbeddingTable::vec(const std::string& iri) const {
    auto it = index.find(iri);
    if (it == index.end()) throw MissingEmbedding(iri);
    return vec(it->second);
}

void EmbeddingTable::rebuild_index() {
    index.clear();
    index.reserve(iris.size());
    for (std::size_t i = 0; i < iris.size(); ++i) index.emplace(iris[i], i);
}

EmbeddingTable entity_embeddings(const WordEmbeddingMatrix& words, const OntologyStore& store,
                                 const Vocabulary& vocab, const std::string& source_tag) {
    EmbeddingTable table;
    table.dim = words.dim;
    table.source = source_tag;
    table.iris = store.entity_iris;
    table.data.assign(store.n_entities() * words.dim, 0.0);

    for (EntityId e = 0; e < store.n_entities(); ++e) {
        const std::vector<std::string> label_set = store.label_word_set(e);
        if (label_set.empty()) continue;  // zero vector, flagged by caller
        double* dst = table.data.data() + static_cast<std::size_t>(e) * words.dim;
        for (const std::string& w : label_set) {
            const std::span<const double> row = words.row(vocab.id_of(w));
            for (std::size_t j = 0; j < words.dim; ++j) dst[j] += row[j];
        }
        const double inv = 1.0 / static_cast<double>(label_set.size());
        for (std::size_t j = 0; j < words.dim; ++j) dst[j] *= inv;
    }
    table.rebuild_index();
    return table;
}

EmbeddingTable concat_tables(const EmbeddingTable& a, const EmbeddingTable& b) {
    std::string missing;
    for (const std::string& iri : a.iris)
        if (!b.contains(iri)) missing += "\n  missing in second table: " + iri;
    for (const std::string& iri : b.iris)
        if (!a.contains(iri)) missing += "\n  missing in first table: " + iri;
    if (!missing.empty()) throw EntityMismatch("concat entity sets differ:" + missing);

    EmbeddingTable out;
    out.dim = a.dim + b.dim;
    out.source = "concat";
    out.iris = a.iris;
    out.data.resize(a.iris.size() * out.dim);
    for (std::size_t i = 0; i < a.iris.size(); ++i) {
        double* dst = out.data.data() + i * out.dim;
        const std::span<const double> va = a.vec(i);
        const std::span<const double> vb = b.vec(a.iris[i]);
        std::copy(va.begin(), va.end(), dst);
        std::copy(vb.begin(), vb.end(), dst + a.dim);
    }
    out.rebuild_index();
    return out;
}

void export_table(const EmbeddingTable& table, std::ostream& out) {
    out << "dim=" << table.dim << '\n';
    char buf[40];
    for (std::size_t i = 0; i < table.size(); ++i) {
        out << table.iris[i];
        const std::span<const double> v = table.vec(i);
        for (std::size_t j = 0; j < table.dim; ++j) {
            std::snprintf(buf, sizeof(buf), "%.10g", v[j]);
            out << (j == 0 ? '\t' : ' ') << buf;
        }
        out << '\n';
    }
}

EmbeddingTable import_table(std::istream& in, const std::string& source_tag) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("dim=", 0) != 0)
        throw ParseError(1, "expected header dim=<d>");
    EmbeddingTable table;
    table.source = source_tag;
    try {
        table.dim = std::stoul(line.substr(4));
    } catch (const std::exception&) {
        throw ParseError(1, "bad dimension: " + line);
    }
    if (table.dim == 0) throw DimInconsistent("dimension must be positive");

    std::size_t line_number = 1;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        const std::size_t tab = line.find('\t');
        if (tab == std::string::npos) throw ParseError(line_number, "expected <iri><TAB><values>");
        std::string iri = line.substr(0, tab);
        if (table.index.count(iri)) throw DuplicateEntity(iri);

        std::istringstream values(line.substr(tab + 1));
        std::vector<double> v;
        v.reserve(table.dim);
        double x;
        while (values >> x) v.push_back(x);
        if (v.size() != table.dim)
            throw DimInconsistent("line " + std::to_string(line_number) + ": expected " +
                                  std::to_string(table.dim) + " components, got " +
                                  std::to_string(v.size()));

        table.index.emplace(iri, table.iris.size());
        table.iris.push_back(std::move(iri));
        table.data.insert(table.data.end(), v.begin(), v.end());
    }

    // Re-sort by IRI so imported tables behave like built ones.
    std::vector<std::size_t> perm(table.iris.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::sort(perm.begin(), perm.end(),
              [&](std::size_t a, std::size_t b) { return table.iris[a] < table.iris[b]; });
    EmbeddingTable sorted;
    sorted.dim = table.dim;
    sorted.source = table.source;
    sorted.iris.reserve(perm.size());
    sorted.data.reserve(table.data.size());
    for (std::size_t i : perm) {
        sorted.iris.push_back(table.iris[i]);
        const double* src = table.data.data() + i * table.dim;
        sorted.data.insert(sorted.data.end(), src, src + table.dim);
    }
    sorted.rebuild_index();
    return sorted;
}

std::vector<std::string> zero_vector_entities(const EmbeddingTable& table) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < table.size(); ++i) {
        const std::span<const double> v = table.vec(i);
        if (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; }))
            out.push_back(table.iris[i]);
    }
    return out;
}

}  // namespace subsume
