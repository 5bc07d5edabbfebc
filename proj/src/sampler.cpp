#include "subsume/sampler.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include "subsume/error.hpp"
#include "subsume/rng.hpp"

namespace subsume {

PairSplit split_pairs(const PairVec& pairs, double train_ratio, double valid_ratio,
                      std::uint64_t seed) {
    if (pairs.size() < 10) throw TooFewPairs(pairs.size());
    if (train_ratio <= 0.0 || valid_ratio < 0.0 || train_ratio + valid_ratio >= 1.0)
        throw ConfigError("split", "ratios must satisfy 0 < train, 0 <= valid, train + valid < 1");

    PairVec shuffled = pairs;
    std::sort(shuffled.begin(), shuffled.end());  // input-order independence
    Rng rng(seed);
    shuffle_in_place(shuffled.data(), shuffled.size(), rng);

    const std::size_t n = shuffled.size();
    const std::size_t n_train = static_cast<std::size_t>(static_cast<double>(n) * train_ratio);
    const std::size_t n_valid = static_cast<std::size_t>(static_cast<double>(n) * valid_ratio);

    PairSplit split;
    split.train_pos.assign(shuffled.begin(), shuffled.begin() + n_train);
    split.valid.assign(shuffled.begin() + n_train, shuffled.begin() + n_train + n_valid);
    split.test.assign(shuffled.begin() + n_train + n_valid, shuffled.end());
    return split;
}

PairVec negative_samples(const PairVec& train_pos, const std::vector<EntityId>& pool,
                         const OntologyStore& store, std::uint64_t seed,
                         const PairKeySet* extra_forbidden) {
    if (pool.size() < 2) throw ConfigError("negatives", "candidate pool needs at least 2 entities");
    const PairKeySet positives(train_pos);

    PairVec sorted_pos = train_pos;
    std::sort(sorted_pos.begin(), sorted_pos.end());

    Rng rng(seed);
    PairVec negatives;
    negatives.reserve(sorted_pos.size());
    for (const auto& [sub, sup] : sorted_pos) {
        bool found = false;
        for (int attempt = 0; attempt < 1000; ++attempt) {
            const EntityId candidate = pool[rng.below(pool.size())];
            if (candidate == sup) continue;
            if (positives.contains({sub, candidate})) continue;
            if (extra_forbidden && extra_forbidden->contains({sub, candidate})) continue;
            negatives.emplace_back(sub, candidate);
            found = true;
            break;
        }
        if (!found) throw ExhaustedPool(store.iri(sub));
    }
    return negatives;
}

PairKeySet transitive_closure(const PairVec& pairs) {
    std::unordered_map<EntityId, std::vector<EntityId>> up;
    for (const auto& [sub, sup] : pairs) up[sub].push_back(sup);

    PairKeySet closure;
    std::vector<EntityId> stack;
    std::unordered_set<EntityId> seen;
    for (const auto& [start, direct] : up) {
        seen.clear();
        stack.assign(direct.begin(), direct.end());
        while (!stack.empty()) {
            const EntityId node = stack.back();
            stack.pop_back();
            if (!seen.insert(node).second) continue;
            closure.insert({start, node});
            auto it = up.find(node);
            if (it != up.end()) stack.insert(stack.end(), it->second.begin(), it->second.end());
        }
    }
    return closure;
}

PairVec self_matching_samples(const OntologyStore& store) {
    PairVec pairs;
    pairs.reserve(store.n_entities());
    for (EntityId e = 0; e < store.n_entities(); ++e) pairs.emplace_back(e, e);
    return pairs;
}

namespace {

void append_rows(const PairVec& pairs, std::uint8_t label, const EmbeddingTable& table,
                 const OntologyStore& store, FeatureSet& out) {
    PairVec sorted = pairs;
    std::sort(sorted.begin(), sorted.end());
    for (const auto& [sub, sup] : sorted) {
        const std::span<const double> a = table.vec(store.iri(sub));
        const std::span<const double> b = table.vec(store.iri(sup));
        out.rows.insert(out.rows.end(), a.begin(), a.end());
        out.rows.insert(out.rows.end(), b.begin(), b.end());
        out.labels.push_back(label);
        ++out.n_rows;
    }
}

}  // namespace

FeatureSet assemble_features(const LabeledPairSet& sets, const EmbeddingTable& table,
                             const OntologyStore& store, bool use_self) {
    FeatureSet out;
    out.n_features = 2 * table.dim;
    append_rows(sets.positives, 1, table, store, out);
    if (use_self) append_rows(sets.self_matching, 1, table, store, out);
    append_rows(sets.negatives, 0, table, store, out);
    return out;
}

EntityPartition partition_entities(const PairVec& train_pos, const PairVec& all_pairs) {
    EntityPartition part;
    for (const auto& [sub, sup] : all_pairs) {
        part.universe.insert(sub);
        part.universe.insert(sup);
    }
    for (const auto& [sub, sup] : train_pos) {
        part.universe.insert(sub);
        part.universe.insert(sup);
        part.positive.insert(sub);
        part.positive.insert(sup);
    }
    return part;
}

PairVec drop_trivial_pairs(const PairVec& pairs, const OntologyStore& store) {
    PairVec kept;
    kept.reserve(pairs.size());
    for (const EntityPair& p : pairs) {
        if (store.label_word_set(p.first) != store.label_word_set(p.second)) kept.push_back(p);
    }
    return kept;
}

void save_split(const PairSplit& split, const OntologyStore& store, std::ostream& out) {
    auto write = [&](const char* name, const PairVec& pairs) {
        out << "# " << name << ' ' << pairs.size() << '\n';
        for (const auto& [sub, sup] : pairs) out << store.iri(sub) << '\t' << store.iri(sup) << '\n';
    };
    write("train", split.train_pos);
    write("valid", split.valid);
    write("test", split.test);
}

PairSplit load_split(std::istream& in, const OntologyStore& store) {
    PairSplit split;
    PairVec* section = nullptr;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.find("train") != std::string::npos) section = &split.train_pos;
            else if (line.find("valid") != std::string::npos) section = &split.valid;
            else if (line.find("test") != std::string::npos) section = &split.test;
            else throw ParseError(line_number, "unknown split section: " + line);
            continue;
        }
        if (!section) throw ParseError(line_number, "pair before section header");
        const std::size_t tab = line.find('\t');
        if (tab == std::string::npos) throw ParseError(line_number, "expected sub<TAB>sup");
        section->emplace_back(store.id_of(line.substr(0, tab)), store.id_of(line.substr(tab + 1)));
    }
    return split;
}

}  // namespace subsume
