#include "subsume/text.hpp"

#include <cctype>

namespace subsume {

namespace {

bool is_ascii_alpha(unsigned char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_ascii_digit(unsigned char c) { return c >= '0' && c <= '9'; }
bool is_ascii_upper(unsigned char c) { return c >= 'A' && c <= 'Z'; }
bool is_ascii_lower(unsigned char c) { return c >= 'a' && c <= 'z'; }

}  // namespace

std::vector<std::string> tokenize(std::string_view literal) {
    std::vector<std::string> out;
    std::string cur;
    for (unsigned char c : literal) {
        if (is_ascii_alpha(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            if (cur.size() >= 2) out.push_back(cur);
            cur.clear();
        }
    }
    if (cur.size() >= 2) out.push_back(std::move(cur));
    return out;
}

std::vector<std::string> iri_fallback_words(std::string_view iri) {
    const std::size_t cut = iri.find_last_of("#/");
    std::string_view fragment = cut == std::string_view::npos ? iri : iri.substr(cut + 1);

    // Split on '_', '-' and camel-case boundaries: aB -> a|B, ABc -> A|Bc.
    std::vector<std::string> pieces;
    std::string cur;
    for (std::size_t i = 0; i < fragment.size(); ++i) {
        const unsigned char c = static_cast<unsigned char>(fragment[i]);
        if (c == '_' || c == '-') {
            if (!cur.empty()) pieces.push_back(std::move(cur));
            cur.clear();
            continue;
        }
        if (!cur.empty() && is_ascii_upper(c)) {
            const unsigned char prev = static_cast<unsigned char>(fragment[i - 1]);
            const bool next_lower =
                i + 1 < fragment.size() && is_ascii_lower(static_cast<unsigned char>(fragment[i + 1]));
            if (is_ascii_lower(prev) || (is_ascii_upper(prev) && next_lower)) {
                pieces.push_back(std::move(cur));
                cur.clear();
            }
        }
        cur.push_back(static_cast<char>(c));
    }
    if (!cur.empty()) pieces.push_back(std::move(cur));

    std::string joined;
    for (const std::string& piece : pieces) {
        bool numeric = !piece.empty();
        for (unsigned char c : piece) {
            if (!is_ascii_digit(c)) {
                numeric = false;
                break;
            }
        }
        if (numeric) continue;
        if (!joined.empty()) joined.push_back(' ');
        joined += piece;
    }
    return tokenize(joined);
}

}  // namespace subsume
