#include "subsume/ntriples.hpp"

#include <fstream>
#include <istream>
#include <sstream>

#include "subsume/error.hpp"

namespace subsume {

namespace {

struct LineCursor {
    std::string_view text;
    std::size_t pos = 0;
    std::size_t line_number;

    explicit LineCursor(std::string_view t, std::size_t line) : text(t), line_number(line) {}

    [[noreturn]] void fail(const std::string& detail) const { throw MalformedLine(line_number, detail); }

    bool done() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }

    void skip_ws() {
        while (!done() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    }

    bool at_blank_node() const {
        return pos + 1 < text.size() && text[pos] == '_' && text[pos + 1] == ':';
    }

    void skip_blank_node_label() {
        pos += 2;
        while (!done() && text[pos] != ' ' && text[pos] != '\t') ++pos;
    }

    std::string read_iri() {
        if (done() || text[pos] != '<') fail("expected '<'");
        ++pos;
        std::string iri;
        while (!done() && text[pos] != '>') {
            const char c = text[pos];
            if (c == ' ' || c == '\t') fail("whitespace inside IRI");
            iri.push_back(c);
            ++pos;
        }
        if (done()) fail("unterminated IRI");
        ++pos;  // '>'
        if (iri.empty()) fail("empty IRI");
        return iri;
    }

    void append_unicode_escape(std::string& out, int digits) {
        if (pos + static_cast<std::size_t>(digits) > text.size()) fail("truncated \\u escape");
        std::uint32_t code = 0;
        for (int i = 0; i < digits; ++i) {
            const char c = text[pos++];
            code <<= 4;
            if (c >= '0' && c <= '9') code |= static_cast<std::uint32_t>(c - '0');
            else if (c >= 'a' && c <= 'f') code |= static_cast<std::uint32_t>(c - 'a' + 10);
            else if (c >= 'A' && c <= 'F') code |= static_cast<std::uint32_t>(c - 'A' + 10);
            else fail("invalid hex digit in \\u escape");
        }
        // UTF-8 encode
        if (code < 0x80) {
            out.push_back(static_cast<char>(code));
        } else if (code < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (code >> 6)));
            out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
        } else if (code < 0x10000) {
            out.push_back(static_cast<char>(0xE0 | (code >> 12)));
            out.push_back(static_cast<char>(0x80 | ((code >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xF0 | (code >> 18)));
            out.push_back(static_cast<char>(0x80 | ((code >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((code >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
        }
    }

    std::string read_quoted() {
        ++pos;  // opening '"'
        std::string out;
        while (true) {
            if (done()) fail("unterminated literal");
            const char c = text[pos];
            if (c == '"') {
                ++pos;
                return out;
            }
            if (c == '\\') {
                ++pos;
                if (done()) fail("trailing backslash");
                const char e = text[pos++];
                switch (e) {
                    case '"': out.push_back('"'); break;
                    case '\\': out.push_back('\\'); break;
                    case 'n': out.push_back('\n'); break;
                    case 't': out.push_back('\t'); break;
                    case 'r': out.push_back('\r'); break;
                    case 'u': append_unicode_escape(out, 4); break;
                    case 'U': append_unicode_escape(out, 8); break;
                    default: fail(std::string("unknown escape \\") + e);
                }
                continue;
            }
            out.push_back(c);
            ++pos;
        }
    }

    Term read_literal() {
        Term term;
        term.kind = Term::Kind::literal;
        term.value = read_quoted();
        if (!done() && text[pos] == '@') {
            ++pos;
            while (!done() && text[pos] != ' ' && text[pos] != '\t') term.lang.push_back(text[pos++]);
            if (term.lang.empty()) fail("empty language tag");
        } else if (pos + 1 < text.size() && text[pos] == '^' && text[pos + 1] == '^') {
            pos += 2;
            read_iri();  // datatype dropped, lexical form kept
        }
        return term;
    }
};

// Parses one nonempty line; returns false if the line held a blank node.
bool parse_line(std::string_view line, std::size_t line_number, Triple& out) {
    LineCursor cur(line, line_number);

    cur.skip_ws();
    if (cur.at_blank_node()) {
        // still validate the terminator loosely: skip to end
        return false;
    }
    out.subject = cur.read_iri();

    cur.skip_ws();
    out.predicate = cur.read_iri();

    cur.skip_ws();
    if (cur.done()) cur.fail("missing object");
    if (cur.at_blank_node()) return false;
    if (cur.peek() == '<') {
        out.object.kind = Term::Kind::iri;
        out.object.value = cur.read_iri();
        out.object.lang.clear();
    } else if (cur.peek() == '"') {
        out.object = cur.read_literal();
    } else {
        cur.fail("object must be an IRI, blank node, or literal");
    }

    cur.skip_ws();
    if (cur.done() || cur.peek() != '.') cur.fail("missing '.' terminator");
    ++cur.pos;
    cur.skip_ws();
    if (!cur.done() && cur.peek() != '#') cur.fail("trailing content after '.'");
    return true;
}

}  // namespace

ParseResult parse_ntriples(std::istream& in) {
    ParseResult result;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();

        std::string_view view(line);
        std::size_t first = view.find_first_not_of(" \t");
        if (first == std::string_view::npos) continue;   // blank
        if (view[first] == '#') continue;                // comment

        Triple triple;
        if (parse_line(view, line_number, triple)) {
            result.triples.push_back(std::move(triple));
        } else {
            ++result.skipped_blank_node_lines;
        }
    }
    return result;
}

ParseResult parse_ntriples(const std::string& text) {
    std::istringstream in(text);
    return parse_ntriples(in);
}

ParseResult parse_ntriples_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    return parse_ntriples(in);
}

}  // namespace subsume
