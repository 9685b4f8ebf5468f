#pragma once

// Minimal TOML subset for run configurations: [sections], key = value with
// strings, booleans, integers, floats, and (nested) arrays. Comments start
// with '#'. Arrays may span lines. Serialization is canonical (sections and
// keys sorted, floats at full precision), so parse -> serialize -> parse is a
// fixed point and the serialized form can be hashed for provenance.

#include "common.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace andloc::toml {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Value {
    enum class Kind { String, Int, Float, Bool, Array };
    Kind kind = Kind::Int;
    std::string s;
    long long i = 0;
    double f = 0;
    bool b = false;
    std::vector<Value> arr;

    bool is_number() const { return kind == Kind::Int || kind == Kind::Float; }
    double number() const {
        if (kind == Kind::Int) return double(i);
        if (kind == Kind::Float) return f;
        throw ParseError("value is not a number");
    }
};

using Table = std::map<std::string, Value>;

struct Document {
    std::map<std::string, Table> sections;  // "" holds root-level keys

    bool has(const std::string& section, const std::string& key) const {
        auto it = sections.find(section);
        return it != sections.end() && it->second.count(key) > 0;
    }
    const Value& at(const std::string& section, const std::string& key) const {
        auto it = sections.find(section);
        if (it == sections.end() || !it->second.count(key))
            throw ParseError("missing key '" + (section.empty() ? key : section + "." + key) +
                             "'");
        return it->second.at(key);
    }
};

namespace detail {

struct Cursor {
    const std::string& text;
    size_t pos = 0;
    int line = 1;

    bool eof() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }
    char take() {
        char c = text[pos++];
        if (c == '\n') ++line;
        return c;
    }
    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError("line " + std::to_string(line) + ": " + what);
    }
    void skip_ws_inline() {
        while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) ++pos;
    }
    // whitespace, newlines, comments
    void skip_ws_all() {
        while (!eof()) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                take();
            } else if (c == '#') {
                while (!eof() && peek() != '\n') ++pos;
            } else {
                break;
            }
        }
    }
};

inline bool bare_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

inline std::string parse_string(Cursor& cur) {
    if (cur.take() != '"') cur.fail("expected '\"'");
    std::string out;
    while (true) {
        if (cur.eof()) cur.fail("unterminated string");
        char c = cur.take();
        if (c == '"') break;
        if (c == '\n') cur.fail("newline in string");
        if (c == '\\') {
            if (cur.eof()) cur.fail("dangling escape");
            char e = cur.take();
            switch (e) {
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                default: cur.fail(std::string("unsupported escape \\") + e);
            }
        } else {
            out += c;
        }
    }
    return out;
}

inline Value parse_value(Cursor& cur);

inline Value parse_array(Cursor& cur) {
    if (cur.take() != '[') cur.fail("expected '['");
    Value v;
    v.kind = Value::Kind::Array;
    cur.skip_ws_all();
    if (!cur.eof() && cur.peek() == ']') {
        cur.take();
        return v;
    }
    while (true) {
        cur.skip_ws_all();
        v.arr.push_back(parse_value(cur));
        cur.skip_ws_all();
        if (cur.eof()) cur.fail("unterminated array");
        char c = cur.take();
        if (c == ']') break;
        if (c != ',') cur.fail("expected ',' or ']' in array");
        cur.skip_ws_all();
        if (!cur.eof() && cur.peek() == ']') {  // trailing comma
            cur.take();
            break;
        }
    }
    return v;
}

inline Value parse_value(Cursor& cur) {
    if (cur.eof()) cur.fail("expected a value");
    char c = cur.peek();
    if (c == '"') {
        Value v;
        v.kind = Value::Kind::String;
        v.s = parse_string(cur);
        return v;
    }
    if (c == '[') return parse_array(cur);
    std::string tok;
    while (!cur.eof()) {
        char t = cur.peek();
        if (t == ',' || t == ']' || t == '#' || t == '\n' || t == '\r' || t == ' ' || t == '\t')
            break;
        tok += cur.take();
    }
    if (tok.empty()) cur.fail("expected a value");
    if (tok == "true" || tok == "false") {
        Value v;
        v.kind = Value::Kind::Bool;
        v.b = tok == "true";
        return v;
    }
    bool floaty = tok.find_first_of(".eEnN") != std::string::npos;  // nan/inf spelled out
    if (!floaty) {
        try {
            size_t used = 0;
            long long i = std::stoll(tok, &used);
            if (used == tok.size()) {
                Value v;
                v.kind = Value::Kind::Int;
                v.i = i;
                return v;
            }
        } catch (const std::exception&) {
        }
    }
    try {
        Value v;
        v.kind = Value::Kind::Float;
        v.f = parse_double(tok);
        return v;
    } catch (const std::exception&) {
        cur.fail("cannot parse value '" + tok + "'");
    }
}

}  // namespace detail

inline Document parse(const std::string& text) {
    detail::Cursor cur{text};
    Document doc;
    std::string section;
    doc.sections[""];
    while (true) {
        cur.skip_ws_all();
        if (cur.eof()) break;
        char c = cur.peek();
        if (c == '[') {
            cur.take();
            std::string name;
            while (!cur.eof() && cur.peek() != ']') name += cur.take();
            if (cur.eof()) cur.fail("unterminated section header");
            cur.take();
            name = trim(name);
            if (name.empty()) cur.fail("empty section name");
            for (char ch : name)
                if (!detail::bare_char(ch)) cur.fail("bad section name '" + name + "'");
            section = name;
            doc.sections[section];
            continue;
        }
        std::string key;
        while (!cur.eof() && detail::bare_char(cur.peek())) key += cur.take();
        if (key.empty()) cur.fail(std::string("unexpected character '") + c + "'");
        cur.skip_ws_inline();
        if (cur.eof() || cur.take() != '=') cur.fail("expected '=' after key '" + key + "'");
        cur.skip_ws_inline();
        Value v = detail::parse_value(cur);
        if (doc.sections[section].count(key))
            cur.fail("duplicate key '" + key + "' in section [" + section + "]");
        doc.sections[section][key] = std::move(v);
        cur.skip_ws_inline();
        if (!cur.eof() && cur.peek() == '#')
            while (!cur.eof() && cur.peek() != '\n') cur.take();
        cur.skip_ws_inline();
        if (!cur.eof() && cur.peek() != '\n') cur.fail("trailing characters after value");
    }
    return doc;
}

namespace detail {

inline void render(const Value& v, std::string& out) {
    switch (v.kind) {
        case Value::Kind::String: {
            out += '"';
            for (char c : v.s) {
                if (c == '"' || c == '\\') out += '\\';
                if (c == '\n') {
                    out += "\\n";
                    continue;
                }
                if (c == '\t') {
                    out += "\\t";
                    continue;
                }
                out += c;
            }
            out += '"';
            break;
        }
        case Value::Kind::Int: out += std::to_string(v.i); break;
        case Value::Kind::Float: out += fmt_double(v.f); break;
        case Value::Kind::Bool: out += v.b ? "true" : "false"; break;
        case Value::Kind::Array: {
            out += '[';
            for (size_t k = 0; k < v.arr.size(); ++k) {
                if (k) out += ", ";
                render(v.arr[k], out);
            }
            out += ']';
            break;
        }
    }
}

}  // namespace detail

// Canonical text: root keys first, then sections in sorted order, keys sorted.
inline std::string serialize(const Document& doc) {
    std::string out;
    auto emit = [&](const Table& t) {
        for (const auto& [k, v] : t) {
            out += k;
            out += " = ";
            detail::render(v, out);
            out += '\n';
        }
    };
    auto root = doc.sections.find("");
    if (root != doc.sections.end()) emit(root->second);
    for (const auto& [name, table] : doc.sections) {
        if (name.empty()) continue;
        if (table.empty()) continue;
        out += "\n[" + name + "]\n";
        emit(table);
    }
    return out;
}

inline std::uint64_t digest(const Document& doc) { return fnv1a(serialize(doc)); }

}  // namespace andloc::toml
