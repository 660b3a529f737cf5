#include "agora/turtle.hpp"

#include <cctype>
#include <optional>
#include <sstream>

namespace agora::kg {

namespace {

bool is_name_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

bool is_valid_name(const std::string& s) {
    if (s.empty()) {
        return true;  // empty prefix and empty local part are allowed
    }
    if (!is_name_start(s[0])) {
        return false;
    }
    for (char c : s) {
        if (!is_name_char(c)) {
            return false;
        }
    }
    return true;
}

bool is_integer_lexical(const std::string& s) {
    std::size_t i = (s.size() > 1 && (s[0] == '+' || s[0] == '-')) ? 1 : 0;
    if (i >= s.size()) {
        return false;
    }
    for (; i < s.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) {
            return false;
        }
    }
    return true;
}

bool is_decimal_lexical(const std::string& s) {
    std::size_t i = (s.size() > 1 && (s[0] == '+' || s[0] == '-')) ? 1 : 0;
    const auto dot = s.find('.', i);
    if (dot == std::string::npos || dot + 1 >= s.size()) {
        return false;
    }
    for (std::size_t k = i; k < s.size(); ++k) {
        if (k == dot) {
            continue;
        }
        if (!std::isdigit(static_cast<unsigned char>(s[k]))) {
            return false;
        }
    }
    return true;
}

enum class TokenKind {
    IriRef,     // <...>
    Pname,      // prefix:local (text = raw form)
    Keyword,    // bare word, only `a` survives lexing
    String,     // decoded string body
    LangTag,    // tag without '@'
    AtPrefix,   // @prefix
    Integer,
    Decimal,
    CaretCaret,
    Dot,
    Semicolon,
    Comma,
    End,
};

struct Token {
    TokenKind kind = TokenKind::End;
    std::string text;
    std::size_t line = 0;
    std::size_t column = 0;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) {}

    Token next() {
        skip_trivia();
        Token tok;
        tok.line = line_;
        tok.column = column_;
        if (eof()) {
            tok.kind = TokenKind::End;
            return tok;
        }
        const char c = peek();
        if (c == '<') {
            return lex_iriref(tok);
        }
        if (c == '"') {
            return lex_string(tok);
        }
        if (c == '@') {
            return lex_at(tok);
        }
        if (c == '^') {
            advance();
            if (eof() || peek() != '^') {
                throw ParseError("expected '^^'", tok.line, tok.column);
            }
            advance();
            tok.kind = TokenKind::CaretCaret;
            return tok;
        }
        if (c == '.') {
            advance();
            tok.kind = TokenKind::Dot;
            return tok;
        }
        if (c == ';') {
            advance();
            tok.kind = TokenKind::Semicolon;
            return tok;
        }
        if (c == ',') {
            advance();
            tok.kind = TokenKind::Comma;
            return tok;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            ((c == '+' || c == '-') && has_digit_after_sign())) {
            return lex_number(tok);
        }
        if (is_name_start(c) || c == ':') {
            return lex_name(tok);
        }
        throw ParseError(std::string("unexpected character '") + c + "'", tok.line, tok.column);
    }

private:
    bool eof() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    bool has_digit_after_sign() const {
        return pos_ + 1 < text_.size() &&
               std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]));
    }

    void skip_trivia() {
        while (!eof()) {
            const char c = peek();
            if (c == '#') {
                while (!eof() && peek() != '\n') {
                    advance();
                }
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                return;
            }
        }
    }

    Token lex_iriref(Token tok) {
        advance();  // '<'
        std::string value;
        while (!eof() && peek() != '>') {
            const char c = peek();
            if (c == '\n' || c == '<' || c == '"') {
                throw ParseError("malformed IRI reference", tok.line, tok.column);
            }
            value += c;
            advance();
        }
        if (eof()) {
            throw ParseError("unterminated IRI reference", tok.line, tok.column);
        }
        advance();  // '>'
        if (value.empty()) {
            throw ParseError("IRI must be non-empty", tok.line, tok.column);
        }
        tok.kind = TokenKind::IriRef;
        tok.text = std::move(value);
        return tok;
    }

    Token lex_string(Token tok) {
        advance();  // '"'
        std::string value;
        while (true) {
            if (eof() || peek() == '\n') {
                throw ParseError("unterminated string literal", tok.line, tok.column);
            }
            char c = peek();
            advance();
            if (c == '"') {
                break;
            }
            if (c == '\\') {
                if (eof()) {
                    throw ParseError("unterminated string literal", tok.line, tok.column);
                }
                const char esc = peek();
                advance();
                switch (esc) {
                    case '"': value += '"'; break;
                    case '\\': value += '\\'; break;
                    case 'n': value += '\n'; break;
                    case 'r': value += '\r'; break;
                    case 't': value += '\t'; break;
                    default:
                        throw ParseError(std::string("unsupported escape '\\") + esc + "'",
                                         tok.line, tok.column);
                }
            } else {
                value += c;
            }
        }
        tok.kind = TokenKind::String;
        tok.text = std::move(value);
        return tok;
    }

    Token lex_at(Token tok) {
        advance();  // '@'
        std::string word;
        while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-')) {
            word += peek();
            advance();
        }
        if (word == "prefix") {
            tok.kind = TokenKind::AtPrefix;
            return tok;
        }
        if (word.empty()) {
            throw ParseError("dangling '@'", tok.line, tok.column);
        }
        tok.kind = TokenKind::LangTag;
        tok.text = std::move(word);
        return tok;
    }

    Token lex_number(Token tok) {
        std::string value;
        if (peek() == '+' || peek() == '-') {
            value += peek();
            advance();
        }
        bool saw_dot = false;
        while (!eof()) {
            const char c = peek();
            if (std::isdigit(static_cast<unsigned char>(c))) {
                value += c;
                advance();
            } else if (c == '.' && !saw_dot && pos_ + 1 < text_.size() &&
                       std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
                saw_dot = true;
                value += c;
                advance();
            } else {
                break;
            }
        }
        tok.kind = saw_dot ? TokenKind::Decimal : TokenKind::Integer;
        tok.text = std::move(value);
        return tok;
    }

    Token lex_name(Token tok) {
        std::string word;
        while (!eof() && is_name_char(peek())) {
            word += peek();
            advance();
        }
        if (!eof() && peek() == ':') {
            advance();
            std::string local;
            while (!eof() && is_name_char(peek())) {
                local += peek();
                advance();
            }
            if (!is_valid_name(word) || !is_valid_name(local)) {
                throw ParseError("malformed prefixed name", tok.line, tok.column);
            }
            tok.kind = TokenKind::Pname;
            tok.text = word + ":" + local;
            return tok;
        }
        if (word.empty()) {
            throw ParseError("expected a name", tok.line, tok.column);
        }
        tok.kind = TokenKind::Keyword;
        tok.text = std::move(word);
        return tok;
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
};

class Parser {
public:
    explicit Parser(const std::string& text) : lexer_(text) { shift(); }

    TurtleDocument parse() {
        TurtleDocument doc;
        while (current_.kind != TokenKind::End) {
            if (current_.kind == TokenKind::AtPrefix) {
                parse_prefix_declaration(doc);
            } else {
                parse_statement(doc);
            }
        }
        return doc;
    }

private:
    void shift() { current_ = lexer_.next(); }

    [[noreturn]] void fail(const std::string& message) const {
        throw ParseError(message, current_.line, current_.column);
    }

    void expect(TokenKind kind, const std::string& what) {
        if (current_.kind != kind) {
            fail("expected " + what);
        }
        shift();
    }

    void parse_prefix_declaration(TurtleDocument& doc) {
        shift();  // @prefix
        if (current_.kind != TokenKind::Pname) {
            fail("expected a prefix name after @prefix");
        }
        const auto colon = current_.text.find(':');
        const std::string name = current_.text.substr(0, colon);
        if (current_.text.size() != colon + 1) {
            fail("prefix declaration must end with ':'");
        }
        shift();
        if (current_.kind != TokenKind::IriRef) {
            fail("expected an IRI after the prefix name");
        }
        doc.prefixes[name] = current_.text;
        shift();
        expect(TokenKind::Dot, "'.' after prefix declaration");
    }

    Iri resolve_pname(const Token& tok, const TurtleDocument& doc) const {
        const auto colon = tok.text.find(':');
        const std::string prefix = tok.text.substr(0, colon);
        const std::string local = tok.text.substr(colon + 1);
        const auto it = doc.prefixes.find(prefix);
        if (it == doc.prefixes.end()) {
            throw ParseError("unknown prefix '" + prefix + ":'", tok.line, tok.column);
        }
        return Iri{it->second + local};
    }

    std::optional<Iri> try_parse_iri(const TurtleDocument& doc) {
        if (current_.kind == TokenKind::IriRef) {
            Iri iri{current_.text};
            shift();
            return iri;
        }
        if (current_.kind == TokenKind::Pname) {
            Iri iri = resolve_pname(current_, doc);
            shift();
            return iri;
        }
        return std::nullopt;
    }

    Iri parse_verb(const TurtleDocument& doc) {
        if (current_.kind == TokenKind::Keyword && current_.text == "a") {
            shift();
            return rdf_type();
        }
        if (auto iri = try_parse_iri(doc)) {
            return *iri;
        }
        fail("expected a predicate (IRI or 'a')");
    }

    RdfTerm parse_object(const TurtleDocument& doc) {
        if (auto iri = try_parse_iri(doc)) {
            return *iri;
        }
        if (current_.kind == TokenKind::String) {
            std::string lexical = current_.text;
            shift();
            if (current_.kind == TokenKind::LangTag) {
                std::string lang = current_.text;
                shift();
                return make_lang_literal(std::move(lexical), std::move(lang));
            }
            if (current_.kind == TokenKind::CaretCaret) {
                shift();
                if (auto datatype = try_parse_iri(doc)) {
                    return make_typed_literal(std::move(lexical), *datatype);
                }
                fail("expected a datatype IRI after '^^'");
            }
            return make_string_literal(std::move(lexical));
        }
        if (current_.kind == TokenKind::Integer) {
            Literal lit{current_.text, xsd_integer(), ""};
            shift();
            return lit;
        }
        if (current_.kind == TokenKind::Decimal) {
            Literal lit{current_.text, xsd_decimal(), ""};
            shift();
            return lit;
        }
        fail("expected an object (IRI or literal)");
    }

    void parse_statement(TurtleDocument& doc) {
        auto subject = try_parse_iri(doc);
        if (!subject) {
            fail("expected a subject IRI");
        }
        while (true) {
            const Iri predicate = parse_verb(doc);
            while (true) {
                doc.triples.push_back(Triple{*subject, predicate, parse_object(doc)});
                if (current_.kind == TokenKind::Comma) {
                    shift();
                    continue;
                }
                break;
            }
            if (current_.kind == TokenKind::Semicolon) {
                shift();
                continue;
            }
            break;
        }
        expect(TokenKind::Dot, "'.' at end of statement");
    }

    Lexer lexer_;
    Token current_;
};

std::string escape_string(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    return out;
}

// Longest-base prefix compaction; falls back to angle brackets.
std::string compact_iri(const Iri& iri, const std::map<std::string, std::string>& prefixes) {
    const std::string* best_name = nullptr;
    const std::string* best_base = nullptr;
    for (const auto& [name, base] : prefixes) {
        if (iri.value.size() < base.size() || iri.value.compare(0, base.size(), base) != 0) {
            continue;
        }
        const std::string local = iri.value.substr(base.size());
        if (!is_valid_name(local)) {
            continue;
        }
        if (best_base == nullptr || base.size() > best_base->size()) {
            best_name = &name;
            best_base = &base;
        }
    }
    if (best_name == nullptr) {
        return "<" + iri.value + ">";
    }
    return *best_name + ":" + iri.value.substr(best_base->size());
}

std::string render_term(const RdfTerm& term, const std::map<std::string, std::string>& prefixes) {
    if (const auto* iri = std::get_if<Iri>(&term)) {
        return compact_iri(*iri, prefixes);
    }
    const auto& lit = std::get<Literal>(term);
    if (!lit.lang.empty()) {
        return "\"" + escape_string(lit.lexical) + "\"@" + lit.lang;
    }
    if (lit.datatype == xsd_integer() && is_integer_lexical(lit.lexical)) {
        return lit.lexical;
    }
    if (lit.datatype == xsd_decimal() && is_decimal_lexical(lit.lexical)) {
        return lit.lexical;
    }
    if (lit.datatype == xsd_string()) {
        return "\"" + escape_string(lit.lexical) + "\"";
    }
    return "\"" + escape_string(lit.lexical) + "\"^^" + compact_iri(lit.datatype, prefixes);
}

std::string render_verb(const Iri& predicate, const std::map<std::string, std::string>& prefixes) {
    if (predicate == rdf_type()) {
        return "a";
    }
    return compact_iri(predicate, prefixes);
}

}  // namespace

TurtleDocument parse_turtle(const std::string& text) {
    Parser parser(text);
    return parser.parse();
}

std::string serialize_turtle(const std::map<std::string, std::string>& prefixes,
                             const std::set<Triple>& triples) {
    std::ostringstream out;
    for (const auto& [name, base] : prefixes) {
        out << "@prefix " << name << ": <" << base << "> .\n";
    }
    if (!prefixes.empty() && !triples.empty()) {
        out << "\n";
    }

    // std::set orders by (subject, predicate, object) already; emit
    // grouped statements in that order.
    auto it = triples.begin();
    while (it != triples.end()) {
        const Iri subject = it->subject;
        out << compact_iri(subject, prefixes);
        bool first_predicate = true;
        while (it != triples.end() && it->subject == subject) {
            const Iri predicate = it->predicate;
            out << (first_predicate ? " " : " ;\n    ") << render_verb(predicate, prefixes);
            first_predicate = false;
            bool first_object = true;
            while (it != triples.end() && it->subject == subject && it->predicate == predicate) {
                out << (first_object ? " " : ", ") << render_term(it->object, prefixes);
                first_object = false;
                ++it;
            }
        }
        out << " .\n";
    }
    return out.str();
}

std::string serialize_turtle(const PerspectiveGraph& graph) {
    return serialize_turtle(graph.prefixes(), graph.abox());
}

}  // namespace agora::kg
