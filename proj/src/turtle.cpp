#include "kgpipe/turtle.hpp"

#include <algorithm>
#include <exception>
#include <sstream>

namespace kgpipe {

namespace vocab {

std::string rdf(std::string_view local) { return std::string(kRdf) + std::string(local); }
std::string rdfs(std::string_view local) { return std::string(kRdfs) + std::string(local); }
std::string owl(std::string_view local) { return std::string(kOwl) + std::string(local); }
std::string xsd(std::string_view local) { return std::string(kXsd) + std::string(local); }

bool is_builtin(std::string_view iri) {
    for (auto ns : {kRdf, kRdfs, kOwl, kXsd}) {
        if (iri.substr(0, ns.size()) == ns) return true;
    }
    return false;
}

}  // namespace vocab

std::string OntologyDoc::local_name(const std::string& iri) const {
    std::size_t best = 0;
    for (const auto& [_, ns] : prefixes) {
        if (ns.size() > best && ns.size() < iri.size() && iri.compare(0, ns.size(), ns) == 0) best = ns.size();
    }
    if (best > 0) return iri.substr(best);
    auto cut = iri.find_last_of("#/");
    if (cut != std::string::npos && cut + 1 < iri.size()) return iri.substr(cut + 1);
    return iri;
}

bool OntologyDoc::has_property(const std::string& iri) const {
    return object_properties.count(iri) || data_properties.count(iri) || annotation_properties.count(iri);
}

bool operator==(const OntologyDoc& a, const OntologyDoc& b) {
    return a.prefixes == b.prefixes && a.ontologies == b.ontologies && a.classes == b.classes &&
           a.object_properties == b.object_properties && a.data_properties == b.data_properties &&
           a.annotation_properties == b.annotation_properties && a.individuals == b.individuals &&
           a.class_assertions == b.class_assertions && a.property_assertions == b.property_assertions &&
           a.axioms == b.axioms;
}

std::size_t ValidationReport::count(std::string_view code) const {
    return static_cast<std::size_t>(
        std::count_if(errors.begin(), errors.end(), [&](const Diagnostic& d) { return d.code == code; }) +
        std::count_if(warnings.begin(), warnings.end(), [&](const Diagnostic& d) { return d.code == code; }));
}

namespace {

enum class Tok { iri, pname, string, at_word, datatype_mark, number, word, dot, semicolon, comma, end };

struct Token {
    Tok kind = Tok::end;
    std::string text;    // IRI body, string value, word, number lexical, @-word
    std::string prefix;  // pname
    std::string local;   // pname
    std::string datatype;  // number literals
    SourcePos pos;
};

struct SyntaxError {
    SourcePos pos;
    std::string message;
};

bool is_name_byte(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-' ||
           c == '.' || c == '%' || c == ':' || c >= 0x80;
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

void append_utf8(std::string& out, unsigned long cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        skip_space_and_comments();
        Token tok;
        tok.pos = here();
        if (i_ >= src_.size()) return tok;

        char c = src_[i_];
        switch (c) {
            case '<': return lex_iri(tok);
            case '"':
            case '\'': return lex_string(tok, c);
            case '@': return lex_at_word(tok);
            case '.': advance(); tok.kind = Tok::dot; return tok;
            case ';': advance(); tok.kind = Tok::semicolon; return tok;
            case ',': advance(); tok.kind = Tok::comma; return tok;
            case '^':
                if (peek(1) == '^') {
                    advance();
                    advance();
                    tok.kind = Tok::datatype_mark;
                    return tok;
                }
                fail(tok.pos, "expected '^^'");
            case '[':
            case ']': fail(tok.pos, "blank nodes are not supported");
            case '(':
            case ')': fail(tok.pos, "collections are not supported");
            case '{':
            case '}': fail(tok.pos, "graph blocks are not supported");
            default: break;
        }
        if (c == '_' && peek(1) == ':') fail(tok.pos, "blank nodes are not supported");
        if (is_digit(c) || ((c == '+' || c == '-') && is_digit(peek(1)))) return lex_number(tok);
        if (is_name_byte(static_cast<unsigned char>(c)) && c != '.' && c != '-' && c != '%') return lex_name(tok);
        fail(tok.pos, std::string("unexpected character '") + c + "'");
    }

    [[noreturn]] static void fail(SourcePos pos, std::string message) { throw SyntaxError{pos, std::move(message)}; }

private:
    SourcePos here() const { return {line_, col_}; }
    char peek(std::size_t ahead = 0) const { return i_ + ahead < src_.size() ? src_[i_ + ahead] : '\0'; }

    void advance() {
        if (src_[i_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++i_;
    }

    void skip_space_and_comments() {
        while (i_ < src_.size()) {
            char c = src_[i_];
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
                advance();
            } else if (c == '#') {
                while (i_ < src_.size() && src_[i_] != '\n') advance();
            } else {
                break;
            }
        }
    }

    Token lex_iri(Token& tok) {
        advance();
        std::string body;
        while (true) {
            if (i_ >= src_.size()) fail(tok.pos, "unterminated IRI");
            char c = src_[i_];
            if (c == '>') break;
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '<' || c == '"' || c == '{' || c == '}' ||
                c == '|' || c == '^' || c == '`' || c == '\\') {
                fail(here(), "invalid character in IRI");
            }
            body.push_back(c);
            advance();
        }
        advance();
        tok.kind = Tok::iri;
        tok.text = std::move(body);
        return tok;
    }

    Token lex_string(Token& tok, char quote) {
        if (peek(1) == quote && peek(2) == quote) fail(tok.pos, "multi-line literals are not supported");
        advance();
        std::string value;
        while (true) {
            if (i_ >= src_.size()) fail(tok.pos, "unterminated string literal");
            char c = src_[i_];
            if (c == quote) break;
            if (c == '\n' || c == '\r') fail(here(), "line break inside string literal");
            if (c == '\\') {
                SourcePos esc_pos = here();
                advance();
                if (i_ >= src_.size()) fail(esc_pos, "unterminated escape");
                char e = src_[i_];
                advance();
                switch (e) {
                    case 't': value.push_back('\t'); break;
                    case 'b': value.push_back('\b'); break;
                    case 'n': value.push_back('\n'); break;
                    case 'r': value.push_back('\r'); break;
                    case 'f': value.push_back('\f'); break;
                    case '"': value.push_back('"'); break;
                    case '\'': value.push_back('\''); break;
                    case '\\': value.push_back('\\'); break;
                    case 'u':
                    case 'U': {
                        std::size_t digits = e == 'u' ? 4 : 8;
                        unsigned long cp = 0;
                        for (std::size_t k = 0; k < digits; ++k) {
                            if (i_ >= src_.size() || !std::isxdigit(static_cast<unsigned char>(src_[i_]))) {
                                fail(esc_pos, "invalid unicode escape");
                            }
                            char h = src_[i_];
                            cp = cp * 16 + static_cast<unsigned long>(is_digit(h) ? h - '0' : (std::tolower(h) - 'a' + 10));
                            advance();
                        }
                        if (cp > 0x10FFFF) fail(esc_pos, "unicode escape out of range");
                        append_utf8(value, cp);
                        break;
                    }
                    default: fail(esc_pos, std::string("unknown escape '\\") + e + "'");
                }
                continue;
            }
            value.push_back(c);
            advance();
        }
        advance();
        tok.kind = Tok::string;
        tok.text = std::move(value);
        return tok;
    }

    Token lex_at_word(Token& tok) {
        advance();
        std::string word;
        while (i_ < src_.size()) {
            char c = src_[i_];
            bool ok = std::isalnum(static_cast<unsigned char>(c)) || (c == '-' && !word.empty());
            if (!ok) break;
            word.push_back(c);
            advance();
        }
        if (word.empty() || !std::isalpha(static_cast<unsigned char>(word[0]))) fail(tok.pos, "expected a word after '@'");
        tok.kind = Tok::at_word;
        tok.text = std::move(word);
        return tok;
    }

    Token lex_number(Token& tok) {
        std::string lexical;
        auto take = [&] {
            lexical.push_back(src_[i_]);
            advance();
        };
        if (peek() == '+' || peek() == '-') take();
        while (is_digit(peek())) take();
        tok.datatype = vocab::xsd("integer");
        if (peek() == '.' && is_digit(peek(1))) {
            take();
            while (is_digit(peek())) take();
            tok.datatype = vocab::xsd("decimal");
        }
        if (peek() == 'e' || peek() == 'E') {
            std::size_t sign = (peek(1) == '+' || peek(1) == '-') ? 1 : 0;
            if (is_digit(peek(1 + sign))) {
                take();
                if (sign) take();
                while (is_digit(peek())) take();
                tok.datatype = vocab::xsd("double");
            }
        }
        tok.kind = Tok::number;
        tok.text = std::move(lexical);
        return tok;
    }

    Token lex_name(Token& tok) {
        std::size_t start = i_;
        std::size_t end = i_;
        while (end < src_.size() && is_name_byte(static_cast<unsigned char>(src_[end]))) ++end;
        while (end > start && src_[end - 1] == '.') --end;  // statement terminator
        std::string name(src_.substr(start, end - start));
        while (i_ < end) advance();

        auto colon = name.find(':');
        if (colon == std::string::npos) {
            tok.kind = Tok::word;
            tok.text = std::move(name);
            return tok;
        }
        tok.kind = Tok::pname;
        tok.prefix = name.substr(0, colon);
        tok.local = name.substr(colon + 1);
        tok.text = std::move(name);
        if (!tok.prefix.empty() && (tok.prefix.back() == '.' || tok.prefix.front() == '_')) {
            fail(tok.pos, "invalid prefix name '" + tok.prefix + "'");
        }
        return tok;
    }

    std::string_view src_;
    std::size_t i_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
};

class Parser {
public:
    explicit Parser(std::string_view src) : lexer_(src) { tok_ = lexer_.next(); }

    void run() {
        while (tok_.kind != Tok::end) {
            if (tok_.kind == Tok::at_word) {
                if (tok_.text != "prefix") Lexer::fail(tok_.pos, "unsupported directive '@" + tok_.text + "'");
                parse_prefix();
            } else if (tok_.kind == Tok::word && (tok_.text == "PREFIX" || tok_.text == "BASE" ||
                                                  tok_.text == "prefix" || tok_.text == "base")) {
                Lexer::fail(tok_.pos, "SPARQL-style directives are not supported; use @prefix");
            } else {
                parse_triples();
            }
        }
    }

    OntologyDoc doc;
    ValidationReport report;

private:
    void advance() { tok_ = lexer_.next(); }

    [[noreturn]] void unexpected(const std::string& expected) {
        std::string got;
        switch (tok_.kind) {
            case Tok::end: got = "end of input"; break;
            case Tok::dot: got = "'.'"; break;
            case Tok::semicolon: got = "';'"; break;
            case Tok::comma: got = "','"; break;
            case Tok::string: got = "string literal"; break;
            case Tok::number: got = "number"; break;
            case Tok::datatype_mark: got = "'^^'"; break;
            case Tok::at_word: got = "'@" + tok_.text + "'"; break;
            default: got = "'" + tok_.text + "'"; break;
        }
        Lexer::fail(tok_.pos, "expected " + expected + ", found " + got);
    }

    void expect(Tok kind, const std::string& what) {
        if (tok_.kind != kind) unexpected(what);
        advance();
    }

    void parse_prefix() {
        advance();
        if (tok_.kind != Tok::pname || !tok_.local.empty()) unexpected("prefix name ending in ':'");
        std::string name = tok_.prefix;
        advance();
        if (tok_.kind != Tok::iri) unexpected("namespace IRI");
        doc.prefixes[name] = tok_.text;
        advance();
        expect(Tok::dot, "'.' after @prefix");
    }

    // Resolves an IRI-valued token and records its first use.
    std::string resolve(const Token& t) {
        std::string iri;
        if (t.kind == Tok::iri) {
            iri = t.text;
        } else {
            auto it = doc.prefixes.find(t.prefix);
            if (it == doc.prefixes.end()) {
                report.errors.push_back({std::string(diag::kUndefinedPrefix),
                                         "prefix '" + t.prefix + ":' is not declared", t.pos.to_string()});
                iri = t.prefix + ":" + t.local;
            } else {
                iri = it->second + t.local;
            }
        }
        doc.first_use.try_emplace(iri, t.pos);
        return iri;
    }

    std::string parse_iri(const std::string& role) {
        if (tok_.kind != Tok::iri && tok_.kind != Tok::pname) unexpected(role);
        std::string iri = resolve(tok_);
        advance();
        return iri;
    }

    Term parse_object() {
        if (tok_.kind == Tok::iri || tok_.kind == Tok::pname) return parse_iri("object");
        if (tok_.kind == Tok::string) {
            Literal lit{tok_.text, {}, {}};
            advance();
            if (tok_.kind == Tok::at_word) {
                lit.language = tok_.text;
                advance();
            } else if (tok_.kind == Tok::datatype_mark) {
                advance();
                lit.datatype = parse_iri("datatype IRI");
            }
            return lit;
        }
        if (tok_.kind == Tok::number) {
            Literal lit{tok_.text, {}, tok_.datatype};
            advance();
            return lit;
        }
        if (tok_.kind == Tok::word && (tok_.text == "true" || tok_.text == "false")) {
            Literal lit{tok_.text, {}, vocab::xsd("boolean")};
            advance();
            return lit;
        }
        unexpected("object");
    }

    void parse_triples() {
        std::string subject = parse_iri("subject");
        while (true) {
            std::string predicate;
            if (tok_.kind == Tok::word && tok_.text == "a") {
                predicate = vocab::rdf("type");
                advance();
            } else {
                predicate = parse_iri("predicate");
            }
            while (true) {
                add(subject, predicate, parse_object());
                if (tok_.kind != Tok::comma) break;
                advance();
            }
            if (tok_.kind != Tok::semicolon) break;
            while (tok_.kind == Tok::semicolon) advance();
            if (tok_.kind == Tok::dot) break;
        }
        expect(Tok::dot, "'.' at end of statement");
    }

    void add(const std::string& s, const std::string& p, Term o) {
        const std::string* object_iri = std::get_if<std::string>(&o);
        if (p == vocab::rdf("type") && object_iri != nullptr) {
            const std::string& type = *object_iri;
            if (type == vocab::owl("Class") || type == vocab::rdfs("Class")) {
                doc.classes.insert(s);
            } else if (type == vocab::owl("ObjectProperty")) {
                doc.object_properties.insert(s);
            } else if (type == vocab::owl("DatatypeProperty")) {
                doc.data_properties.insert(s);
            } else if (type == vocab::owl("AnnotationProperty")) {
                doc.annotation_properties.insert(s);
            } else if (type == vocab::owl("NamedIndividual")) {
                doc.individuals.insert(s);
            } else if (type == vocab::owl("Ontology")) {
                doc.ontologies.insert(s);
            } else if (vocab::is_builtin(type) && type != vocab::owl("Thing")) {
                doc.axioms.insert({s, p, std::move(o)});
            } else {
                doc.class_assertions.emplace(s, type);
            }
            return;
        }
        if (vocab::is_builtin(p)) {
            doc.axioms.insert({s, p, std::move(o)});
        } else {
            doc.property_assertions.insert({s, p, std::move(o)});
        }
    }

    Lexer lexer_;
    Token tok_;
};

// --- serialization ---

bool is_safe_local(std::string_view local) {
    if (local.empty()) return true;
    if (local.front() == '-' || local.front() == '.') return false;
    for (char c : local) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
        if (!ok) return false;
    }
    return true;
}

std::string escape_literal(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '"': out += "\\\""; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            case '\b': out += "\\b"; break;
            case '\f': out += "\\f"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

class Writer {
public:
    explicit Writer(const OntologyDoc& doc) : prefixes_(doc.prefixes) {
        prefixes_.try_emplace("rdf", std::string(vocab::kRdf));
        prefixes_.try_emplace("rdfs", std::string(vocab::kRdfs));
        prefixes_.try_emplace("owl", std::string(vocab::kOwl));
        prefixes_.try_emplace("xsd", std::string(vocab::kXsd));
    }

    const std::map<std::string, std::string>& prefixes() const { return prefixes_; }

    std::string iri(const std::string& value) const {
        const std::string* best_name = nullptr;
        std::size_t best_len = 0;
        for (const auto& [name, ns] : prefixes_) {
            if (ns.size() <= value.size() && value.compare(0, ns.size(), ns) == 0 &&
                is_safe_local(std::string_view(value).substr(ns.size()))) {
                if (best_name == nullptr || ns.size() > best_len) {
                    best_name = &name;
                    best_len = ns.size();
                }
            }
        }
        if (best_name != nullptr) return *best_name + ":" + value.substr(best_len);
        return "<" + value + ">";
    }

    std::string term(const Term& t) const {
        if (const auto* s = std::get_if<std::string>(&t)) return iri(*s);
        const auto& lit = std::get<Literal>(t);
        std::string out = "\"" + escape_literal(lit.lexical) + "\"";
        if (!lit.language.empty()) {
            out += "@" + lit.language;
        } else if (!lit.datatype.empty()) {
            out += "^^" + iri(lit.datatype);
        }
        return out;
    }

private:
    std::map<std::string, std::string> prefixes_;
};

}  // namespace

TurtleParseResult parse_turtle(std::string_view text) {
    TurtleParseResult result;
    try {
        Parser parser(text);
        parser.run();
        result.report = std::move(parser.report);
        if (result.report.errors.empty()) result.doc = std::move(parser.doc);
    } catch (const SyntaxError& e) {
        result.report.errors.push_back({std::string(diag::kParseError), e.message, e.pos.to_string()});
    } catch (const std::exception& e) {
        result.report.errors.push_back({std::string(diag::kParseError), e.what(), ""});
    }
    return result;
}

std::string serialize_turtle(const OntologyDoc& doc) {
    Writer w(doc);
    std::ostringstream out;
    for (const auto& [name, ns] : w.prefixes()) out << "@prefix " << name << ": <" << ns << "> .\n";

    auto section = [&](const char* title, const std::set<std::string>& items, const std::string& type) {
        if (items.empty()) return;
        out << "\n# " << title << "\n";
        for (const auto& item : items) out << w.iri(item) << " a " << w.iri(type) << " .\n";
    };
    section("Ontology", doc.ontologies, vocab::owl("Ontology"));
    section("Classes", doc.classes, vocab::owl("Class"));
    section("Object properties", doc.object_properties, vocab::owl("ObjectProperty"));
    section("Data properties", doc.data_properties, vocab::owl("DatatypeProperty"));
    section("Annotation properties", doc.annotation_properties, vocab::owl("AnnotationProperty"));
    section("Individuals", doc.individuals, vocab::owl("NamedIndividual"));

    if (!doc.class_assertions.empty()) {
        out << "\n# Class assertions\n";
        for (const auto& [ind, cls] : doc.class_assertions) out << w.iri(ind) << " a " << w.iri(cls) << " .\n";
    }
    auto statements = [&](const char* title, const std::set<Statement>& items) {
        if (items.empty()) return;
        out << "\n# " << title << "\n";
        for (const auto& st : items) {
            out << w.iri(st.subject) << ' ' << w.iri(st.predicate) << ' ' << w.term(st.object) << " .\n";
        }
    };
    statements("Property assertions", doc.property_assertions);
    statements("Axioms", doc.axioms);
    return out.str();
}

}  // namespace kgpipe
