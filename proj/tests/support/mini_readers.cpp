#include "mini_readers.hpp"

#include <cctype>
#include <stdexcept>

namespace mini {

namespace {

class DotLexer {
public:
    explicit DotLexer(const std::string& s) : s_(s) {}

    void skip() {
        while (pos_ < s_.size()) {
            if (std::isspace(static_cast<unsigned char>(s_[pos_]))) {
                ++pos_;
            } else if (s_.compare(pos_, 2, "//") == 0) {
                while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    bool eat(const std::string& tok) {
        skip();
        if (s_.compare(pos_, tok.size(), tok) == 0) {
            pos_ += tok.size();
            return true;
        }
        return false;
    }

    void expect(const std::string& tok) {
        if (!eat(tok)) fail("expected '" + tok + "'");
    }

    std::string id() {
        skip();
        if (pos_ >= s_.size()) fail("expected an identifier");
        if (s_[pos_] == '"') {
            ++pos_;
            std::string out;
            while (pos_ < s_.size() && s_[pos_] != '"') {
                if (s_[pos_] == '\n') fail("newline in quoted string");
                if (s_[pos_] == '\\' && pos_ + 1 < s_.size()) {
                    char next = s_[pos_ + 1];
                    out += next == 'n' ? '\n' : next;
                    pos_ += 2;
                } else {
                    out += s_[pos_++];
                }
            }
            if (pos_ >= s_.size()) fail("unterminated string");
            ++pos_;
            return out;
        }
        std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' ||
                                    s_[pos_] == '.')) {
            ++pos_;
        }
        if (start == pos_) fail("expected an identifier");
        return s_.substr(start, pos_ - start);
    }

    bool at_end() {
        skip();
        return pos_ >= s_.size();
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw std::runtime_error("dot: " + msg + " at offset " + std::to_string(pos_));
    }

private:
    const std::string& s_;
    std::size_t pos_ = 0;
};

Attrs attr_list(DotLexer& lex) {
    Attrs attrs;
    if (!lex.eat("[")) return attrs;
    while (!lex.eat("]")) {
        auto key = lex.id();
        lex.expect("=");
        auto value = lex.id();
        if (!attrs.emplace(key, value).second) lex.fail("duplicate attribute " + key);
        if (!lex.eat(",")) lex.eat(";");
    }
    return attrs;
}

}  // namespace

DotGraph read_dot(const std::string& text) {
    DotLexer lex(text);
    DotGraph g;
    lex.expect("digraph");
    g.name = lex.id();
    lex.expect("{");
    while (!lex.eat("}")) {
        if (lex.eat("node")) {
            g.node_defaults = attr_list(lex);
            lex.expect(";");
            continue;
        }
        auto first = lex.id();
        if (lex.eat("->")) {
            auto second = lex.id();
            if (!g.nodes.count(first) || !g.nodes.count(second)) lex.fail("edge before node declaration");
            g.edges.push_back({first, second, attr_list(lex)});
        } else {
            if (g.nodes.count(first)) lex.fail("node declared twice: " + first);
            g.nodes[first] = attr_list(lex);
        }
        lex.expect(";");
    }
    if (!lex.at_end()) lex.fail("trailing content");
    return g;
}

const XmlElement* XmlElement::child(const std::string& tag) const {
    for (const auto& c : children) {
        if (c.name == tag) return &c;
    }
    return nullptr;
}

std::vector<const XmlElement*> XmlElement::all(const std::string& tag) const {
    std::vector<const XmlElement*> out;
    for (const auto& c : children) {
        if (c.name == tag) out.push_back(&c);
    }
    return out;
}

namespace {

class XmlParser {
public:
    explicit XmlParser(const std::string& s) : s_(s) {}

    XmlElement document() {
        skip_ws();
        if (s_.compare(pos_, 5, "<?xml") == 0) {
            auto end = s_.find("?>", pos_);
            if (end == std::string::npos) fail("unterminated declaration");
            pos_ = end + 2;
        }
        skip_ws();
        auto root = element();
        skip_ws();
        if (pos_ != s_.size()) fail("content after the root element");
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw std::runtime_error("xml: " + msg + " at offset " + std::to_string(pos_));
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    std::string name() {
        std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' ||
                                    s_[pos_] == '.' || s_[pos_] == ':' || s_[pos_] == '-')) {
            ++pos_;
        }
        if (start == pos_) fail("expected a name");
        return s_.substr(start, pos_ - start);
    }

    std::string decode(const std::string& raw) {
        std::string out;
        for (std::size_t i = 0; i < raw.size(); ++i) {
            if (raw[i] == '<') fail("raw '<' in character data");
            if (raw[i] != '&') {
                out += raw[i];
                continue;
            }
            auto semi = raw.find(';', i);
            if (semi == std::string::npos) fail("unterminated entity");
            auto ent = raw.substr(i + 1, semi - i - 1);
            if (ent == "amp") {
                out += '&';
            } else if (ent == "lt") {
                out += '<';
            } else if (ent == "gt") {
                out += '>';
            } else if (ent == "quot") {
                out += '"';
            } else if (ent == "apos") {
                out += '\'';
            } else {
                fail("unknown entity &" + ent + ";");
            }
            i = semi;
        }
        return out;
    }

    XmlElement element() {
        if (pos_ >= s_.size() || s_[pos_] != '<') fail("expected '<'");
        ++pos_;
        XmlElement e;
        e.name = name();
        for (;;) {
            skip_ws();
            if (s_.compare(pos_, 2, "/>") == 0) {
                pos_ += 2;
                return e;
            }
            if (pos_ < s_.size() && s_[pos_] == '>') {
                ++pos_;
                break;
            }
            auto key = name();
            skip_ws();
            if (pos_ >= s_.size() || s_[pos_] != '=') fail("expected '='");
            ++pos_;
            skip_ws();
            if (pos_ >= s_.size() || (s_[pos_] != '"' && s_[pos_] != '\'')) fail("unquoted attribute");
            char q = s_[pos_++];
            auto end = s_.find(q, pos_);
            if (end == std::string::npos) fail("unterminated attribute");
            if (!e.attrs.emplace(key, decode(s_.substr(pos_, end - pos_))).second) fail("duplicate attribute");
            pos_ = end + 1;
        }
        for (;;) {
            auto lt = s_.find('<', pos_);
            if (lt == std::string::npos) fail("unclosed element " + e.name);
            e.text += decode(s_.substr(pos_, lt - pos_));
            pos_ = lt;
            if (s_.compare(pos_, 2, "</") == 0) {
                pos_ += 2;
                if (name() != e.name) fail("mismatched closing tag for " + e.name);
                skip_ws();
                if (pos_ >= s_.size() || s_[pos_] != '>') fail("expected '>'");
                ++pos_;
                return e;
            }
            e.children.push_back(element());
        }
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

}  // namespace

XmlElement read_xml(const std::string& text) { return XmlParser(text).document(); }

}  // namespace mini
