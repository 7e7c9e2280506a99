#pragma once

#include <cctype>
#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "tattoo/error.hpp"

namespace tattoo::detail {

/// Just enough XML for the report vocabulary: elements, double-quoted attributes, text.
struct XmlNode {
    std::string name;
    std::map<std::string, std::string> attrs;
    std::vector<XmlNode> children;
    std::string text;

    const XmlNode* child(std::string_view n) const {
        for (const auto& c : children)
            if (c.name == n)
                return &c;
        return nullptr;
    }

    std::vector<const XmlNode*> all(std::string_view n) const {
        std::vector<const XmlNode*> out;
        for (const auto& c : children)
            if (c.name == n)
                out.push_back(&c);
        return out;
    }

    const std::string& attr(const std::string& k) const {
        auto it = attrs.find(k);
        if (it == attrs.end())
            throw InputError("xml: element <" + name + "> lacks attribute '" + k + "'");
        return it->second;
    }

    bool has(const std::string& k) const { return attrs.contains(k); }
};

inline std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out += c;
        }
    }
    return out;
}

class XmlReader {
public:
    explicit XmlReader(std::string_view s) : s_(s) {}

    XmlNode document() {
        skip_misc();
        XmlNode root = element();
        skip_misc();
        if (pos_ != s_.size())
            fail("trailing content after root element");
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw InputError("xml: " + what + " at offset " + std::to_string(pos_));
    }

    bool starts(std::string_view p) const { return s_.substr(pos_, p.size()) == p; }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
    }

    void skip_misc() {
        for (;;) {
            skip_ws();
            if (starts("<?")) {
                auto e = s_.find("?>", pos_);
                if (e == std::string_view::npos)
                    fail("unterminated declaration");
                pos_ = e + 2;
            } else if (starts("<!--")) {
                auto e = s_.find("-->", pos_);
                if (e == std::string_view::npos)
                    fail("unterminated comment");
                pos_ = e + 3;
            } else {
                return;
            }
        }
    }

    std::string name() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' ||
                                    s_[pos_] == '-' || s_[pos_] == ':'))
            ++pos_;
        if (start == pos_)
            fail("expected a name");
        return std::string(s_.substr(start, pos_ - start));
    }

    std::string unescape(std::string_view raw) const {
        std::string out;
        for (std::size_t i = 0; i < raw.size(); ++i) {
            if (raw[i] != '&') {
                out += raw[i];
                continue;
            }
            auto semi = raw.find(';', i);
            if (semi == std::string_view::npos)
                throw InputError("xml: bad entity");
            auto ent = raw.substr(i + 1, semi - i - 1);
            if (ent == "amp") out += '&';
            else if (ent == "lt") out += '<';
            else if (ent == "gt") out += '>';
            else if (ent == "quot") out += '"';
            else if (ent == "apos") out += '\'';
            else throw InputError("xml: unknown entity &" + std::string(ent) + ";");
            i = semi;
        }
        return out;
    }

    XmlNode element() {
        if (!starts("<"))
            fail("expected '<'");
        ++pos_;
        XmlNode node;
        node.name = name();
        for (;;) {
            skip_ws();
            if (starts("/>")) {
                pos_ += 2;
                return node;
            }
            if (starts(">")) {
                ++pos_;
                break;
            }
            std::string key = name();
            skip_ws();
            if (!starts("=\""))
                fail("expected '=\"' after attribute name");
            pos_ += 2;
            auto e = s_.find('"', pos_);
            if (e == std::string_view::npos)
                fail("unterminated attribute value");
            node.attrs[key] = unescape(s_.substr(pos_, e - pos_));
            pos_ = e + 1;
        }
        std::string text;
        for (;;) {
            if (pos_ >= s_.size())
                fail("unterminated element <" + node.name + ">");
            if (starts("</")) {
                pos_ += 2;
                if (name() != node.name)
                    fail("mismatched closing tag for <" + node.name + ">");
                skip_ws();
                if (!starts(">"))
                    fail("expected '>'");
                ++pos_;
                break;
            }
            if (starts("<!--")) {
                skip_misc();
                continue;
            }
            if (starts("<")) {
                node.children.push_back(element());
                continue;
            }
            auto e = s_.find('<', pos_);
            if (e == std::string_view::npos)
                e = s_.size();
            text += s_.substr(pos_, e - pos_);
            pos_ = e;
        }
        node.text = unescape(text);
        return node;
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

} // namespace tattoo::detail
