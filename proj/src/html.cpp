#include "codegenlink/html.hpp"

#include "codegenlink/errors.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <array>
#include <charconv>

namespace codegenlink::html {

namespace {

struct NamedEntity {
    std::string_view name;
    std::uint32_t code_point;
};

// Entities seen in practice on code-hosting and tutorial pages.
constexpr std::array<NamedEntity, 40> kEntities{{
    {"amp", '&'},       {"lt", '<'},         {"gt", '>'},         {"quot", '"'},       {"apos", '\''},
    {"nbsp", ' '},      {"tab", '\t'},       {"newline", '\n'},   {"copy", 0xA9},      {"reg", 0xAE},
    {"trade", 0x2122},  {"hellip", 0x2026},  {"mdash", 0x2014},   {"ndash", 0x2013},   {"lsquo", 0x2018},
    {"rsquo", 0x2019},  {"ldquo", 0x201C},   {"rdquo", 0x201D},   {"laquo", 0xAB},     {"raquo", 0xBB},
    {"middot", 0xB7},   {"bull", 0x2022},    {"times", 0xD7},     {"divide", 0xF7},    {"deg", 0xB0},
    {"plusmn", 0xB1},   {"para", 0xB6},      {"sect", 0xA7},      {"euro", 0x20AC},    {"pound", 0xA3},
    {"yen", 0xA5},      {"cent", 0xA2},      {"larr", 0x2190},    {"rarr", 0x2192},    {"uarr", 0x2191},
    {"darr", 0x2193},   {"le", 0x2264},      {"ge", 0x2265},      {"ne", 0x2260},      {"lambda", 0x3BB},
}};

// References browsers accept without a trailing semicolon.
constexpr std::array<std::string_view, 5> kLegacyNoSemicolon{"amp", "lt", "gt", "quot", "nbsp"};

}  // namespace

std::string decode_entities(std::string_view in) {
    std::string out;
    out.reserve(in.size());
    std::size_t i = 0;
    while (i < in.size()) {
        const char c = in[i];
        if (c != '&') {
            out.push_back(c);
            ++i;
            continue;
        }
        const std::string_view rest = in.substr(i + 1);
        if (!rest.empty() && rest.front() == '#') {
            const bool hex = rest.size() > 1 && (rest[1] == 'x' || rest[1] == 'X');
            const std::size_t digits_begin = hex ? 2 : 1;
            std::size_t j = digits_begin;
            while (j < rest.size() && (hex ? text::is_xdigit(rest[j]) : text::is_digit(rest[j]))) ++j;
            if (j > digits_begin && j - digits_begin <= 8) {
                std::uint32_t cp = 0;
                std::from_chars(rest.data() + digits_begin, rest.data() + j, cp, hex ? 16 : 10);
                if (cp == 0xA0) cp = ' ';
                text::append_utf8(out, cp == 0 ? 0xFFFD : cp);
                i += 1 + j + ((j < rest.size() && rest[j] == ';') ? 1 : 0);
                continue;
            }
        } else {
            std::size_t j = 0;
            while (j < rest.size() && j < 32 && text::is_alnum(rest[j])) ++j;
            const std::string_view name = rest.substr(0, j);
            const bool terminated = j < rest.size() && rest[j] == ';';
            const auto entity = std::find_if(kEntities.begin(), kEntities.end(),
                                             [&](const NamedEntity& e) { return e.name == name; });
            if (entity != kEntities.end()) {
                const bool legacy =
                    std::find(kLegacyNoSemicolon.begin(), kLegacyNoSemicolon.end(), name) != kLegacyNoSemicolon.end();
                if (terminated || legacy) {
                    text::append_utf8(out, entity->code_point);
                    i += 1 + j + (terminated ? 1 : 0);
                    continue;
                }
            }
        }
        out.push_back('&');
        ++i;
    }
    return out;
}

std::string escape(std::string_view in) {
    std::string out;
    out.reserve(in.size() + in.size() / 8);
    for (char c : in) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&#39;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string escape_text(std::string_view in) {
    std::string out;
    out.reserve(in.size());
    for (char c : in) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Tree construction

namespace {

constexpr std::array<std::string_view, 14> kVoidElements{
    "area", "base", "br", "col", "embed", "hr", "img", "input", "link", "meta", "param", "source", "track", "wbr"};

constexpr std::array<std::string_view, 28> kBlockElements{
    "address", "article", "aside", "blockquote", "dd", "div", "dl", "dt", "figcaption", "figure",
    "footer", "form", "h1", "h2", "h3", "h4", "h5", "h6", "header", "hr", "li", "main", "nav",
    "ol", "p", "pre", "section", "table"};

constexpr std::array<std::string_view, 6> kMoreBlocks{"tr", "ul", "tbody", "thead", "tfoot", "caption"};

// Elements whose start tag closes an open <p>.
constexpr std::array<std::string_view, 20> kClosesParagraph{
    "address", "article", "aside", "blockquote", "div", "dl", "fieldset", "footer", "form", "h1",
    "h2", "h3", "h4", "h5", "h6", "header", "ol", "p", "pre", "table"};

template <std::size_t N>
bool contains(const std::array<std::string_view, N>& set, std::string_view value) {
    return std::find(set.begin(), set.end(), value) != set.end();
}

bool is_block(std::string_view tag) { return contains(kBlockElements, tag) || contains(kMoreBlocks, tag); }
bool is_raw_text(std::string_view tag) { return tag == "script" || tag == "style"; }
bool is_rcdata(std::string_view tag) { return tag == "textarea" || tag == "title"; }

bool is_tag_name_char(unsigned char c) { return text::is_alnum(c) || c == '-' || c == ':' || c == '_'; }

class TreeBuilder {
public:
    explicit TreeBuilder(std::vector<Node>& nodes) : nodes_(nodes) {
        nodes_.push_back(Node{Node::Type::Document, {}, {}, {}, 0, {}});
        stack_.push_back(0);
    }

    void text(std::string decoded) {
        if (decoded.empty()) return;
        const std::size_t parent = stack_.back();
        Node& p = nodes_[parent];
        // A newline right after <pre> is not part of the content.
        if (p.tag == "pre" && p.children.empty() && decoded.front() == '\n') {
            decoded.erase(0, 1);
            if (decoded.empty()) return;
        }
        if (!p.children.empty() && nodes_[p.children.back()].type == Node::Type::Text) {
            nodes_[p.children.back()].text += decoded;
            return;
        }
        append(Node{Node::Type::Text, {}, {}, std::move(decoded), parent, {}});
    }

    void start(std::string tag, std::vector<std::pair<std::string, std::string>> attrs, bool self_closing) {
        if (contains(kClosesParagraph, tag)) close_in_scope("p", {"div", "td", "th", "li", "blockquote"});
        if (tag == "li") close_in_scope("li", {"ul", "ol"});
        if (tag == "dt" || tag == "dd") {
            close_in_scope("dt", {"dl"});
            close_in_scope("dd", {"dl"});
        }
        if (tag == "tr") {
            close_in_scope("td", {"table"});
            close_in_scope("th", {"table"});
            close_in_scope("tr", {"table"});
        }
        if (tag == "td" || tag == "th") {
            close_in_scope("td", {"tr", "table"});
            close_in_scope("th", {"tr", "table"});
        }
        if (tag == "option") close_in_scope("option", {"select"});

        const bool is_void = contains(kVoidElements, tag);
        const std::size_t id = append(Node{Node::Type::Element, std::move(tag), std::move(attrs), {}, stack_.back(), {}});
        if (!is_void && !self_closing) stack_.push_back(id);
    }

    void end(std::string_view tag) {
        for (std::size_t i = stack_.size(); i-- > 1;) {
            if (nodes_[stack_[i]].tag == tag) {
                stack_.resize(i);
                return;
            }
        }
    }

    [[nodiscard]] std::string_view current_tag() const { return nodes_[stack_.back()].tag; }

private:
    std::size_t append(Node node) {
        const std::size_t id = nodes_.size();
        const std::size_t parent = node.parent;
        nodes_.push_back(std::move(node));
        nodes_[parent].children.push_back(id);
        return id;
    }

    void close_in_scope(std::string_view tag, std::initializer_list<std::string_view> barriers) {
        for (std::size_t i = stack_.size(); i-- > 1;) {
            const std::string_view open = nodes_[stack_[i]].tag;
            if (open == tag) {
                stack_.resize(i);
                return;
            }
            if (std::find(barriers.begin(), barriers.end(), open) != barriers.end()) return;
        }
    }

    std::vector<Node>& nodes_;
    std::vector<std::size_t> stack_;
};

std::vector<std::pair<std::string, std::string>> parse_attributes(std::string_view in, std::size_t& i, bool& self_closing) {
    std::vector<std::pair<std::string, std::string>> attrs;
    self_closing = false;
    while (i < in.size()) {
        while (i < in.size() && text::is_space(in[i])) ++i;
        if (i >= in.size()) break;
        if (in[i] == '>') {
            ++i;
            break;
        }
        if (in[i] == '/') {
            ++i;
            if (i < in.size() && in[i] == '>') {
                self_closing = true;
                ++i;
                break;
            }
            continue;
        }
        const std::size_t name_begin = i;
        while (i < in.size() && !text::is_space(in[i]) && in[i] != '=' && in[i] != '>' && in[i] != '/') ++i;
        std::string name = text::to_lower(in.substr(name_begin, i - name_begin));
        if (name.empty()) {
            ++i;
            continue;
        }
        while (i < in.size() && text::is_space(in[i])) ++i;
        std::string value;
        if (i < in.size() && in[i] == '=') {
            ++i;
            while (i < in.size() && text::is_space(in[i])) ++i;
            if (i < in.size() && (in[i] == '"' || in[i] == '\'')) {
                const char quote = in[i++];
                const auto close = in.find(quote, i);
                const std::size_t value_end = close == std::string_view::npos ? in.size() : close;
                value = decode_entities(in.substr(i, value_end - i));
                i = close == std::string_view::npos ? in.size() : close + 1;
            } else {
                const std::size_t value_begin = i;
                while (i < in.size() && !text::is_space(in[i]) && in[i] != '>') ++i;
                value = decode_entities(in.substr(value_begin, i - value_begin));
            }
        }
        attrs.emplace_back(std::move(name), std::move(value));
    }
    return attrs;
}

// Finds "</tag" (case-insensitive) at or after `from`.
std::size_t find_end_tag(std::string_view in, std::size_t from, std::string_view tag) {
    for (std::size_t pos = in.find("</", from); pos != std::string_view::npos; pos = in.find("</", pos + 2)) {
        if (text::starts_with_icase(in.substr(pos + 2), tag)) {
            const std::size_t after = pos + 2 + tag.size();
            if (after >= in.size() || !is_tag_name_char(in[after])) return pos;
        }
    }
    return std::string_view::npos;
}

}  // namespace

Document Document::parse(std::string_view in) {
    if (in.find('\0') != std::string_view::npos) {
        throw Error(ErrorCode::UnparseableHtml, "body contains NUL bytes");
    }
    Document doc;
    TreeBuilder builder(doc.nodes_);
    std::size_t i = 0;
    std::size_t text_begin = 0;

    const auto flush_text = [&](std::size_t end) {
        if (end > text_begin) builder.text(decode_entities(in.substr(text_begin, end - text_begin)));
    };

    while (i < in.size()) {
        if (in[i] != '<' || i + 1 >= in.size()) {
            ++i;
            continue;
        }
        const char next = in[i + 1];
        if (next == '!' || next == '?') {
            flush_text(i);
            if (in.substr(i, 4) == "<!--") {
                const auto close = in.find("-->", i + 4);
                i = close == std::string_view::npos ? in.size() : close + 3;
            } else if (text::starts_with_icase(in.substr(i), "<![CDATA[")) {
                const auto close = in.find("]]>", i + 9);
                const std::size_t end = close == std::string_view::npos ? in.size() : close;
                builder.text(std::string(in.substr(i + 9, end - i - 9)));
                i = close == std::string_view::npos ? in.size() : close + 3;
            } else {
                const auto close = in.find('>', i);
                i = close == std::string_view::npos ? in.size() : close + 1;
            }
            text_begin = i;
            continue;
        }
        if (next == '/') {
            std::size_t j = i + 2;
            const std::size_t name_begin = j;
            while (j < in.size() && is_tag_name_char(in[j])) ++j;
            if (j == name_begin || !text::is_alpha(in[name_begin])) {
                ++i;
                continue;
            }
            flush_text(i);
            const std::string tag = text::to_lower(in.substr(name_begin, j - name_begin));
            const auto close = in.find('>', j);
            i = close == std::string_view::npos ? in.size() : close + 1;
            text_begin = i;
            builder.end(tag);
            continue;
        }
        if (!text::is_alpha(next)) {
            ++i;
            continue;
        }

        flush_text(i);
        std::size_t j = i + 1;
        while (j < in.size() && is_tag_name_char(in[j])) ++j;
        std::string tag = text::to_lower(in.substr(i + 1, j - i - 1));
        bool self_closing = false;
        auto attrs = parse_attributes(in, j, self_closing);
        i = j;
        text_begin = i;

        const bool raw = is_raw_text(tag);
        const bool rcdata = is_rcdata(tag);
        builder.start(tag, std::move(attrs), self_closing);
        if ((raw || rcdata) && !self_closing) {
            const std::size_t end = find_end_tag(in, i, tag);
            const std::size_t content_end = end == std::string_view::npos ? in.size() : end;
            const std::string_view content = in.substr(i, content_end - i);
            builder.text(rcdata ? decode_entities(content) : std::string(content));
            builder.end(tag);
            if (end == std::string_view::npos) {
                i = in.size();
            } else {
                const auto close = in.find('>', end);
                i = close == std::string_view::npos ? in.size() : close + 1;
            }
            text_begin = i;
        }
    }
    flush_text(in.size());
    return doc;
}

std::optional<std::string> Document::attribute(std::size_t id, std::string_view name) const {
    for (const auto& [key, value] : node(id).attributes) {
        if (text::iequals(key, name)) return value;
    }
    return std::nullopt;
}

bool Document::has_ancestor(std::size_t id, std::string_view tag) const {
    std::size_t current = node(id).parent;
    while (current != kRoot) {
        if (nodes_[current].tag == tag) return true;
        current = nodes_[current].parent;
    }
    return false;
}

std::vector<std::size_t> Document::find_all(const std::function<bool(std::size_t, const Node&)>& pred) const {
    std::vector<std::size_t> out;
    // Node ids are assigned in document order during construction.
    for (std::size_t id = 1; id < nodes_.size(); ++id) {
        if (nodes_[id].type == Node::Type::Element && pred(id, nodes_[id])) out.push_back(id);
    }
    return out;
}

std::vector<std::size_t> Document::elements_by_tag(std::string_view tag) const {
    return find_all([tag](std::size_t, const Node& n) { return n.tag == tag; });
}

std::string Document::text_content(std::size_t id) const {
    std::string out;
    const Node& n = node(id);
    if (n.type == Node::Type::Text) return n.text;
    if (is_raw_text(n.tag)) return out;
    for (std::size_t child : n.children) append_text(child, out);
    return out;
}

void Document::append_text(std::size_t id, std::string& out) const {
    const Node& n = nodes_[id];
    if (n.type == Node::Type::Text) {
        out += n.text;
        return;
    }
    if (is_raw_text(n.tag)) return;
    if (n.tag == "br") {
        out.push_back('\n');
        return;
    }
    const bool block = is_block(n.tag);
    if (block && !out.empty() && out.back() != '\n') out.push_back('\n');
    for (std::size_t child : n.children) append_text(child, out);
    if (block && !out.empty() && out.back() != '\n') out.push_back('\n');
}

}  // namespace codegenlink::html
