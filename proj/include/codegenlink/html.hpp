#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace codegenlink::html {

/// Decodes named (common subset), decimal and hex character references.
/// Unknown references are left verbatim. `&nbsp;` becomes a plain space so
/// that code indented with it tokenizes normally.
std::string decode_entities(std::string_view text);

/// Escapes &, <, >, " and ' for safe inclusion in markup.
std::string escape(std::string_view text);

/// Escapes only &, < and > (element content, where quotes are literal).
std::string escape_text(std::string_view text);

struct Node {
    enum class Type { Document, Element, Text };

    Type type = Type::Element;
    std::string tag;  // lowercase; empty for text and document nodes
    std::vector<std::pair<std::string, std::string>> attributes;
    std::string text;  // decoded text for text nodes
    std::size_t parent = 0;
    std::vector<std::size_t> children;
};

/// Error-recovering HTML tree. Mis-nested and unclosed tags are repaired the
/// way browsers mostly do: void elements never nest, `p`/`li`/`td`/`tr`/
/// `option` are implicitly closed, and stray end tags are ignored.
class Document {
public:
    /// Throws Error(UnparseableHtml) for input that is not text (NUL bytes).
    static Document parse(std::string_view markup);

    static constexpr std::size_t kRoot = 0;

    [[nodiscard]] const Node& node(std::size_t id) const { return nodes_.at(id); }
    [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }

    [[nodiscard]] std::optional<std::string> attribute(std::size_t id, std::string_view name) const;
    [[nodiscard]] bool has_ancestor(std::size_t id, std::string_view tag) const;

    /// Element ids in document order satisfying the predicate.
    [[nodiscard]] std::vector<std::size_t> find_all(const std::function<bool(std::size_t, const Node&)>& pred) const;
    [[nodiscard]] std::vector<std::size_t> elements_by_tag(std::string_view tag) const;

    /// Concatenated descendant text. `<br>` and block-level element
    /// boundaries contribute a line break; script and style content is
    /// skipped. The text of any element is a contiguous substring of the
    /// text of the document root.
    [[nodiscard]] std::string text_content(std::size_t id) const;
    [[nodiscard]] std::string page_text() const { return text_content(kRoot); }

private:
    void append_text(std::size_t id, std::string& out) const;

    std::vector<Node> nodes_;
};

}  // namespace codegenlink::html
