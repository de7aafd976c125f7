#include "codegenlink/errors.hpp"
#include "codegenlink/html.hpp"

#include "expect.hpp"

#include <doctest.h>

using namespace codegenlink;
using expect::error_code;

TEST_CASE("decode_entities") {
    CHECK(html::decode_entities("a &lt; b &amp;&amp; c &gt; d") == "a < b && c > d");
    CHECK(html::decode_entities("&quot;x&quot; &#39;y&#x27;") == "\"x\" 'y'");
    CHECK(html::decode_entities("&#8364; &#x20AC;") == "\xE2\x82\xAC \xE2\x82\xAC");
    CHECK(html::decode_entities("&nbsp;&nbsp;x") == "  x");
    CHECK(html::decode_entities("&bogus; & &#; &#xZZ;") == "&bogus; & &#; &#xZZ;");
}

TEST_CASE("escape and escape_text") {
    CHECK(html::escape(R"(<a href="x">'&'</a>)") == "&lt;a href=&quot;x&quot;&gt;&#39;&amp;&#39;&lt;/a&gt;");
    CHECK(html::escape_text(R"(<"MIT">)") == "&lt;\"MIT\"&gt;");
    CHECK(html::decode_entities(html::escape("a<b>&\"'")) == "a<b>&\"'");
}

TEST_CASE("tree structure and attributes") {
    const auto doc = html::Document::parse(
        R"(<div id=main class='q a'><p>one<p>two</div><img src="x.png"><span>after</span>)");
    const auto divs = doc.elements_by_tag("div");
    REQUIRE(divs.size() == 1);
    CHECK(doc.attribute(divs[0], "id") == "main");
    CHECK(doc.attribute(divs[0], "CLASS") == "q a");
    CHECK_FALSE(doc.attribute(divs[0], "title").has_value());

    const auto ps = doc.elements_by_tag("p");
    REQUIRE(ps.size() == 2);
    CHECK(doc.node(ps[1]).parent == divs[0]);  // <p> closed the previous <p>
    CHECK(doc.text_content(ps[0]) == "one");

    const auto img = doc.elements_by_tag("img");
    const auto span = doc.elements_by_tag("span");
    REQUIRE(img.size() == 1);
    REQUIRE(span.size() == 1);
    CHECK(doc.node(img[0]).children.empty());
    CHECK_FALSE(doc.has_ancestor(span[0], "img"));
    CHECK_FALSE(doc.has_ancestor(span[0], "div"));
}

TEST_CASE("unclosed and mis-nested tags are repaired") {
    const auto doc = html::Document::parse("<pre><code>x = 1\n<b>y</pre> tail </i></code><ul><li>a<li>b</ul>");
    const auto code = doc.elements_by_tag("code");
    REQUIRE(code.size() == 1);
    CHECK(doc.has_ancestor(code[0], "pre"));
    CHECK(doc.text_content(code[0]) == "x = 1\ny");
    CHECK(doc.elements_by_tag("li").size() == 2);
    CHECK(doc.page_text().find("tail") != std::string::npos);
}

TEST_CASE("script, style and comments contribute no text") {
    const auto doc = html::Document::parse(
        "<html><head><style>p{}</style><script>var s = '<pre>x</pre>';</script></head>"
        "<body><!-- <pre>hidden</pre> --><p>shown</p></body></html>");
    CHECK(doc.elements_by_tag("pre").empty());
    const std::string text = doc.page_text();
    CHECK(text.find("shown") != std::string::npos);
    CHECK(text.find("hidden") == std::string::npos);
    CHECK(text.find("var s") == std::string::npos);
}

TEST_CASE("pre text keeps whitespace and decodes entities") {
    const auto doc = html::Document::parse("<pre>if a &lt; b:\n    return  a<br>done</pre>");
    CHECK(doc.text_content(doc.elements_by_tag("pre")[0]) == "if a < b:\n    return  a\ndone");
}

TEST_CASE("element text is a substring of the page text") {
    const auto doc = html::Document::parse(
        "<div><h1>T</h1><p>intro <code>x</code></p><pre><code>a\nb</code></pre><table><tr><td>1<td>2</table></div>");
    const std::string page = doc.page_text();
    for (std::size_t id = 1; id < doc.size(); ++id) {
        if (doc.node(id).type != html::Node::Type::Element) continue;
        CAPTURE(doc.node(id).tag);
        CHECK(page.find(doc.text_content(id)) != std::string::npos);
    }
}

TEST_CASE("NUL bytes are not HTML") {
    const std::string bad("<p>a\0b</p>", 10);
    CHECK(error_code([&] { (void)html::Document::parse(bad); }) == ErrorCode::UnparseableHtml);
}

TEST_CASE("empty and text-only input") {
    CHECK(html::Document::parse("").page_text().empty());
    CHECK(html::Document::parse("just text").page_text() == "just text");
}
