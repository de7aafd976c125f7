#include "codegenlink/similarity.hpp"

#include "text_util.hpp"

#include <algorithm>
#include <array>

namespace codegenlink {

std::string_view to_string(TokenKind kind) noexcept {
    switch (kind) {
        case TokenKind::Identifier: return "Identifier";
        case TokenKind::Keyword: return "Keyword";
        case TokenKind::NumberLiteral: return "NumberLiteral";
        case TokenKind::StringLiteral: return "StringLiteral";
        case TokenKind::Operator: return "Operator";
        case TokenKind::Punctuation: return "Punctuation";
    }
    return "?";
}

namespace {

constexpr std::array<std::string_view, 35> kPythonKeywords{
    "False", "None",   "True",    "and",      "as",     "assert", "async", "await", "break",
    "class", "continue", "def",   "del",      "elif",   "else",   "except", "finally", "for",
    "from",  "global", "if",      "import",   "in",     "is",     "lambda", "nonlocal", "not",
    "or",    "pass",   "raise",   "return",   "try",    "while",  "with",  "yield"};

constexpr std::array<std::string_view, 53> kJavaKeywords{
    "abstract", "assert",     "boolean",   "break",     "byte",      "case",     "catch",
    "char",     "class",      "const",     "continue",  "default",   "do",       "double",
    "else",     "enum",       "extends",   "final",     "finally",   "float",    "for",
    "goto",     "if",         "implements", "import",   "instanceof", "int",     "interface",
    "long",     "native",     "new",       "package",   "private",   "protected", "public",
    "return",   "short",      "static",    "strictfp",  "super",     "switch",   "synchronized",
    "this",     "throw",      "throws",    "transient", "try",       "void",     "volatile",
    "while",    "true",       "false",     "null"};

// Longest operators first so that a prefix scan finds the maximal munch.
constexpr std::array<std::string_view, 27> kPythonOperators{
    "**=", "//=", ">>=", "<<=", "...", "->", ":=", "==", "!=", "<=", ">=", "**", "//", "<<",
    ">>", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "@=", "<>", "~", "!"};

constexpr std::array<std::string_view, 27> kJavaOperators{
    ">>>=", "<<=", ">>=", ">>>", "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=",
    ">=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<", ">>", "~", "!"};

constexpr std::string_view kPythonPunctuation = "()[]{},:;.";
constexpr std::string_view kJavaPunctuation = "()[]{};,.@";
constexpr std::string_view kGenericPunctuation = "()[]{},;.:";

bool is_ident_start(unsigned char c, bool allow_dollar) {
    return text::is_alpha(c) || c == '_' || c >= 0x80 || (allow_dollar && c == '$');
}
bool is_ident_char(unsigned char c, bool allow_dollar) { return is_ident_start(c, allow_dollar) || text::is_digit(c); }

std::size_t utf8_length(unsigned char lead) {
    if (lead >= 0xF0) return 4;
    if (lead >= 0xE0) return 3;
    if (lead >= 0xC0) return 2;
    return 1;
}

class Lexer {
public:
    Lexer(std::string_view src, Language lang) : src_(src) { seq_.language = lang; }

    TokenSequence run() {
        switch (seq_.language) {
            case Language::Python: lex_python(); break;
            case Language::Java: lex_java(); break;
            case Language::Unknown: lex_generic(); break;
        }
        return std::move(seq_);
    }

private:
    [[nodiscard]] unsigned char at(std::size_t i) const {
        return i < src_.size() ? static_cast<unsigned char>(src_[i]) : '\0';
    }
    [[nodiscard]] bool starts(std::string_view s) const { return src_.substr(pos_, s.size()) == s; }

    void emit(TokenKind kind, std::string text) { seq_.tokens.push_back(Token{kind, std::move(text)}); }

    // Reads a quoted literal whose opening delimiter starts at pos_. Escapes
    // are honoured; `single_line` literals still run to end of input when
    // unterminated.
    void read_string(std::string_view delimiter) {
        pos_ += delimiter.size();
        std::string content;
        while (pos_ < src_.size()) {
            if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) {
                content += src_.substr(pos_, 2);
                pos_ += 2;
                continue;
            }
            if (starts(delimiter)) {
                pos_ += delimiter.size();
                emit(TokenKind::StringLiteral, std::move(content));
                return;
            }
            content.push_back(src_[pos_++]);
        }
        seq_.unterminated_string = true;
        emit(TokenKind::StringLiteral, std::move(content));
    }

    template <std::size_t N>
    bool read_operator(const std::array<std::string_view, N>& operators) {
        for (std::string_view op : operators) {
            if (starts(op)) {
                emit(op == "..." ? TokenKind::Punctuation : TokenKind::Operator, std::string(op));
                pos_ += op.size();
                return true;
            }
        }
        return false;
    }

    void read_symbol(std::string_view punctuation) {
        const unsigned char c = at(pos_);
        const std::size_t len = std::min(utf8_length(c), src_.size() - pos_);
        const TokenKind kind = punctuation.find(static_cast<char>(c)) != std::string_view::npos
                                   ? TokenKind::Punctuation
                                   : TokenKind::Operator;
        emit(kind, std::string(src_.substr(pos_, len)));
        pos_ += len;
    }

    // Numeric literal: digits, letters (hex digits, suffixes, exponent
    // markers), underscores, one radix point, and a sign right after an
    // exponent marker.
    void read_number(bool java) {
        const std::size_t begin = pos_;
        const bool hex = at(pos_) == '0' && (at(pos_ + 1) == 'x' || at(pos_ + 1) == 'X');
        while (pos_ < src_.size()) {
            const unsigned char c = at(pos_);
            if (text::is_alnum(c) || c == '_') {
                ++pos_;
                const bool exponent = hex ? (java && (c == 'p' || c == 'P')) : (c == 'e' || c == 'E');
                if (exponent && (at(pos_) == '+' || at(pos_) == '-') && text::is_digit(at(pos_ + 1))) ++pos_;
            } else if (c == '.' && text::is_digit(at(pos_ + 1))) {
                ++pos_;
            } else if (c == '.' && pos_ > begin && !text::is_alpha(at(pos_ + 1)) && at(pos_ + 1) != '.' && !hex) {
                ++pos_;  // "1." is a float literal
            } else {
                break;
            }
        }
        emit(TokenKind::NumberLiteral, std::string(src_.substr(begin, pos_ - begin)));
    }

    void lex_python() {
        while (pos_ < src_.size()) {
            const unsigned char c = at(pos_);
            if (text::is_space(c)) {
                ++pos_;
            } else if (c == '\\' && (at(pos_ + 1) == '\n' || at(pos_ + 1) == '\r')) {
                ++pos_;
            } else if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
            } else if (is_ident_start(c, false)) {
                const std::size_t begin = pos_;
                while (pos_ < src_.size() && is_ident_char(at(pos_), false)) ++pos_;
                const std::string_view word = src_.substr(begin, pos_ - begin);
                if ((at(pos_) == '"' || at(pos_) == '\'') && is_string_prefix(word)) {
                    read_python_string();
                } else if (std::find(kPythonKeywords.begin(), kPythonKeywords.end(), word) != kPythonKeywords.end()) {
                    emit(TokenKind::Keyword, std::string(word));
                } else {
                    emit(TokenKind::Identifier, std::string(word));
                }
            } else if (text::is_digit(c) || (c == '.' && text::is_digit(at(pos_ + 1)))) {
                read_number(false);
            } else if (c == '"' || c == '\'') {
                read_python_string();
            } else if (!read_operator(kPythonOperators)) {
                read_symbol(kPythonPunctuation);
            }
        }
    }

    static bool is_string_prefix(std::string_view word) {
        if (word.empty() || word.size() > 2) return false;
        const std::string lowered = text::to_lower(word);
        return lowered == "r" || lowered == "u" || lowered == "b" || lowered == "f" || lowered == "br" ||
               lowered == "rb" || lowered == "fr" || lowered == "rf";
    }

    void read_python_string() {
        const char quote = src_[pos_];
        const std::string triple(3, quote);
        if (starts(triple)) {
            read_string(triple);
        } else {
            read_string(std::string_view(&src_[pos_], 1));
        }
    }

    void lex_java() {
        while (pos_ < src_.size()) {
            const unsigned char c = at(pos_);
            if (text::is_space(c)) {
                ++pos_;
            } else if (starts("//")) {
                while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
            } else if (starts("/*")) {
                const auto close = src_.find("*/", pos_ + 2);
                pos_ = close == std::string_view::npos ? src_.size() : close + 2;
            } else if (is_ident_start(c, true)) {
                const std::size_t begin = pos_;
                while (pos_ < src_.size() && is_ident_char(at(pos_), true)) ++pos_;
                const std::string_view word = src_.substr(begin, pos_ - begin);
                const bool keyword = std::find(kJavaKeywords.begin(), kJavaKeywords.end(), word) != kJavaKeywords.end();
                emit(keyword ? TokenKind::Keyword : TokenKind::Identifier, std::string(word));
            } else if (text::is_digit(c) || (c == '.' && text::is_digit(at(pos_ + 1)))) {
                read_number(true);
            } else if (starts("\"\"\"")) {
                read_string("\"\"\"");
            } else if (c == '"') {
                read_string("\"");
            } else if (c == '\'') {
                read_string("'");
            } else if (!read_operator(kJavaOperators)) {
                read_symbol(kJavaPunctuation);
            }
        }
    }

    void lex_generic() {
        while (pos_ < src_.size()) {
            const unsigned char c = at(pos_);
            if (text::is_space(c)) {
                ++pos_;
            } else if (text::is_alnum(c) || c == '_') {
                const std::size_t begin = pos_;
                while (pos_ < src_.size() && (text::is_alnum(at(pos_)) || at(pos_) == '_')) ++pos_;
                emit(text::is_digit(c) ? TokenKind::NumberLiteral : TokenKind::Identifier,
                     std::string(src_.substr(begin, pos_ - begin)));
            } else if (c == '"' || c == '\'') {
                read_string(std::string_view(&src_[pos_], 1));
            } else {
                read_symbol(kGenericPunctuation);
            }
        }
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    TokenSequence seq_;
};

}  // namespace

TokenSequence tokenize(std::string_view content, Language language) { return Lexer(content, language).run(); }

TokenSequence normalize(const TokenSequence& seq, bool p_token) {
    if (!p_token) return seq;
    TokenSequence out = seq;
    for (Token& token : out.tokens) {
        switch (token.kind) {
            case TokenKind::Identifier: token.text = kIdentifierPlaceholder; break;
            case TokenKind::NumberLiteral: token.text = kNumberPlaceholder; break;
            case TokenKind::StringLiteral: token.text = kStringPlaceholder; break;
            default: break;
        }
    }
    return out;
}

}  // namespace codegenlink
