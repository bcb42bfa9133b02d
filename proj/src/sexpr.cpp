#include "pddlkit/sexpr.hpp"

#include <cctype>

namespace pddlkit {

std::string_view SExpr::head() const {
    if (!is_list || items.empty() || items.front().is_list) return {};
    return items.front().atom;
}

std::string SExpr::to_string() const {
    if (!is_list) return atom;
    std::string out = "(";
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ' ';
        out += items[i].to_string();
    }
    out += ')';
    return out;
}

bool is_symbol_char(char c) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u)) return true;
    switch (c) {
        case '-': case '_': case '?': case ':': case '.': case '+': case '*':
        case '/': case '<': case '>': case '=': case '!':
            return true;
        default:
            return false;
    }
}

namespace {

Diagnostic lexical(std::string code, SourceLoc loc, std::string message, std::string snippet = {}) {
    Diagnostic d;
    d.category = Category::Lexical;
    d.code = std::move(code);
    d.location = {loc.line, loc.column, std::move(snippet)};
    d.message = std::move(message);
    d.suggestion = "Please revise the PDDL text so that it is a well-formed list of parenthesized expressions.";
    return d;
}

}  // namespace

Parsed<std::vector<SExpr>> read_sexprs(std::string_view text) {
    Parsed<std::vector<SExpr>> out;
    std::vector<SExpr> top;
    std::vector<SExpr> stack;  // open lists

    int line = 1;
    int col = 1;
    std::size_t i = 0;
    auto advance = [&]() {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        ++i;
    };
    auto emit = [&](SExpr node) {
        if (stack.empty()) {
            top.push_back(std::move(node));
        } else {
            stack.back().items.push_back(std::move(node));
        }
    };

    while (i < text.size()) {
        const char c = text[i];
        if (c == ';') {
            while (i < text.size() && text[i] != '\n') advance();
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance();
            continue;
        }
        const SourceLoc here{line, col};
        if (c == '(') {
            SExpr list;
            list.is_list = true;
            list.loc = here;
            stack.push_back(std::move(list));
            advance();
            continue;
        }
        if (c == ')') {
            if (stack.empty()) {
                out.diagnostics.push_back(lexical("unbalanced-parens", here, "Unexpected `)` with no matching `(`.", ")"));
            } else {
                SExpr done = std::move(stack.back());
                stack.pop_back();
                emit(std::move(done));
            }
            advance();
            continue;
        }
        if (is_symbol_char(c)) {
            SExpr atom;
            atom.loc = here;
            while (i < text.size() && is_symbol_char(text[i])) {
                atom.atom += static_cast<char>(std::tolower(static_cast<unsigned char>(text[i])));
                advance();
            }
            emit(std::move(atom));
            continue;
        }
        // Skip the whole run of unexpected bytes so one typo yields one diagnostic.
        std::string bad;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) && !is_symbol_char(text[i]) &&
               text[i] != '(' && text[i] != ')' && text[i] != ';') {
            bad += text[i];
            advance();
        }
        out.diagnostics.push_back(
            lexical("lexical-error", here, "Unexpected character sequence `" + bad + "`.", bad));
    }
    while (!stack.empty()) {
        SExpr open = std::move(stack.back());
        stack.pop_back();
        out.diagnostics.push_back(lexical("unbalanced-parens", open.loc,
                                          "Missing `)`: the list opened here is never closed.",
                                          open.to_string().substr(0, 40)));
        emit(std::move(open));
    }
    out.value = std::move(top);
    return out;
}

}  // namespace pddlkit
