#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "pddlkit/diagnostic.hpp"

namespace pddlkit {

/// A node of a parenthesized document: either an atom (symbol or number) or a
/// list. Atoms are lowercased at read time; PDDL identifiers are
/// case-insensitive.
struct SExpr {
    bool is_list = false;
    std::string atom;
    std::vector<SExpr> items;
    SourceLoc loc;

    bool is_atom() const { return !is_list; }
    bool is_atom(std::string_view s) const { return !is_list && atom == s; }

    /// Head symbol of a list whose first item is an atom, or "".
    std::string_view head() const;

    /// Compact single-line rendering, used for diagnostic snippets.
    std::string to_string() const;
};

/// Reads every top-level s-expression in `text`. `;` comments are dropped.
/// Lexical problems (stray characters, unbalanced parentheses) are reported
/// as Lexical diagnostics; whatever could be read is still returned.
Parsed<std::vector<SExpr>> read_sexprs(std::string_view text);

/// True for characters allowed inside a symbol.
bool is_symbol_char(char c);

}  // namespace pddlkit
