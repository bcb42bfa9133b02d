#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pddlkit {

/// Closed error taxonomy. The first eight are the generation-time syntax
/// error classes; `Lexical` covers everything that is not even a well-formed
/// s-expression document.
enum class Category {
    ObjectType,
    PredicateName,
    PredicateFormat,
    PredicateUsage,
    FunctionName,
    FunctionFormat,
    FunctionUsage,
    NumericUsage,
    Lexical,
};

inline constexpr std::array<Category, 9> kAllCategories = {
    Category::ObjectType,    Category::PredicateName, Category::PredicateFormat,
    Category::PredicateUsage, Category::FunctionName, Category::FunctionFormat,
    Category::FunctionUsage, Category::NumericUsage,  Category::Lexical,
};

std::string_view to_string(Category c);
std::optional<Category> category_from_string(std::string_view s);

/// Position of a node in its source text. Positions are bookkeeping only:
/// two SourceLocs always compare equal so that AST structural equality
/// ignores where a node came from.
struct SourceLoc {
    int line = 0;
    int column = 0;

    friend constexpr bool operator==(const SourceLoc&, const SourceLoc&) { return true; }
};

struct Location {
    int line = 0;
    int column = 0;
    std::string snippet;
};

/// One checker finding. `code` is a finer machine tag (e.g.
/// "unbalanced-parens", "duplicate-declaration") inside the category.
struct Diagnostic {
    Category category = Category::Lexical;
    std::string code;
    Location location;
    std::string message;
    std::string suggestion;

    /// Message and suggestion joined into one feedback paragraph.
    std::string feedback() const;
};

/// Result of a parse-like operation: a value, or diagnostics explaining why
/// there is none. A value may still be present alongside diagnostics when the
/// producer is lenient.
template <typename T>
struct Parsed {
    std::optional<T> value;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return value.has_value() && diagnostics.empty(); }
    explicit operator bool() const { return ok(); }
};

}  // namespace pddlkit
