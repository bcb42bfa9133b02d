#include "pddlkit/diagnostic.hpp"

namespace pddlkit {

std::string_view to_string(Category c) {
    switch (c) {
        case Category::ObjectType: return "object-type";
        case Category::PredicateName: return "predicate-name";
        case Category::PredicateFormat: return "predicate-format";
        case Category::PredicateUsage: return "predicate-usage";
        case Category::FunctionName: return "function-name";
        case Category::FunctionFormat: return "function-format";
        case Category::FunctionUsage: return "function-usage";
        case Category::NumericUsage: return "numeric-usage";
        case Category::Lexical: return "lexical";
    }
    return "lexical";
}

std::optional<Category> category_from_string(std::string_view s) {
    for (Category c : kAllCategories) {
        if (to_string(c) == s) return c;
    }
    return std::nullopt;
}

std::string Diagnostic::feedback() const {
    if (suggestion.empty()) return message;
    return message + " " + suggestion;
}

}  // namespace pddlkit
