#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <sstream>

#include "pddlkit/retrieval.hpp"

namespace pddlkit {

bool VerbLexicon::contains(std::string_view v) const {
    return std::find(verbs.begin(), verbs.end(), v) != verbs.end();
}

std::string VerbLexicon::add(std::string_view v) {
    std::string low(v);
    for (auto& c : low) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (!contains(low)) verbs.push_back(low);
    return low;
}

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool is_placeholder(std::string_view t) { return t.size() > 2 && t.front() == '[' && t.back() == ']'; }

bool is_word(std::string_view t) {
    return !t.empty() && (std::isalnum(static_cast<unsigned char>(t[0])) || t[0] == '_');
}

bool is_alpha_word(std::string_view t) {
    return !t.empty() && std::all_of(t.begin(), t.end(), [](char c) {
        return std::isalpha(static_cast<unsigned char>(c)) || c == '-';
    });
}

std::vector<std::string> tokenize(std::string_view s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == '[') {
            std::size_t j = s.find(']', i);
            if (j != std::string_view::npos) {
                out.emplace_back(s.substr(i, j - i + 1));
                i = j + 1;
                continue;
            }
        }
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < s.size()) {
                const char d = s[j];
                if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' || d == '\'') {
                    ++j;
                } else if ((d == '-' || d == '.') && j + 1 < s.size() &&
                           std::isalnum(static_cast<unsigned char>(s[j + 1])) &&
                           (d == '-' || std::isdigit(static_cast<unsigned char>(s[j - 1])))) {
                    ++j;  // hyphenated words, decimals
                } else {
                    break;
                }
            }
            out.emplace_back(s.substr(i, j - i));
            i = j;
            continue;
        }
        out.emplace_back(1, c);
        ++i;
    }
    return out;
}

std::string join_tokens(const std::vector<std::string>& toks) {
    std::string out;
    for (const auto& t : toks) {
        const bool tight = t.size() == 1 && std::string_view(",;:)!?").find(t[0]) != std::string_view::npos;
        if (!out.empty() && !tight && out.back() != '(') out += ' ';
        out += t;
    }
    return out;
}

/// Sentences without their terminal punctuation.
std::vector<std::string> split_sentences(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        const bool terminal = (c == '.' || c == '!' || c == '?') &&
                              (i + 1 == text.size() || std::isspace(static_cast<unsigned char>(text[i + 1])));
        if (terminal) {
            out.push_back(cur);
            cur.clear();
            continue;
        }
        cur += std::isspace(static_cast<unsigned char>(c)) ? ' ' : c;
    }
    out.push_back(cur);
    std::vector<std::string> trimmed;
    for (auto& s : out) {
        std::string t;
        for (char c : s) {
            if (c == ' ' && (t.empty() || t.back() == ' ')) continue;
            t += c;
        }
        while (!t.empty() && t.back() == ' ') t.pop_back();
        if (!t.empty()) trimmed.push_back(std::move(t));
    }
    return trimmed;
}

const std::set<std::string> kLocationWords = {"position", "location", "waypoint", "region", "place",
                                              "area",     "spot",     "cell",     "site",   "destination"};
const std::set<std::string> kDeterminers = {"a",     "an",   "the",   "its",  "another", "one", "some",
                                            "each",  "every", "their", "this", "that",   "his", "her"};
const std::set<std::string> kModifiers = {"current", "new",     "other",   "next",       "target",   "given",
                                          "adjacent", "same",   "different", "specific", "particular", "certain",
                                          "starting", "original", "initial", "final"};
const std::set<std::string> kCopulas = {"is", "are", "be", "been", "becomes", "become", "remains", "remain"};
const std::set<std::string> kStateWords = {"free",  "full",   "empty", "available", "busy",  "airborne", "idle",
                                           "open",  "closed", "clear", "active",    "ready", "dirty",    "clean"};
const std::set<std::string> kNumberWords = {"zero", "one", "two",   "three", "four", "five",
                                            "six",  "seven", "eight", "nine", "ten"};
const std::set<std::string> kNotVerbs = {"the", "a", "an", "its", "be", "not", "no", "which", "where", "when"};

class RuleAbstractor {
public:
    RuleAbstractor(const VerbLexicon& lex, const std::vector<std::string>& vocabulary) : lex_(lex) {
        for (const auto& v : vocabulary) vocab_.insert(lower(v));
    }

    AbstractionResult run(std::string_view desc) {
        // Placeholders already in the text keep their numbers.
        static const std::regex ph(R"(\[([a-z]+)(\d+)\])");
        const std::string text(desc);
        for (auto it = std::sregex_iterator(text.begin(), text.end(), ph); it != std::sregex_iterator(); ++it) {
            auto& n = counters_[(*it)[1].str()];
            n = std::max(n, std::stoi((*it)[2].str()));
        }

        std::vector<std::string> kept;
        std::set<std::string> seen;
        static const std::regex indexed(R"(\b([A-Za-z]+)_\d+\b)");
        for (auto& s : split_sentences(desc)) {
            const std::string low = lower(s);
            if (low.rfind("for example", 0) == 0 || low.rfind("for instance", 0) == 0 || low.rfind("e.g", 0) == 0) {
                // Example sentences name concrete objects; harvest their classes.
                for (auto it = std::sregex_iterator(s.begin(), s.end(), indexed); it != std::sregex_iterator(); ++it) {
                    harvested_.insert(lower((*it)[1].str()));
                }
                continue;
            }
            if (seen.insert(low).second) kept.push_back(s);
        }
        find_subject(kept);

        std::string out;
        for (const auto& s : kept) {
            std::string r = rewrite(s);
            if (r.empty()) continue;
            if (!out.empty()) out += ' ';
            out += r + '.';
        }
        return {out, lex_, {}};
    }

private:
    void find_subject(const std::vector<std::string>& sentences) {
        static const std::regex subj(R"(\benables? (?:a|an|the) ([A-Za-z][\w-]*)(?: ([A-Za-z][\w-]*))?)",
                                     std::regex::icase);
        for (const auto& s : sentences) {
            std::smatch m;
            if (std::regex_search(s, m, subj)) {
                subject_ = lower(m[1].str());
                // "enables an airborne uav": skip the adjective
                if ((kStateWords.count(subject_) || kModifiers.count(subject_)) && m[2].matched) {
                    subject_ = lower(m[2].str());
                }
                return;
            }
        }
    }

    std::string fresh(const std::string& cls) { return "[" + cls + std::to_string(++counters_[cls]) + "]"; }

    std::string surface(const std::string& cls, const std::string& key) {
        auto it = surface_.find(cls + ":" + key);
        if (it != surface_.end()) return it->second;
        std::string p = fresh(cls);
        surface_[cls + ":" + key] = p;
        return p;
    }

    std::optional<std::string> noun_class(const std::string& word) const {
        std::string w = lower(word);
        auto cls = [&](const std::string& s) -> std::optional<std::string> {
            if (s == subject_) return std::nullopt;
            if (kLocationWords.count(s)) return "position";
            if (harvested_.count(s) || vocab_.count(s)) return "object";
            return std::nullopt;
        };
        if (auto c = cls(w)) return c;
        if (w.size() > 1 && w.back() == 's') return cls(w.substr(0, w.size() - 1));
        return std::nullopt;
    }

    /// "This costs one unit of energy" and "This decreases X by N" style
    /// sentences become "This action will increase [valueA] by [valueB]".
    std::optional<std::string> numeric_change(const std::string& s) {
        static const std::regex cost(R"(^(?:this|it)(?: action)? (?:costs|consumes|uses|requires) (\S+) units? of (.+)$)",
                                     std::regex::icase);
        static const std::regex head(R"(^(?:this|it)(?: action)?(?: will)? (.+)$)", std::regex::icase);
        static const std::regex clause(
            R"(^(increases?|decreases?|reduces?|raises?|lowers?|adds?) (.+) by (\S+)$)", std::regex::icase);
        std::smatch m;
        if (std::regex_match(s, m, cost)) {
            const std::string target = value_slot(m[2].str());
            const std::string amount = value_slot(m[1].str());
            return "This action will increase " + target + " by " + amount;
        }
        if (!std::regex_match(s, m, head)) return std::nullopt;
        std::string rest = m[1].str();
        std::vector<std::string> parts;
        std::size_t pos = 0;
        while (true) {
            std::size_t next = rest.find(" and ", pos);
            parts.push_back(rest.substr(pos, next == std::string::npos ? std::string::npos : next - pos));
            if (next == std::string::npos) break;
            pos = next + 5;
        }
        std::vector<std::string> rendered;
        for (const auto& p : parts) {
            std::smatch cm;
            if (!std::regex_match(p, cm, clause)) return std::nullopt;
            std::string verb = lower(cm[1].str());
            if (verb.back() == 's') verb.pop_back();
            if (verb == "reduce" || verb == "lower") verb = "decrease";
            if (verb == "raise" || verb == "add") verb = "increase";
            const std::string target = value_slot(cm[2].str());
            rendered.push_back(verb + " " + target + " by " + value_slot(cm[3].str()));
        }
        std::string out = "This action will";
        for (std::size_t i = 0; i < rendered.size(); ++i) out += (i ? " and " : " ") + rendered[i];
        return out;
    }

    std::string value_slot(std::string phrase) {
        if (is_placeholder(phrase)) return phrase;
        std::string key = lower(phrase);
        for (const char* det : {"the ", "its ", "a ", "an "}) {
            if (key.rfind(det, 0) == 0) key = key.substr(std::string_view(det).size());
        }
        return surface("value", key);
    }

    std::string rewrite(const std::string& sentence) {
        std::vector<std::string> toks;
        if (auto nc = numeric_change(sentence)) {
            toks = tokenize(*nc);
        } else {
            toks = tokenize(sentence);
        }
        std::vector<std::string> out;
        for (std::size_t i = 0; i < toks.size(); ++i) {
            const std::string& t = toks[i];
            const std::string lt = lower(t);
            if (is_placeholder(t) || !is_word(t)) {
                out.push_back(t);
                continue;
            }
            // "two positions", "the two positions", "both locations"
            {
                std::size_t j = i;
                if (lt == "the" && j + 1 < toks.size()) ++j;
                const std::string q = lower(toks[j]);
                if ((q == "two" || q == "both") && j + 1 < toks.size()) {
                    const std::string& n = toks[j + 1];
                    auto cls = noun_class(n);
                    if (cls && lower(n).back() == 's') {
                        while (counters_[*cls] < 2) {
                            last_[*cls] = fresh(*cls);
                        }
                        out.push_back("[" + *cls + "1]");
                        out.push_back("and");
                        out.push_back("[" + *cls + "2]");
                        i = j + 1;
                        continue;
                    }
                }
            }
            // Determiner phrase: DET MOD* NOUN
            if (kDeterminers.count(lt)) {
                std::size_t j = i + 1;
                bool fresh_mod = lt != "the" && lt != "this" && lt != "that";
                while (j < toks.size() && j - i <= 2 && kModifiers.count(lower(toks[j]))) {
                    const std::string m = lower(toks[j]);
                    if (m != "same") fresh_mod = true;
                    ++j;
                }
                if (j < toks.size()) {
                    if (auto cls = noun_class(toks[j])) {
                        std::string p;
                        auto last = last_.find(*cls);
                        if (!fresh_mod && last != last_.end()) {
                            p = last->second;
                        } else {
                            p = fresh(*cls);
                        }
                        last_[*cls] = p;
                        out.push_back(p);
                        i = j;
                        continue;
                    }
                }
            }
            // indexed object names such as position_1
            static const std::regex indexed(R"(^([A-Za-z]+)_\d+$)");
            std::smatch m;
            if (std::regex_match(t, m, indexed)) {
                const std::string word = lower(m[1].str());
                std::string cls = kLocationWords.count(word) ? "position" : "object";
                if (word == subject_) {
                    out.push_back(t);
                    continue;
                }
                std::string p = surface(cls, lt);
                last_[cls] = p;
                out.push_back(p);
                continue;
            }
            // copula + state adjective: "are connected", "is not occupied"
            if (kCopulas.count(lt)) {
                out.push_back(t);
                std::size_t j = i + 1;
                while (j < toks.size()) {
                    const std::string w = lower(toks[j]);
                    const bool adverb = w.size() > 3 && w.compare(w.size() - 2, 2, "ly") == 0;
                    if (w == "not" || w == "no" || w == "longer" || w == "already" || w == "still" || adverb) {
                        out.push_back(toks[j]);
                        ++j;
                    } else {
                        break;
                    }
                }
                if (j < toks.size() && is_alpha_word(toks[j])) {
                    const std::string w = lower(toks[j]);
                    const bool participle = w.size() > 3 && w.compare(w.size() - 2, 2, "ed") == 0;
                    if ((participle || kStateWords.count(w)) && !noun_class(w)) {
                        out.push_back(surface("state", w));
                        i = j;
                        continue;
                    }
                }
                i = j - 1;
                continue;
            }
            // quantities
            const bool digit = std::isdigit(static_cast<unsigned char>(t[0]));
            if (digit || kNumberWords.count(lt)) {
                out.push_back(surface("value", lt));
                continue;
            }
            // proper nouns mid-sentence
            if (i > 0 && std::isupper(static_cast<unsigned char>(t[0])) && lt != subject_ && t != "I") {
                out.push_back(surface("object", lt));
                continue;
            }
            // bare domain nouns
            if (auto cls = noun_class(t)) {
                std::string p = surface(*cls, lt);
                last_[*cls] = p;
                out.push_back(p);
                continue;
            }
            // verbs after "to" / "will"
            if (i > 0 && is_alpha_word(t) && !kNotVerbs.count(lt) && !kDeterminers.count(lt)) {
                const std::string prev = lower(toks[i - 1]);
                if (prev == "to" || prev == "will") lex_.add(lt);
            }
            out.push_back(t);
        }
        return join_tokens(out);
    }

    VerbLexicon lex_;
    std::set<std::string> vocab_;
    std::set<std::string> harvested_;
    std::string subject_;
    std::map<std::string, int> counters_;
    std::map<std::string, std::string> surface_;
    std::map<std::string, std::string> last_;
};

/// Placeholders a model answer may contain.
bool placeholders_well_formed(const std::string& text) {
    static const std::regex any(R"(\[[^\]]*\])");
    static const std::regex good(R"(\[(object|state|value|position)\d+\])");
    for (auto it = std::sregex_iterator(text.begin(), text.end(), any); it != std::sregex_iterator(); ++it) {
        if (!std::regex_match(it->str(), good)) return false;
    }
    return true;
}

std::string trim(std::string s) {
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

}  // namespace

AbstractionResult abstract_rule_based(std::string_view desc, const VerbLexicon& lex,
                                      const std::vector<std::string>& vocabulary) {
    if (trim(std::string(desc)).empty()) throw RetrievalError("cannot abstract an empty description");
    return RuleAbstractor(lex, vocabulary).run(desc);
}

AbstractionResult abstract_description(std::string_view desc, const VerbLexicon& lex,
                                       const std::vector<std::string>& vocabulary, LLMBackend* backend) {
    if (!backend) return abstract_rule_based(desc, lex, vocabulary);
    if (trim(std::string(desc)).empty()) throw RetrievalError("cannot abstract an empty description");

    std::string verbs;
    for (const auto& v : lex.verbs) verbs += (verbs.empty() ? "" : ", ") + v;
    std::vector<Message> msgs = {
        {"system", "You rewrite planning action descriptions into abstract templates."},
        {"user",
         "Rewrite the action description below. Replace concrete nouns, adjectives and numeric values with "
         "numbered placeholders of the forms [objectN], [stateN], [valueN] and [positionN]. Keep the acting "
         "subject and the verbs. Use the same placeholder for repeated mentions of the same thing. Drop example "
         "sentences and repeated sentences.\n"
         "Known verbs: " + (verbs.empty() ? std::string("(none yet)") : verbs) +
             "\nIf a verb in the description means the same as a known verb, use the known verb instead.\n\n"
             "Answer with exactly two lines:\nAbstraction: <rewritten text>\nVerbs: <comma-separated verbs used>\n\n"
             "Description:\n" + std::string(desc)}};

    AbstractionResult fallback_result;
    std::string why;
    try {
        const std::string reply = backend->complete(msgs, {});
        const auto a = reply.find("Abstraction:");
        const auto v = reply.find("Verbs:");
        if (a == std::string::npos || v == std::string::npos || v < a) {
            why = "abstraction reply lacks the Abstraction/Verbs lines";
        } else {
            std::string text = trim(reply.substr(a + 12, v - a - 12));
            if (text.empty() || !placeholders_well_formed(text)) {
                why = "abstraction reply has malformed placeholders";
            } else {
                AbstractionResult r{text, lex, {}};
                std::stringstream list(reply.substr(v + 6));
                std::string line;
                std::getline(list, line);
                std::stringstream items(line);
                std::string verb;
                while (std::getline(items, verb, ',')) {
                    verb = trim(verb);
                    if (!verb.empty()) r.lexicon.add(verb);
                }
                return r;
            }
        }
    } catch (const BackendError& e) {
        why = std::string("abstraction backend failed: ") + e.what();
    }
    AbstractionResult r = abstract_rule_based(desc, lex, vocabulary);
    r.warnings.push_back(why + "; used rule-based abstraction");
    return r;
}

}  // namespace pddlkit
