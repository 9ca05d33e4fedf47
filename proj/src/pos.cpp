#include "wsd/pos.hpp"

#include <algorithm>
#include <cctype>

namespace wsd {

std::optional<Pos> pos_from_corpus_tag(std::string_view tag) {
    std::string up(tag);
    std::transform(up.begin(), up.end(), up.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (up == "NOUN") return Pos::Noun;
    if (up == "VERB") return Pos::Verb;
    if (up == "ADJ") return Pos::Adj;
    if (up == "ADV") return Pos::Adv;
    return std::nullopt;
}

std::optional<Pos> pos_from_ss_type(char ss) {
    switch (ss) {
        case 'n': return Pos::Noun;
        case 'v': return Pos::Verb;
        case 'a': return Pos::Adj;
        case 's': return Pos::Adj;  // satellite folds into Adj
        case 'r': return Pos::Adv;
    }
    return std::nullopt;
}

std::optional<Pos> pos_from_ss_digit(char digit) {
    switch (digit) {
        case '1': return Pos::Noun;
        case '2': return Pos::Verb;
        case '3': return Pos::Adj;
        case '5': return Pos::Adj;
        case '4': return Pos::Adv;
    }
    return std::nullopt;
}

}  // namespace wsd
