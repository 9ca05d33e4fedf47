#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace wsd {

enum class Pos { Noun, Verb, Adj, Adv };

inline constexpr Pos kAllPos[] = {Pos::Noun, Pos::Verb, Pos::Adj, Pos::Adv};

inline std::string_view pos_name(Pos p) {
    switch (p) {
        case Pos::Noun: return "Noun";
        case Pos::Verb: return "Verb";
        case Pos::Adj: return "Adj";
        case Pos::Adv: return "Adv";
    }
    return "?";
}

// Corpus POS attribute -> Pos, case-insensitive. Unmappable values yield nullopt
// and the caller treats the token as unannotatable.
std::optional<Pos> pos_from_corpus_tag(std::string_view tag);

// WordNet ss_type character (n/v/a/s/r). Satellite adjectives fold into Adj.
std::optional<Pos> pos_from_ss_type(char ss);

// Sense-key ss_type digit (1..5), same folding.
std::optional<Pos> pos_from_ss_digit(char digit);

}  // namespace wsd
