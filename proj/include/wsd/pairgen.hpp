#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "wsd/corpus_io.hpp"
#include "wsd/sense_inventory.hpp"

namespace wsd {

// One (marked context, prefixed gloss) input pair for the pairwise classifier.
struct GlossPair {
    std::string instance_id;
    SenseKey sense_key;
    int sense_number = 0;
    std::string context;  // target wrapped in standalone '"' marker tokens
    std::string gloss;    // lemma + " : " + definition
    int label = 0;

    bool operator==(const GlossPair&) const = default;
};

struct PairGenOptions {
    bool mark_gloss_target = false;  // prefix-only by default
};

// Marker token wrapped around the target occurrence in context strings.
inline constexpr const char* kTargetMarker = "\"";

// Whitespace-joined surfaces with tokens[token_index] wrapped in markers.
std::string render_context(const CorpusSentence& sentence, std::size_t token_index);

// One pair per candidate sense, ordered by sense_number. Gold senses get
// label 1; if no gold key is among the candidates a warning is logged and all
// labels are 0. Throws NoCandidatesError when the inventory has no senses.
std::vector<GlossPair> generate_pairs(const TargetInstance& inst, const SenseInventory& inv,
                                      const PairGenOptions& opts = {});

// JSON-lines serialization: one object per line with fields
// instance_id, sense_key, sense_number, context, gloss, label.
std::size_t write_pairs(const std::vector<GlossPair>& pairs, const std::filesystem::path& out);
std::vector<GlossPair> read_pairs(const std::filesystem::path& in);

std::string pair_to_json(const GlossPair& p);
GlossPair pair_from_json(const std::string& line);

// Splits a marked context into (plain text, target surface). The marked
// occurrence must be unique, as produced by render_context.
struct UnmarkedContext {
    std::string text;
    std::string target;
    std::size_t target_token_index = 0;  // index in the unmarked token list
};
UnmarkedContext strip_markers(const std::string& marked_context);

// Wraps the single whole-token occurrence of target (case-insensitive).
std::string reinsert_marker(const std::string& plain_text, const std::string& target);

}  // namespace wsd
