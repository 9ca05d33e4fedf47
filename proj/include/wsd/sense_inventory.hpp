#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wsd/pos.hpp"

namespace wsd {

// WordNet sense key, e.g. "cat%1:05:00::".
struct SenseKey {
    std::string raw;
    std::string lemma;      // lowercased, before '%'
    std::string lex_sense;  // after '%'

    static SenseKey parse(const std::string& raw);
    bool operator==(const SenseKey&) const = default;
};

struct SynsetEntry {
    std::uint32_t offset = 0;
    Pos pos = Pos::Noun;
    std::string gloss;  // definition only, examples stripped
    std::vector<std::string> lemmas;
};

struct SenseCandidate {
    SenseKey key;
    SynsetEntry entry;
    int sense_number = 0;
};

// Immutable after load; safe for concurrent readers.
class SenseInventory {
public:
    // index.sense plus any subset of data.{noun,verb,adj,adv}.
    static SenseInventory load(const std::filesystem::path& index_sense_path,
                               const std::vector<std::filesystem::path>& data_file_paths,
                               bool include_gloss_examples = false);

    // Ordered by sense_number ascending; empty when (lemma, pos) is unknown.
    // The lemma is normalized internally (lowercase, spaces -> underscores).
    const std::vector<SenseCandidate>& candidates(const std::string& lemma, Pos pos) const;

    std::optional<SenseKey> first_sense(const std::string& lemma, Pos pos) const;

    std::size_t sense_count() const { return sense_count_; }

    static std::string normalize_lemma(std::string lemma);

private:
    std::map<std::pair<std::string, Pos>, std::vector<SenseCandidate>> entries_;
    std::size_t sense_count_ = 0;
};

}  // namespace wsd
