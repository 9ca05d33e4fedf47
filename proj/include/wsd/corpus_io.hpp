#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wsd/pos.hpp"
#include "wsd/sense_inventory.hpp"

namespace wsd {

struct CorpusToken {
    std::string surface;
    std::string lemma;
    std::optional<Pos> pos;                // nullopt = Other (unannotatable)
    std::optional<std::string> instance_id;
};

struct CorpusSentence {
    std::string sentence_id;
    std::vector<CorpusToken> tokens;
};

using GoldKeyMap = std::map<std::string, std::vector<SenseKey>>;

enum class SplitName { Train, Dev, TestSE2, TestSE3, TestSE13, TestSE15, Other };

std::string split_label(SplitName name);

struct DatasetSplit {
    SplitName name = SplitName::Other;
    std::string label;  // display name, e.g. "SE07"
    std::vector<CorpusSentence> sentences;
    GoldKeyMap gold;
};

// One annotated occurrence to disambiguate.
struct TargetInstance {
    std::string instance_id;
    const CorpusSentence* sentence = nullptr;
    std::size_t token_index = 0;
    std::string lemma;
    Pos pos = Pos::Noun;
    std::vector<SenseKey> gold;  // empty on unlabeled data
};

// Evaluation-framework XML (corpus/text/sentence with wf+instance elements)
// plus a "instance_id key1 [key2 ...]" gold file.
DatasetSplit load_corpus(const std::filesystem::path& xml_path,
                         const std::filesystem::path& gold_path,
                         SplitName name, const std::string& label);

// One TargetInstance per annotated token, document order. Instances whose POS
// did not map to one of the four classes are skipped with a warning.
std::vector<TargetInstance> instances(const DatasetSplit& split);

}  // namespace wsd
