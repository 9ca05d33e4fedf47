#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "wsd/augmentation.hpp"
#include "wsd/corpus_io.hpp"
#include "wsd/errors.hpp"
#include "wsd/sense_inventory.hpp"

namespace wsd::testing {

// Fresh directory under the system temp root, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::mt19937_64 rng(std::random_device{}());
        path_ = std::filesystem::temp_directory_path() /
                ("wsd_" + tag + "_" + std::to_string(rng()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path file(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline std::filesystem::path write_file(const std::filesystem::path& path,
                                        const std::string& content) {
    std::ofstream os(path);
    os << content;
    return path;
}

// Two noun senses of "bank" plus a monosemous "plan"; enough for most tests.
struct MiniWordNet {
    std::filesystem::path index_sense;
    std::filesystem::path data_noun;

    static MiniWordNet write(const TempDir& dir) {
        MiniWordNet wn;
        wn.data_noun = write_file(
            dir.file("data.noun"),
            "  1 header line\n"
            "00001740 17 n 01 bank 0 000 | sloping land beside a body of water; "
            "\"they pulled the canoe up on the bank\"\n"
            "00001850 14 n 01 bank 0 000 | a financial institution that accepts deposits\n"
            "00002200 09 n 01 plan 0 000 | a series of steps to be carried out\n");
        wn.index_sense = write_file(dir.file("index.sense"),
                                    "bank%1:14:00:: 00001850 2 10\n"
                                    "bank%1:17:00:: 00001740 1 20\n"
                                    "plan%1:09:00:: 00002200 1 4\n");
        return wn;
    }

    SenseInventory load() const { return SenseInventory::load(index_sense, {data_noun}); }
};

inline CorpusSentence make_sentence(const std::string& id,
                                    const std::vector<std::string>& surfaces) {
    CorpusSentence s;
    s.sentence_id = id;
    for (const auto& w : surfaces) s.tokens.push_back({w, w, Pos::Noun, std::nullopt});
    return s;
}

// Scripted MT client: exact (text, src, tgt) -> reply table, identity fallback.
class ScriptedMt : public MtClient {
public:
    void script(const std::string& text, const std::string& src, const std::string& tgt,
                const std::string& reply) {
        table_[key(text, src, tgt)] = reply;
    }
    void fail_on(const std::string& src, const std::string& tgt) {
        failing_.insert(src + ">" + tgt);
    }

    std::string translate(const std::string& text, const std::string& src,
                          const std::string& tgt) override {
        calls.push_back({text, src, tgt});
        if (failing_.contains(src + ">" + tgt))
            throw MtUnavailableError(src + "->" + tgt, "scripted failure");
        auto it = table_.find(key(text, src, tgt));
        return it == table_.end() ? text : it->second;
    }

    struct Call {
        std::string text, src, tgt;
    };
    std::vector<Call> calls;

private:
    static std::string key(const std::string& text, const std::string& src,
                           const std::string& tgt) {
        return src + ">" + tgt + ">" + text;
    }
    std::map<std::string, std::string> table_;
    std::set<std::string> failing_;
};

}  // namespace wsd::testing
