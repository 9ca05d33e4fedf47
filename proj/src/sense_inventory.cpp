#include "wsd/sense_inventory.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "wsd/errors.hpp"
#include "wsd/log.hpp"

namespace wsd {

namespace {

bool is_blank(const std::string& line) {
    return std::all_of(line.begin(), line.end(),
                       [](unsigned char c) { return std::isspace(c); });
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// Gloss field after '|': definition text, then zero or more quoted example
// sentences separated by ';'. We keep the part before the first quote and
// strip the trailing ';'.
std::string extract_definition(const std::string& gloss_field, bool include_examples) {
    std::string g = trim(gloss_field);
    if (include_examples) return g;
    auto q = g.find('"');
    if (q != std::string::npos) g = g.substr(0, q);
    g = trim(g);
    while (!g.empty() && g.back() == ';') {
        g.pop_back();
        g = trim(g);
    }
    return g;
}

struct DataRecord {
    SynsetEntry entry;
};

// One record of a data.pos file:
//   offset lex_filenum ss_type w_cnt word lex_id [word lex_id ...] p_cnt ... | gloss
DataRecord parse_data_line(const std::string& file, std::size_t line_no, const std::string& line) {
    auto bar = line.find('|');
    std::string head = bar == std::string::npos ? line : line.substr(0, bar);
    std::istringstream in(head);
    std::string offset_s, lex_filenum, ss_type, w_cnt_s;
    if (!(in >> offset_s >> lex_filenum >> ss_type >> w_cnt_s) || ss_type.size() != 1)
        throw MalformedLineError(file, line_no, "bad synset record header");
    auto pos = pos_from_ss_type(ss_type[0]);
    if (!pos) throw MalformedLineError(file, line_no, "unknown ss_type '" + ss_type + "'");

    DataRecord rec;
    try {
        rec.entry.offset = static_cast<std::uint32_t>(std::stoul(offset_s));
    } catch (const std::exception&) {
        throw MalformedLineError(file, line_no, "bad synset offset '" + offset_s + "'");
    }
    rec.entry.pos = *pos;

    int w_cnt = 0;
    try {
        w_cnt = static_cast<int>(std::stoul(w_cnt_s, nullptr, 16));  // two-digit hex
    } catch (const std::exception&) {
        throw MalformedLineError(file, line_no, "bad word count '" + w_cnt_s + "'");
    }
    if (w_cnt < 1) throw MalformedLineError(file, line_no, "synset with no words");
    for (int i = 0; i < w_cnt; ++i) {
        std::string word, lex_id;
        if (!(in >> word >> lex_id))
            throw MalformedLineError(file, line_no, "truncated word list");
        std::transform(word.begin(), word.end(), word.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        rec.entry.lemmas.push_back(word);
    }
    return rec;
}

}  // namespace

SenseKey SenseKey::parse(const std::string& raw) {
    auto pct = raw.find('%');
    if (pct == std::string::npos || pct == 0 || raw.find('%', pct + 1) != std::string::npos)
        throw InputError("bad sense key: " + raw);
    SenseKey k;
    k.raw = raw;
    k.lemma = raw.substr(0, pct);
    std::transform(k.lemma.begin(), k.lemma.end(), k.lemma.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    k.lex_sense = raw.substr(pct + 1);
    if (k.lex_sense.empty()) throw InputError("bad sense key: " + raw);
    return k;
}

std::string SenseInventory::normalize_lemma(std::string lemma) {
    std::transform(lemma.begin(), lemma.end(), lemma.begin(), [](unsigned char c) {
        return c == ' ' ? '_' : static_cast<char>(std::tolower(c));
    });
    return lemma;
}

SenseInventory SenseInventory::load(const std::filesystem::path& index_sense_path,
                                    const std::vector<std::filesystem::path>& data_file_paths,
                                    bool include_gloss_examples) {
    // (pos, offset) -> entry, from the data files
    std::map<std::pair<Pos, std::uint32_t>, SynsetEntry> synsets;
    for (const auto& path : data_file_paths) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open " + path.string());
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (is_blank(line)) continue;
            if (line.rfind("  ", 0) == 0) continue;  // license header
            auto rec = parse_data_line(path.string(), line_no, line);
            auto bar = line.find('|');
            rec.entry.gloss = bar == std::string::npos
                                  ? ""
                                  : extract_definition(line.substr(bar + 1), include_gloss_examples);
            if (rec.entry.gloss.empty())
                throw MalformedLineError(path.string(), line_no, "synset without gloss definition");
            synsets[{rec.entry.pos, rec.entry.offset}] = std::move(rec.entry);
        }
    }

    SenseInventory inv;
    std::ifstream in(index_sense_path);
    if (!in) throw IoError("cannot open " + index_sense_path.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        std::istringstream ls(line);
        std::string key_s, offset_s;
        int sense_number = 0, tag_cnt = 0;
        if (!(ls >> key_s >> offset_s >> sense_number >> tag_cnt) || sense_number < 1)
            throw MalformedLineError(index_sense_path.string(), line_no, "bad index.sense line");
        SenseKey key;
        try {
            key = SenseKey::parse(key_s);
        } catch (const InputError& e) {
            throw MalformedLineError(index_sense_path.string(), line_no, e.what());
        }
        auto pos = pos_from_ss_digit(key.lex_sense.empty() ? '?' : key.lex_sense[0]);
        if (!pos)
            throw MalformedLineError(index_sense_path.string(), line_no,
                                     "bad ss_type in key " + key_s);
        std::uint32_t offset = 0;
        try {
            offset = static_cast<std::uint32_t>(std::stoul(offset_s));
        } catch (const std::exception&) {
            throw MalformedLineError(index_sense_path.string(), line_no, "bad offset " + offset_s);
        }
        auto it = synsets.find({*pos, offset});
        if (it == synsets.end()) throw DanglingKeyError(key_s);
        inv.entries_[{key.lemma, *pos}].push_back(
            SenseCandidate{std::move(key), it->second, sense_number});
        ++inv.sense_count_;
    }

    for (auto& [lp, list] : inv.entries_) {
        std::sort(list.begin(), list.end(),
                  [](const SenseCandidate& a, const SenseCandidate& b) {
                      return a.sense_number < b.sense_number;
                  });
        for (std::size_t i = 1; i < list.size(); ++i) {
            if (list[i].sense_number == list[i - 1].sense_number)
                log_warn("duplicate sense_number " + std::to_string(list[i].sense_number) +
                         " for lemma " + lp.first);
        }
    }
    return inv;
}

const std::vector<SenseCandidate>& SenseInventory::candidates(const std::string& lemma,
                                                              Pos pos) const {
    static const std::vector<SenseCandidate> kEmpty;
    auto it = entries_.find({normalize_lemma(lemma), pos});
    return it == entries_.end() ? kEmpty : it->second;
}

std::optional<SenseKey> SenseInventory::first_sense(const std::string& lemma, Pos pos) const {
    const auto& c = candidates(lemma, pos);
    if (c.empty()) return std::nullopt;
    return c.front().key;
}

}  // namespace wsd
