#include "wsd/pairgen.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "wsd/errors.hpp"
#include "wsd/log.hpp"

namespace wsd {

namespace {

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> toks;
    std::string t;
    while (in >> t) toks.push_back(t);
    return toks;
}

std::string join(const std::vector<std::string>& toks) {
    std::string out;
    for (const auto& t : toks) {
        if (!out.empty()) out += ' ';
        out += t;
    }
    return out;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string lemma_for_display(std::string lemma) {
    std::replace(lemma.begin(), lemma.end(), '_', ' ');
    return lemma;
}

}  // namespace

std::string render_context(const CorpusSentence& sentence, std::size_t token_index) {
    if (token_index >= sentence.tokens.size())
        throw WsdError("token index " + std::to_string(token_index) + " out of range in sentence " +
                       sentence.sentence_id);
    std::string out;
    for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
        if (!out.empty()) out += ' ';
        if (i == token_index)
            out += std::string(kTargetMarker) + " " + sentence.tokens[i].surface + " " +
                   kTargetMarker;
        else
            out += sentence.tokens[i].surface;
    }
    return out;
}

std::vector<GlossPair> generate_pairs(const TargetInstance& inst, const SenseInventory& inv,
                                      const PairGenOptions& opts) {
    const auto& cands = inv.candidates(inst.lemma, inst.pos);
    if (cands.empty())
        throw NoCandidatesError(inst.lemma, std::string(pos_name(inst.pos)));

    std::string context = render_context(*inst.sentence, inst.token_index);
    std::string prefix = lemma_for_display(inst.lemma);

    std::vector<GlossPair> pairs;
    pairs.reserve(cands.size());
    bool any_gold_hit = false;
    for (const auto& cand : cands) {
        GlossPair p;
        p.instance_id = inst.instance_id;
        p.sense_key = cand.key;
        p.sense_number = cand.sense_number;
        p.context = context;
        p.gloss = prefix + " : " + cand.entry.gloss;
        if (opts.mark_gloss_target)
            p.gloss = std::string(kTargetMarker) + " " + prefix + " " + kTargetMarker + " : " +
                      cand.entry.gloss;
        p.label = std::any_of(inst.gold.begin(), inst.gold.end(),
                              [&](const SenseKey& g) { return g.raw == cand.key.raw; })
                      ? 1
                      : 0;
        any_gold_hit = any_gold_hit || p.label == 1;
        pairs.push_back(std::move(p));
    }
    if (!inst.gold.empty() && !any_gold_hit)
        log_warn("GoldNotInInventory: instance " + inst.instance_id + " (lemma " + inst.lemma +
                 ") has no gold key among candidates; emitting all-negative pairs");
    return pairs;
}

std::string pair_to_json(const GlossPair& p) {
    nlohmann::ordered_json j;
    j["instance_id"] = p.instance_id;
    j["sense_key"] = p.sense_key.raw;
    j["sense_number"] = p.sense_number;
    j["context"] = p.context;
    j["gloss"] = p.gloss;
    j["label"] = p.label;
    return j.dump();
}

GlossPair pair_from_json(const std::string& line) {
    auto j = nlohmann::json::parse(line);
    GlossPair p;
    p.instance_id = j.at("instance_id").get<std::string>();
    p.sense_key = SenseKey::parse(j.at("sense_key").get<std::string>());
    p.sense_number = j.at("sense_number").get<int>();
    p.context = j.at("context").get<std::string>();
    p.gloss = j.at("gloss").get<std::string>();
    p.label = j.at("label").get<int>();
    return p;
}

std::size_t write_pairs(const std::vector<GlossPair>& pairs, const std::filesystem::path& out) {
    std::ofstream os(out);
    if (!os) throw IoError("cannot open " + out.string() + " for writing");
    for (const auto& p : pairs) os << pair_to_json(p) << "\n";
    if (!os) throw IoError("write failed: " + out.string());
    return pairs.size();
}

std::vector<GlossPair> read_pairs(const std::filesystem::path& in) {
    std::ifstream is(in);
    if (!is) throw IoError("cannot open " + in.string());
    std::vector<GlossPair> pairs;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        pairs.push_back(pair_from_json(line));
    }
    return pairs;
}

UnmarkedContext strip_markers(const std::string& marked_context) {
    auto toks = split_ws(marked_context);
    std::vector<std::size_t> marker_pos;
    for (std::size_t i = 0; i < toks.size(); ++i)
        if (toks[i] == kTargetMarker) marker_pos.push_back(i);
    if (marker_pos.size() != 2)
        throw WsdError("context does not contain exactly one marked span: " + marked_context);
    auto [open, close] = std::pair{marker_pos[0], marker_pos[1]};
    if (close <= open + 1) throw WsdError("empty marked span: " + marked_context);

    UnmarkedContext out;
    std::vector<std::string> plain;
    std::vector<std::string> target;
    for (std::size_t i = 0; i < toks.size(); ++i) {
        if (i == open || i == close) continue;
        if (i > open && i < close) {
            if (target.empty()) out.target_token_index = plain.size();
            target.push_back(toks[i]);
        }
        plain.push_back(toks[i]);
    }
    out.text = join(plain);
    out.target = join(target);
    return out;
}

std::string reinsert_marker(const std::string& plain_text, const std::string& target) {
    auto toks = split_ws(plain_text);
    auto tgt = split_ws(lower(target));
    if (tgt.empty()) throw WsdError("empty marker target");
    for (std::size_t i = 0; i + tgt.size() <= toks.size(); ++i) {
        bool match = true;
        for (std::size_t k = 0; k < tgt.size(); ++k)
            if (lower(toks[i + k]) != tgt[k]) { match = false; break; }
        if (match) {
            std::vector<std::string> out(toks.begin(), toks.begin() + i);
            out.push_back(kTargetMarker);
            out.insert(out.end(), toks.begin() + i, toks.begin() + i + tgt.size());
            out.push_back(kTargetMarker);
            out.insert(out.end(), toks.begin() + i + tgt.size(), toks.end());
            return join(out);
        }
    }
    throw WsdError("target '" + target + "' not found in: " + plain_text);
}

}  // namespace wsd
