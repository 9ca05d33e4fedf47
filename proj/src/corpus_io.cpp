#include "wsd/corpus_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "wsd/errors.hpp"
#include "wsd/log.hpp"

namespace wsd {

std::string split_label(SplitName name) {
    switch (name) {
        case SplitName::Train: return "SemCor";
        case SplitName::Dev: return "SE07";
        case SplitName::TestSE2: return "SE2";
        case SplitName::TestSE3: return "SE3";
        case SplitName::TestSE13: return "SE13";
        case SplitName::TestSE15: return "SE15";
        case SplitName::Other: return "Other";
    }
    return "?";
}

namespace {

std::string unescape_entities(const std::string& s, const std::string& where) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size();) {
        if (s[i] != '&') {
            out += s[i++];
            continue;
        }
        auto semi = s.find(';', i);
        if (semi == std::string::npos) throw XmlStructureError("unterminated entity", where);
        std::string ent = s.substr(i + 1, semi - i - 1);
        if (ent == "amp") out += '&';
        else if (ent == "lt") out += '<';
        else if (ent == "gt") out += '>';
        else if (ent == "apos") out += '\'';
        else if (ent == "quot") out += '"';
        else throw XmlStructureError("unknown entity &" + ent + ";", where);
        i = semi + 1;
    }
    return out;
}

// Just enough XML for the evaluation-framework corpus files: start/end/empty
// tags with double-quoted attributes, text content, no CDATA or comments
// inside sentences.
struct XmlCursor {
    const std::string& text;
    std::size_t pos = 0;
    std::string file;

    std::string loc() const { return file + " offset " + std::to_string(pos); }

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool at_tag() {
        skip_ws();
        return pos < text.size() && text[pos] == '<';
    }

    struct Tag {
        std::string name;
        std::map<std::string, std::string> attrs;
        bool closing = false;
        bool self_closing = false;
        bool decl = false;  // <?xml ...?> or <!...>
    };

    Tag read_tag() {
        skip_ws();
        if (pos >= text.size() || text[pos] != '<')
            throw XmlStructureError("expected tag", loc());
        auto end = text.find('>', pos);
        if (end == std::string::npos) throw XmlStructureError("unterminated tag", loc());
        std::string inner = text.substr(pos + 1, end - pos - 1);
        pos = end + 1;

        Tag tag;
        if (!inner.empty() && (inner[0] == '?' || inner[0] == '!')) {
            tag.decl = true;
            return tag;
        }
        if (!inner.empty() && inner[0] == '/') {
            tag.closing = true;
            inner = inner.substr(1);
        }
        if (!inner.empty() && inner.back() == '/') {
            tag.self_closing = true;
            inner.pop_back();
        }
        std::size_t i = 0;
        while (i < inner.size() && !std::isspace(static_cast<unsigned char>(inner[i]))) ++i;
        tag.name = inner.substr(0, i);
        if (tag.name.empty()) throw XmlStructureError("empty tag name", loc());
        while (i < inner.size()) {
            while (i < inner.size() && std::isspace(static_cast<unsigned char>(inner[i]))) ++i;
            if (i >= inner.size()) break;
            auto eq = inner.find('=', i);
            if (eq == std::string::npos) throw XmlStructureError("bad attribute", loc());
            std::string key = inner.substr(i, eq - i);
            auto q1 = inner.find('"', eq);
            if (q1 == std::string::npos) throw XmlStructureError("bad attribute value", loc());
            auto q2 = inner.find('"', q1 + 1);
            if (q2 == std::string::npos) throw XmlStructureError("bad attribute value", loc());
            tag.attrs[key] = unescape_entities(inner.substr(q1 + 1, q2 - q1 - 1), loc());
            i = q2 + 1;
        }
        return tag;
    }

    std::string read_text() {
        auto lt = text.find('<', pos);
        if (lt == std::string::npos) throw XmlStructureError("unterminated element text", loc());
        std::string raw = text.substr(pos, lt - pos);
        pos = lt;
        return unescape_entities(raw, loc());
    }
};

std::string require_attr(const XmlCursor::Tag& tag, const std::string& key,
                         const std::string& loc) {
    auto it = tag.attrs.find(key);
    if (it == tag.attrs.end())
        throw XmlStructureError("<" + tag.name + "> missing attribute '" + key + "'", loc);
    return it->second;
}

CorpusToken read_token_element(XmlCursor& cur, const XmlCursor::Tag& open) {
    CorpusToken tok;
    tok.lemma = require_attr(open, "lemma", cur.loc());
    auto pos_attr = open.attrs.find("pos");
    if (pos_attr != open.attrs.end()) tok.pos = pos_from_corpus_tag(pos_attr->second);
    if (open.name == "instance") tok.instance_id = require_attr(open, "id", cur.loc());
    tok.surface = cur.read_text();
    auto close = cur.read_tag();
    if (!close.closing || close.name != open.name)
        throw XmlStructureError("expected </" + open.name + ">", cur.loc());
    // collapse internal whitespace in the surface form
    std::istringstream ss(tok.surface);
    std::string w, joined;
    while (ss >> w) {
        if (!joined.empty()) joined += ' ';
        joined += w;
    }
    tok.surface = joined;
    if (tok.surface.empty()) throw XmlStructureError("empty token surface", cur.loc());
    return tok;
}

GoldKeyMap load_gold(const std::filesystem::path& gold_path) {
    std::ifstream in(gold_path);
    if (!in) throw IoError("cannot open " + gold_path.string());
    GoldKeyMap gold;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        std::string id;
        ls >> id;
        std::vector<SenseKey> keys;
        std::string key_s;
        while (ls >> key_s) {
            SenseKey key = SenseKey::parse(key_s);
            if (std::none_of(keys.begin(), keys.end(),
                             [&](const SenseKey& k) { return k.raw == key.raw; }))
                keys.push_back(std::move(key));
        }
        if (keys.empty())
            throw MalformedLineError(gold_path.string(), line_no, "gold line without keys");
        gold[id] = std::move(keys);
    }
    return gold;
}

}  // namespace

DatasetSplit load_corpus(const std::filesystem::path& xml_path,
                         const std::filesystem::path& gold_path,
                         SplitName name, const std::string& label) {
    std::ifstream in(xml_path);
    if (!in) throw IoError("cannot open " + xml_path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    std::string content = buf.str();

    DatasetSplit split;
    split.name = name;
    split.label = label.empty() ? split_label(name) : label;
    split.gold = load_gold(gold_path);

    XmlCursor cur{content, 0, xml_path.string()};
    // corpus -> text* -> sentence* -> (wf | instance)*
    XmlCursor::Tag tag = cur.read_tag();
    while (tag.decl) tag = cur.read_tag();
    if (tag.name != "corpus" || tag.closing)
        throw XmlStructureError("expected <corpus> root", cur.loc());

    while (true) {
        tag = cur.read_tag();
        if (tag.closing && tag.name == "corpus") break;
        if (tag.name != "text" || tag.closing)
            throw XmlStructureError("expected <text> under <corpus>", cur.loc());
        while (true) {
            tag = cur.read_tag();
            if (tag.closing && tag.name == "text") break;
            if (tag.name != "sentence" || tag.closing)
                throw XmlStructureError("expected <sentence> under <text>", cur.loc());
            CorpusSentence sent;
            sent.sentence_id = require_attr(tag, "id", cur.loc());
            while (true) {
                if (cur.at_tag()) {
                    auto child = cur.read_tag();
                    if (child.closing && child.name == "sentence") break;
                    if (child.closing || child.self_closing ||
                        (child.name != "wf" && child.name != "instance"))
                        throw XmlStructureError("expected <wf> or <instance>", cur.loc());
                    sent.tokens.push_back(read_token_element(cur, child));
                } else {
                    throw XmlStructureError("stray text in <sentence>", cur.loc());
                }
            }
            if (sent.tokens.empty())
                throw XmlStructureError("sentence " + sent.sentence_id + " has no tokens",
                                        cur.loc());
            split.sentences.push_back(std::move(sent));
        }
    }

    for (const auto& sent : split.sentences)
        for (const auto& tok : sent.tokens)
            if (tok.instance_id && !split.gold.contains(*tok.instance_id))
                throw MissingGoldError(*tok.instance_id);

    return split;
}

std::vector<TargetInstance> instances(const DatasetSplit& split) {
    std::vector<TargetInstance> out;
    for (const auto& sent : split.sentences) {
        for (std::size_t i = 0; i < sent.tokens.size(); ++i) {
            const auto& tok = sent.tokens[i];
            if (!tok.instance_id) continue;
            if (!tok.pos) {
                log_warn("skipping instance " + *tok.instance_id + " with unmappable POS");
                continue;
            }
            TargetInstance inst;
            inst.instance_id = *tok.instance_id;
            inst.sentence = &sent;
            inst.token_index = i;
            inst.lemma = tok.lemma;
            inst.pos = *tok.pos;
            if (auto it = split.gold.find(inst.instance_id); it != split.gold.end())
                inst.gold = it->second;
            out.push_back(std::move(inst));
        }
    }
    return out;
}

}  // namespace wsd
