#include "wsd/augmentation.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

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

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string normalize_ws(const std::string& s) {
    auto toks = split_ws(s);
    std::string out;
    for (const auto& t : toks) {
        if (!out.empty()) out += ' ';
        out += t;
    }
    return out;
}

}  // namespace

std::string_view reject_reason_name(RejectReason r) {
    switch (r) {
        case RejectReason::TargetAbsent: return "TargetAbsent";
        case RejectReason::TargetMultiple: return "TargetMultiple";
        case RejectReason::OriginalMultiple: return "OriginalMultiple";
        case RejectReason::Identical: return "Identical";
    }
    return "?";
}

TranslationRoute TranslationRoute::parse(const std::string& dash_separated) {
    TranslationRoute r;
    std::istringstream in(dash_separated);
    std::string hop;
    while (std::getline(in, hop, '-')) r.hops.push_back(hop);
    r.validate();
    return r;
}

std::string TranslationRoute::label() const {
    std::string out;
    for (const auto& h : hops) {
        if (!out.empty()) out += '-';
        out += h;
    }
    return out;
}

void TranslationRoute::validate() const {
    if (hops.size() < 3) throw InputError("route needs at least 3 hops: " + label());
    if (hops.front() != hops.back())
        throw InputError("route must start and end in the source language: " + label());
    for (std::size_t i = 1; i < hops.size(); ++i)
        if (hops[i] == hops[i - 1])
            throw InputError("route has equal consecutive hops: " + label());
    for (const auto& h : hops)
        if (h.empty()) throw InputError("route has an empty hop: " + label());
}

std::vector<TranslationRoute> default_routes() {
    return {TranslationRoute::parse("en-fr-en"), TranslationRoute::parse("en-de-en"),
            TranslationRoute::parse("en-es-en"), TranslationRoute::parse("en-es-en-fr-en")};
}

std::size_t count_occurrences(const std::string& text, const std::string& target) {
    auto toks = split_ws(lower(text));
    auto tgt = split_ws(lower(target));
    if (tgt.empty()) return 0;
    std::size_t count = 0;
    for (std::size_t i = 0; i + tgt.size() <= toks.size(); ++i) {
        bool match = true;
        for (std::size_t k = 0; k < tgt.size(); ++k)
            if (toks[i + k] != tgt[k]) { match = false; break; }
        if (match) ++count;
    }
    return count;
}

FilterDecision occurrence_filter(const std::string& original, const std::string& paraphrase,
                                 const std::string& target) {
    if (count_occurrences(original, target) != 1)
        return {false, RejectReason::OriginalMultiple};
    auto para_count = count_occurrences(paraphrase, target);
    if (para_count == 0) return {false, RejectReason::TargetAbsent};
    if (para_count > 1) return {false, RejectReason::TargetMultiple};
    if (normalize_ws(lower(paraphrase)) == normalize_ws(lower(original)))
        return {false, RejectReason::Identical};
    return {true, std::nullopt};
}

std::string back_translate(const std::string& text, const TranslationRoute& route,
                           MtClient& client) {
    route.validate();
    std::string cur = text;
    for (std::size_t i = 0; i + 1 < route.hops.size(); ++i)
        cur = client.translate(cur, route.hops[i], route.hops[i + 1]);
    return cur;
}

namespace {

nlohmann::ordered_json record_to_json(const AugmentationRecord& rec) {
    nlohmann::ordered_json j;
    j["source_instance_id"] = rec.source_instance_id;
    j["sense_key"] = rec.sense_key;
    j["route"] = rec.route.label();
    j["paraphrase"] = rec.paraphrase;
    j["accepted"] = rec.accepted;
    if (rec.reject_reason)
        j["reject_reason"] = std::string(reject_reason_name(*rec.reject_reason));
    return j;
}

}  // namespace

AugmentationPool build_pool(const std::vector<GlossPair>& positives,
                            const std::vector<TranslationRoute>& routes, MtClient& client,
                            const BuildPoolOptions& opts) {
    std::ofstream audit;
    if (!opts.audit_log_path.empty()) {
        audit.open(opts.audit_log_path);
        if (!audit) throw IoError("cannot open audit log " + opts.audit_log_path.string());
    }
    auto log_record = [&](const AugmentationRecord& rec) {
        if (audit.is_open()) audit << record_to_json(rec).dump() << "\n";
    };

    AugmentationPool pool;
    for (const auto& pair : positives) {
        if (pair.label != 1)
            throw WsdError("build_pool expects positive pairs only (instance " +
                           pair.instance_id + ")");
        UnmarkedContext ctx = strip_markers(pair.context);
        auto& accepted = pool.paraphrases[pair.instance_id];

        for (const auto& route : routes) {
            std::string paraphrase;
            bool ok = false;
            auto backoff = opts.backoff_start;
            for (int attempt = 1; attempt <= opts.max_attempts; ++attempt) {
                try {
                    paraphrase = back_translate(ctx.text, route, client);
                    ok = true;
                    break;
                } catch (const WsdError& e) {
                    log_warn("route " + route.label() + " attempt " + std::to_string(attempt) +
                             " failed for " + pair.instance_id + ": " + e.what());
                    if (attempt < opts.max_attempts) {
                        std::this_thread::sleep_for(backoff);
                        backoff *= 2;
                    }
                }
            }
            if (!ok) {
                AugmentationRecord rec{pair.instance_id, pair.sense_key.raw, route, "", false,
                                       std::nullopt};
                log_record(rec);
                log_warn("route " + route.label() + " skipped for " + pair.instance_id +
                         " after " + std::to_string(opts.max_attempts) + " attempts");
                continue;
            }

            AugmentationRecord rec{pair.instance_id, pair.sense_key.raw, route, paraphrase,
                                   false, std::nullopt};
            auto decision = occurrence_filter(ctx.text, paraphrase, ctx.target);
            rec.accepted = decision.accepted;
            rec.reject_reason = decision.reason;
            log_record(rec);
            if (!decision.accepted) continue;

            std::string marked = reinsert_marker(normalize_ws(paraphrase), ctx.target);
            if (marked == pair.context) continue;  // same after marking
            if (std::find(accepted.begin(), accepted.end(), marked) == accepted.end())
                accepted.push_back(marked);
        }
    }
    return pool;
}

void AugmentationPool::save(const std::filesystem::path& path) const {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    for (const auto& [id, list] : paraphrases) {
        nlohmann::ordered_json j;
        j["instance_id"] = id;
        j["paraphrases"] = list;
        os << j.dump() << "\n";
    }
}

AugmentationPool AugmentationPool::load(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path.string());
    AugmentationPool pool;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto j = nlohmann::json::parse(line);
        pool.paraphrases[j.at("instance_id").get<std::string>()] =
            j.at("paraphrases").get<std::vector<std::string>>();
    }
    return pool;
}

std::vector<std::string> sample_augmented(const AugmentationPool& pool,
                                          const std::string& instance_id, int n,
                                          std::uint64_t seed) {
    if (n <= 0) return {};
    auto it = pool.paraphrases.find(instance_id);
    if (it == pool.paraphrases.end()) return {};
    std::vector<std::string> items = it->second;

    // partial Fisher-Yates, explicit modulo draw for cross-platform determinism
    std::mt19937_64 rng(seed);
    std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(n), items.size());
    for (std::size_t i = 0; i < take; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng() % (items.size() - i));
        std::swap(items[i], items[j]);
    }
    items.resize(take);
    return items;
}

ImbalanceStats imbalance_stats(const std::vector<GlossPair>& pairs) {
    ImbalanceStats s;
    for (const auto& p : pairs)
        (p.label == 1 ? s.positives : s.negatives)++;
    if (s.positives == 0) {
        s.undefined = s.negatives > 0;
        s.ratio = 0.0;
    } else {
        s.ratio = static_cast<double>(s.negatives) / static_cast<double>(s.positives);
    }
    return s;
}

}  // namespace wsd
