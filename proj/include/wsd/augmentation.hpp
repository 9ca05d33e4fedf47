#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wsd/pairgen.hpp"

namespace wsd {

// Translation backend. The production implementation speaks the HTTP wire
// protocol; tests substitute scripted clients.
class MtClient {
public:
    virtual ~MtClient() = default;
    // Throws MtUnavailableError / MtMalformedResponseError.
    virtual std::string translate(const std::string& text, const std::string& src,
                                  const std::string& tgt) = 0;
};

// POST /translate {"text":..., "src":..., "tgt":...} -> {"text":...}
std::unique_ptr<MtClient> make_http_mt_client(const std::string& endpoint);

// Pivot chain beginning and ending with the source language, e.g. en-fr-en.
struct TranslationRoute {
    std::vector<std::string> hops;

    static TranslationRoute parse(const std::string& dash_separated);  // "en-fr-en"
    std::string label() const;
    void validate() const;  // length >= 3, first == last, no equal consecutive hops
};

enum class RejectReason { TargetAbsent, TargetMultiple, OriginalMultiple, Identical };

std::string_view reject_reason_name(RejectReason r);

struct AugmentationRecord {
    std::string source_instance_id;
    std::string sense_key;  // the positive pair's key, for auditability
    TranslationRoute route;
    std::string paraphrase;  // plain text, unmarked
    bool accepted = false;
    std::optional<RejectReason> reject_reason;
};

// instance_id -> accepted paraphrases with markers re-inserted.
struct AugmentationPool {
    std::map<std::string, std::vector<std::string>> paraphrases;

    void save(const std::filesystem::path& path) const;
    static AugmentationPool load(const std::filesystem::path& path);
};

// Whole-token, case-insensitive occurrence count of target in text.
std::size_t count_occurrences(const std::string& text, const std::string& target);

struct FilterDecision {
    bool accepted = false;
    std::optional<RejectReason> reason;
};

// Accept iff target occurs exactly once in both original and paraphrase;
// paraphrases identical to the original (after whitespace normalization)
// are rejected as oversampling in disguise.
FilterDecision occurrence_filter(const std::string& original, const std::string& paraphrase,
                                 const std::string& target);

// Fold client.translate over consecutive hops.
std::string back_translate(const std::string& text, const TranslationRoute& route,
                           MtClient& client);

struct BuildPoolOptions {
    int max_attempts = 3;
    std::chrono::milliseconds backoff_start{1000};  // doubles per retry
    std::filesystem::path audit_log_path;           // empty = no audit file
};

// Back-translate every positive pair's context over every route, filter,
// dedup, and collect. All records (accepted and rejected) go to the audit log.
AugmentationPool build_pool(const std::vector<GlossPair>& positives,
                            const std::vector<TranslationRoute>& routes, MtClient& client,
                            const BuildPoolOptions& opts = {});

// min(n, pool size) paraphrases, uniform without replacement, seeded.
std::vector<std::string> sample_augmented(const AugmentationPool& pool,
                                          const std::string& instance_id, int n,
                                          std::uint64_t seed);

struct ImbalanceStats {
    std::size_t positives = 0;
    std::size_t negatives = 0;
    double ratio = 0.0;  // negatives / positives
    bool undefined = false;  // positives == 0 with negatives present
};

ImbalanceStats imbalance_stats(const std::vector<GlossPair>& pairs);

// Default high-resource route set.
std::vector<TranslationRoute> default_routes();

}  // namespace wsd
