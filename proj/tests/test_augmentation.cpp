#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "fixtures.hpp"
#include "wsd/augmentation.hpp"
#include "wsd/errors.hpp"

using namespace wsd;
using namespace wsd::testing;

namespace {

GlossPair positive_pair(const std::string& id, const std::string& context) {
    GlossPair p;
    p.instance_id = id;
    p.sense_key = SenseKey::parse("bank%1:17:00::");
    p.sense_number = 1;
    p.context = context;
    p.gloss = "bank : sloping land beside a body of water";
    p.label = 1;
    return p;
}

}  // namespace

TEST_CASE("route parsing and validation") {
    auto r = TranslationRoute::parse("en-fr-en");
    CHECK(r.hops == std::vector<std::string>{"en", "fr", "en"});
    CHECK(r.label() == "en-fr-en");
    CHECK(TranslationRoute::parse("en-es-en-fr-en").hops.size() == 5);

    CHECK_THROWS_AS(TranslationRoute::parse("en-fr"), InputError);     // too short
    CHECK_THROWS_AS(TranslationRoute::parse("en-fr-de"), InputError);  // open-ended
    CHECK_THROWS_AS(TranslationRoute::parse("en-en-en"), InputError);  // repeated hop
    CHECK_THROWS_AS(TranslationRoute::parse("en--en"), InputError);    // empty hop

    auto defaults = default_routes();
    CHECK(defaults.size() == 4);
    for (const auto& d : defaults) CHECK_NOTHROW(d.validate());
}

TEST_CASE("back_translate folds the client over consecutive hops") {
    ScriptedMt mt;
    mt.script("the bank flooded", "en", "fr", "la banque a deborde");
    mt.script("la banque a deborde", "fr", "en", "the bank overflowed");
    auto out = back_translate("the bank flooded", TranslationRoute::parse("en-fr-en"), mt);
    CHECK(out == "the bank overflowed");
    REQUIRE(mt.calls.size() == 2);
    CHECK(mt.calls[0].src == "en");
    CHECK(mt.calls[0].tgt == "fr");
    CHECK(mt.calls[1].src == "fr");
    CHECK(mt.calls[1].tgt == "en");
    CHECK(mt.calls[1].text == "la banque a deborde");
}

TEST_CASE("occurrence counting is whole-token and case-insensitive") {
    CHECK(count_occurrences("the bank flooded", "bank") == 1);
    CHECK(count_occurrences("The Bank and the bank", "bank") == 2);
    CHECK(count_occurrences("the riverbank flooded", "bank") == 0);  // substring is no match
    CHECK(count_occurrences("banks are banking", "bank") == 0);      // inflection is no match
    CHECK(count_occurrences("", "bank") == 0);
    CHECK(count_occurrences("bank", "") == 0);
    CHECK(count_occurrences("in New York near new york", "New York") == 2);
    CHECK(count_occurrences("york new", "new york") == 0);  // order matters
}

TEST_CASE("occurrence filter accepts exactly-once paraphrases only") {
    auto ok = occurrence_filter("the bank flooded", "the bank overflowed", "bank");
    CHECK(ok.accepted);
    CHECK_FALSE(ok.reason.has_value());

    auto absent = occurrence_filter("the bank flooded", "the shore overflowed", "bank");
    CHECK_FALSE(absent.accepted);
    CHECK(absent.reason == RejectReason::TargetAbsent);

    auto multi = occurrence_filter("the bank flooded", "bank by the bank", "bank");
    CHECK_FALSE(multi.accepted);
    CHECK(multi.reason == RejectReason::TargetMultiple);

    auto orig = occurrence_filter("bank near a bank", "one bank here", "bank");
    CHECK_FALSE(orig.accepted);
    CHECK(orig.reason == RejectReason::OriginalMultiple);

    auto same = occurrence_filter("the bank flooded", "The  Bank   flooded", "bank");
    CHECK_FALSE(same.accepted);
    CHECK(same.reason == RejectReason::Identical);
}

TEST_CASE("build_pool paraphrases positives over every route and re-marks the target") {
    ScriptedMt mt;
    mt.script("the bank flooded", "en", "fr", "F1");
    mt.script("F1", "fr", "en", "the bank overflowed");
    mt.script("the bank flooded", "en", "de", "D1");
    mt.script("D1", "de", "en", "floods hit the bank");
    mt.script("the bank flooded", "en", "es", "S1");
    mt.script("S1", "es", "en", "the shore flooded");  // target absent -> rejected

    TempDir dir("aug_pool");
    BuildPoolOptions opts;
    opts.backoff_start = std::chrono::milliseconds(0);
    opts.audit_log_path = dir.file("audit.jsonl");
    auto routes = {TranslationRoute::parse("en-fr-en"), TranslationRoute::parse("en-de-en"),
                   TranslationRoute::parse("en-es-en")};
    auto pool = build_pool({positive_pair("i0", "the \" bank \" flooded")}, routes, mt, opts);

    REQUIRE(pool.paraphrases.contains("i0"));
    CHECK(pool.paraphrases.at("i0") ==
          std::vector<std::string>{"the \" bank \" overflowed", "floods hit the \" bank \""});

    // audit log holds one record per route with accept/reject outcomes
    std::ifstream audit(dir.file("audit.jsonl"));
    std::vector<nlohmann::json> records;
    std::string line;
    while (std::getline(audit, line)) records.push_back(nlohmann::json::parse(line));
    REQUIRE(records.size() == 3);
    CHECK(records[0]["route"] == "en-fr-en");
    CHECK(records[0]["accepted"] == true);
    CHECK(records[2]["route"] == "en-es-en");
    CHECK(records[2]["accepted"] == false);
    CHECK(records[2]["reject_reason"] == "TargetAbsent");
}

TEST_CASE("build_pool rejects identical paraphrases and dedups equal ones") {
    ScriptedMt mt;  // identity fallback: every route echoes the input
    BuildPoolOptions opts;
    opts.backoff_start = std::chrono::milliseconds(0);
    auto pool = build_pool({positive_pair("i0", "the \" bank \" flooded")},
                           default_routes(), mt, opts);
    CHECK(pool.paraphrases.at("i0").empty());

    // two routes producing the same accepted paraphrase collapse to one entry
    ScriptedMt mt2;
    mt2.script("the bank flooded", "en", "fr", "X");
    mt2.script("X", "fr", "en", "the bank overflowed");
    mt2.script("the bank flooded", "en", "de", "Y");
    mt2.script("Y", "de", "en", "the bank overflowed");
    auto routes = {TranslationRoute::parse("en-fr-en"), TranslationRoute::parse("en-de-en")};
    auto pool2 = build_pool({positive_pair("i0", "the \" bank \" flooded")}, routes, mt2, opts);
    CHECK(pool2.paraphrases.at("i0") == std::vector<std::string>{"the \" bank \" overflowed"});
}

TEST_CASE("build_pool retries failing routes and then skips them") {
    ScriptedMt mt;
    mt.fail_on("en", "de");
    mt.script("the bank flooded", "en", "fr", "X");
    mt.script("X", "fr", "en", "the bank overflowed");

    TempDir dir("aug_fail");
    BuildPoolOptions opts;
    opts.max_attempts = 3;
    opts.backoff_start = std::chrono::milliseconds(0);
    opts.audit_log_path = dir.file("audit.jsonl");
    auto routes = {TranslationRoute::parse("en-de-en"), TranslationRoute::parse("en-fr-en")};
    auto pool = build_pool({positive_pair("i0", "the \" bank \" flooded")}, routes, mt, opts);

    // failing route retried max_attempts times, then the good route ran
    auto de_calls = std::count_if(mt.calls.begin(), mt.calls.end(),
                                  [](const ScriptedMt::Call& c) { return c.tgt == "de"; });
    CHECK(de_calls == 3);
    CHECK(pool.paraphrases.at("i0") == std::vector<std::string>{"the \" bank \" overflowed"});

    std::ifstream audit(dir.file("audit.jsonl"));
    std::string line;
    std::getline(audit, line);
    auto rec = nlohmann::json::parse(line);
    CHECK(rec["route"] == "en-de-en");
    CHECK(rec["accepted"] == false);
    CHECK(rec["paraphrase"] == "");
}

TEST_CASE("build_pool refuses negative pairs") {
    ScriptedMt mt;
    auto neg = positive_pair("i0", "the \" bank \" flooded");
    neg.label = 0;
    CHECK_THROWS_AS(build_pool({neg}, default_routes(), mt, {}), WsdError);
}

TEST_CASE("pool survives a save/load round trip") {
    TempDir dir("aug_io");
    AugmentationPool pool;
    pool.paraphrases["i0"] = {"the \" bank \" overflowed", "floods hit the \" bank \""};
    pool.paraphrases["i1"] = {};
    pool.save(dir.file("pool.jsonl"));
    auto loaded = AugmentationPool::load(dir.file("pool.jsonl"));
    CHECK(loaded.paraphrases == pool.paraphrases);
}

TEST_CASE("sampling is deterministic, without replacement, and clamps to pool size") {
    AugmentationPool pool;
    pool.paraphrases["i0"] = {"p0", "p1", "p2", "p3", "p4"};

    auto a = sample_augmented(pool, "i0", 3, 99);
    auto b = sample_augmented(pool, "i0", 3, 99);
    CHECK(a == b);
    CHECK(a.size() == 3);
    std::sort(a.begin(), a.end());
    CHECK(std::adjacent_find(a.begin(), a.end()) == a.end());  // no repeats

    auto c = sample_augmented(pool, "i0", 3, 100);
    CHECK(c.size() == 3);  // different seed may reorder but still 3 distinct

    CHECK(sample_augmented(pool, "i0", 10, 1).size() == 5);  // clamped
    CHECK(sample_augmented(pool, "i0", 0, 1).empty());
    CHECK(sample_augmented(pool, "missing", 3, 1).empty());

    // every element sampled comes from the pool
    for (const auto& s : sample_augmented(pool, "i0", 5, 7)) {
        CHECK(std::find(pool.paraphrases["i0"].begin(), pool.paraphrases["i0"].end(), s) !=
              pool.paraphrases["i0"].end());
    }
}

TEST_CASE("imbalance stats") {
    std::vector<GlossPair> pairs;
    auto add = [&](int label) {
        auto p = positive_pair("i" + std::to_string(pairs.size()), "a \" bank \" b");
        p.label = label;
        pairs.push_back(p);
    };

    add(1);
    for (int i = 0; i < 8; ++i) add(0);
    auto s = imbalance_stats(pairs);
    CHECK(s.positives == 1);
    CHECK(s.negatives == 8);
    CHECK(s.ratio == doctest::Approx(8.0));
    CHECK_FALSE(s.undefined);

    pairs.clear();
    add(1);
    add(1);
    for (int i = 0; i < 7; ++i) add(0);
    CHECK(imbalance_stats(pairs).ratio == doctest::Approx(3.5));

    pairs.clear();
    add(0);
    auto undef = imbalance_stats(pairs);
    CHECK(undef.undefined);

    pairs.clear();
    add(1);
    auto allpos = imbalance_stats(pairs);
    CHECK(allpos.ratio == 0.0);
    CHECK_FALSE(allpos.undefined);

    CHECK(imbalance_stats({}).positives == 0);
    CHECK_FALSE(imbalance_stats({}).undefined);
}

TEST_CASE("http client speaks the wire protocol against a local server") {
    httplib::Server server;
    std::atomic<int> hits{0};
    server.Post("/translate", [&](const httplib::Request& req, httplib::Response& res) {
        ++hits;
        auto j = nlohmann::json::parse(req.body);
        std::string text = j.at("text");
        if (j.at("src") == "en" && j.at("tgt") == "fr") text = "fr(" + text + ")";
        if (j.at("src") == "fr" && j.at("tgt") == "en") text = "the bank overflowed";
        res.set_content(nlohmann::json{{"text", text}}.dump(), "application/json");
    });
    server.Post("/badjson", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("not json", "text/plain");
    });

    int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread srv([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    auto client = make_http_mt_client("http://127.0.0.1:" + std::to_string(port));
    CHECK(client->translate("the bank flooded", "en", "fr") == "fr(the bank flooded)");

    auto out = back_translate("the bank flooded", TranslationRoute::parse("en-fr-en"), *client);
    CHECK(out == "the bank overflowed");
    CHECK(hits.load() == 3);

    server.stop();
    srv.join();

    // server gone: the client reports the hop as unavailable
    CHECK_THROWS_AS(client->translate("x", "en", "fr"), MtUnavailableError);
}
