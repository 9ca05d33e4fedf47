#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <regex>
#include <sstream>

#include "fixtures.hpp"
#include "wsd/corpus_io.hpp"
#include "wsd/errors.hpp"

using namespace wsd;
using namespace wsd::testing;

namespace {

const char* kSmallXml = R"(<?xml version="1.0" encoding="UTF-8" ?>
<corpus lang="en" source="unit">
<text id="d000">
<sentence id="d000.s000">
<wf lemma="the" pos="DET">The</wf>
<instance id="d000.s000.t000" lemma="bank" pos="NOUN">bank</instance>
<wf lemma="of" pos="ADP">of</wf>
<wf lemma="the" pos="DET">the</wf>
<wf lemma="river" pos="NOUN">river</wf>
</sentence>
<sentence id="d000.s001">
<instance id="d000.s001.t000" lemma="plan" pos="NOUN">plans</instance>
<wf lemma="change" pos="VERB">change</wf>
</sentence>
</text>
</corpus>
)";

const char* kSmallGold =
    "d000.s000.t000 bank%1:17:00::\n"
    "d000.s001.t000 plan%1:09:00::\n";

}  // namespace

TEST_CASE("basic corpus loads sentences, tokens, and gold keys") {
    TempDir dir("cio_basic");
    auto xml = write_file(dir.file("c.xml"), kSmallXml);
    auto gold = write_file(dir.file("c.gold.key.txt"), kSmallGold);
    auto split = load_corpus(xml, gold, SplitName::Dev, "");

    CHECK(split.label == "SE07");
    REQUIRE(split.sentences.size() == 2);
    REQUIRE(split.sentences[0].tokens.size() == 5);
    CHECK(split.sentences[0].sentence_id == "d000.s000");
    const auto& t1 = split.sentences[0].tokens[1];
    CHECK(t1.surface == "bank");
    CHECK(t1.lemma == "bank");
    CHECK(t1.pos == Pos::Noun);
    REQUIRE(t1.instance_id.has_value());
    CHECK(*t1.instance_id == "d000.s000.t000");
    CHECK_FALSE(split.sentences[0].tokens[0].instance_id.has_value());

    REQUIRE(split.gold.size() == 2);
    CHECK(split.gold.at("d000.s000.t000")[0].raw == "bank%1:17:00::");
}

TEST_CASE("instances come out in document order with gold attached") {
    TempDir dir("cio_inst");
    auto xml = write_file(dir.file("c.xml"), kSmallXml);
    auto gold = write_file(dir.file("c.gold.key.txt"), kSmallGold);
    auto split = load_corpus(xml, gold, SplitName::Dev, "");
    auto targets = instances(split);

    REQUIRE(targets.size() == 2);
    CHECK(targets[0].instance_id == "d000.s000.t000");
    CHECK(targets[0].token_index == 1);
    CHECK(targets[0].lemma == "bank");
    CHECK(targets[0].pos == Pos::Noun);
    REQUIRE(targets[0].gold.size() == 1);
    CHECK(targets[0].gold[0].lemma == "bank");
    CHECK(targets[1].instance_id == "d000.s001.t000");
    CHECK(targets[1].sentence == &split.sentences[1]);
    CHECK(targets[1].token_index == 0);
}

TEST_CASE("instance count matches a regex recount of the raw XML") {
    TempDir dir("cio_regex");
    // Build a randomized corpus, then count <instance ...> tags with a regex
    // as an implementation-independent oracle.
    std::mt19937_64 rng(11);
    std::ostringstream xml, gold;
    xml << "<corpus lang=\"en\" source=\"gen\">\n<text id=\"d0\">\n";
    int n_instances = 0;
    for (int s = 0; s < 25; ++s) {
        xml << "<sentence id=\"d0.s" << s << "\">\n";
        int toks = 1 + static_cast<int>(rng() % 6);
        for (int t = 0; t < toks; ++t) {
            if (rng() % 3 == 0) {
                std::string id = "d0.s" + std::to_string(s) + ".t" + std::to_string(t);
                xml << "<instance id=\"" << id << "\" lemma=\"bank\" pos=\"NOUN\">bank</instance>\n";
                gold << id << " bank%1:17:00::\n";
                ++n_instances;
            } else {
                xml << "<wf lemma=\"word\" pos=\"NOUN\">word</wf>\n";
            }
        }
        xml << "</sentence>\n";
    }
    xml << "</text>\n</corpus>\n";
    if (n_instances == 0) {  // ensure the gold file is non-trivial
        gold << "x y%1:17:00::\n";
    }

    std::string raw = xml.str();
    std::regex inst_re("<instance ");
    auto oracle = std::distance(std::sregex_iterator(raw.begin(), raw.end(), inst_re),
                                std::sregex_iterator());

    auto split = load_corpus(write_file(dir.file("g.xml"), raw),
                             write_file(dir.file("g.gold.key.txt"), gold.str()),
                             SplitName::TestSE2, "");
    CHECK(static_cast<long>(instances(split).size()) == oracle);
}

TEST_CASE("gold lines may carry several keys, duplicates removed") {
    TempDir dir("cio_multigold");
    auto xml = write_file(dir.file("c.xml"), kSmallXml);
    auto gold = write_file(dir.file("c.gold.key.txt"),
                           "d000.s000.t000 bank%1:17:00:: bank%1:14:00:: bank%1:17:00::\n"
                           "d000.s001.t000 plan%1:09:00::\n");
    auto split = load_corpus(xml, gold, SplitName::Dev, "");
    REQUIRE(split.gold.at("d000.s000.t000").size() == 2);
    CHECK(split.gold.at("d000.s000.t000")[0].raw == "bank%1:17:00::");
    CHECK(split.gold.at("d000.s000.t000")[1].raw == "bank%1:14:00::");
}

TEST_CASE("entities in surfaces and attributes are unescaped") {
    TempDir dir("cio_entities");
    auto xml = write_file(dir.file("c.xml"),
                          "<corpus><text id=\"d\"><sentence id=\"d.s0\">"
                          "<wf lemma=\"at&amp;t\" pos=\"NOUN\">AT&amp;T</wf>"
                          "<instance id=\"d.s0.t1\" lemma=\"bank\" pos=\"NOUN\">bank</instance>"
                          "</sentence></text></corpus>");
    auto gold = write_file(dir.file("c.gold.key.txt"), "d.s0.t1 bank%1:17:00::\n");
    auto split = load_corpus(xml, gold, SplitName::Other, "X");
    CHECK(split.label == "X");
    CHECK(split.sentences[0].tokens[0].surface == "AT&T");
    CHECK(split.sentences[0].tokens[0].lemma == "at&t");
}

TEST_CASE("instance without a gold entry is rejected") {
    TempDir dir("cio_missing_gold");
    auto xml = write_file(dir.file("c.xml"), kSmallXml);
    auto gold = write_file(dir.file("c.gold.key.txt"), "d000.s000.t000 bank%1:17:00::\n");
    CHECK_THROWS_AS(load_corpus(xml, gold, SplitName::Dev, ""), MissingGoldError);
    try {
        load_corpus(xml, gold, SplitName::Dev, "");
    } catch (const MissingGoldError& e) {
        CHECK(e.instance_id == "d000.s001.t000");
    }
}

TEST_CASE("gold line without keys is a parse error") {
    TempDir dir("cio_keyless");
    auto xml = write_file(dir.file("c.xml"), kSmallXml);
    auto gold = write_file(dir.file("c.gold.key.txt"),
                           "d000.s000.t000 bank%1:17:00::\n"
                           "d000.s001.t000\n");
    CHECK_THROWS_AS(load_corpus(xml, gold, SplitName::Dev, ""), MalformedLineError);
}

TEST_CASE("structural problems in the XML are reported") {
    TempDir dir("cio_structure");
    auto gold = write_file(dir.file("g.txt"), "i bank%1:17:00::\n");

    SUBCASE("wrong root") {
        auto xml = write_file(dir.file("a.xml"), "<root></root>");
        CHECK_THROWS_AS(load_corpus(xml, gold, SplitName::Dev, ""), XmlStructureError);
    }
    SUBCASE("instance without id") {
        auto xml = write_file(dir.file("b.xml"),
                              "<corpus><text id=\"d\"><sentence id=\"s\">"
                              "<instance lemma=\"bank\" pos=\"NOUN\">bank</instance>"
                              "</sentence></text></corpus>");
        CHECK_THROWS_AS(load_corpus(xml, gold, SplitName::Dev, ""), XmlStructureError);
    }
    SUBCASE("mismatched close tag") {
        auto xml = write_file(dir.file("c.xml"),
                              "<corpus><text id=\"d\"><sentence id=\"s\">"
                              "<wf lemma=\"a\" pos=\"NOUN\">a</instance>"
                              "</sentence></text></corpus>");
        CHECK_THROWS_AS(load_corpus(xml, gold, SplitName::Dev, ""), XmlStructureError);
    }
    SUBCASE("empty sentence") {
        auto xml = write_file(dir.file("d.xml"),
                              "<corpus><text id=\"d\"><sentence id=\"s\">"
                              "</sentence></text></corpus>");
        CHECK_THROWS_AS(load_corpus(xml, gold, SplitName::Dev, ""), XmlStructureError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_corpus(dir.file("none.xml"), gold, SplitName::Dev, ""), IoError);
    }
}

TEST_CASE("instances with unmappable pos tags are skipped, not fatal") {
    TempDir dir("cio_skip_pos");
    auto xml = write_file(dir.file("c.xml"),
                          "<corpus><text id=\"d\"><sentence id=\"s\">"
                          "<instance id=\"i0\" lemma=\"uh\" pos=\"INTJ\">uh</instance>"
                          "<instance id=\"i1\" lemma=\"bank\" pos=\"NOUN\">bank</instance>"
                          "</sentence></text></corpus>");
    auto gold = write_file(dir.file("c.gold.key.txt"),
                           "i0 uh%1:10:00::\ni1 bank%1:17:00::\n");
    auto split = load_corpus(xml, gold, SplitName::Dev, "");
    auto targets = instances(split);
    REQUIRE(targets.size() == 1);
    CHECK(targets[0].instance_id == "i1");
}

TEST_CASE("repeated surfaces become distinct instances with distinct indexes") {
    TempDir dir("cio_dupes");
    auto xml = write_file(dir.file("c.xml"),
                          "<corpus><text id=\"d\"><sentence id=\"s\">"
                          "<instance id=\"i0\" lemma=\"bank\" pos=\"NOUN\">bank</instance>"
                          "<wf lemma=\"to\" pos=\"ADP\">to</wf>"
                          "<instance id=\"i1\" lemma=\"bank\" pos=\"NOUN\">bank</instance>"
                          "</sentence></text></corpus>");
    auto gold = write_file(dir.file("c.gold.key.txt"),
                           "i0 bank%1:17:00::\ni1 bank%1:14:00::\n");
    auto targets = instances(load_corpus(xml, gold, SplitName::Dev, ""));
    REQUIRE(targets.size() == 2);
    CHECK(targets[0].token_index == 0);
    CHECK(targets[1].token_index == 2);
    CHECK(targets[0].gold[0].raw != targets[1].gold[0].raw);
}

TEST_CASE("surface whitespace is collapsed and pos tags are case-insensitive") {
    TempDir dir("cio_ws");
    auto xml = write_file(dir.file("c.xml"),
                          "<corpus><text id=\"d\"><sentence id=\"s\">"
                          "<instance id=\"i0\" lemma=\"new_york\" pos=\"noun\">New\n  York</instance>"
                          "</sentence></text></corpus>");
    auto gold = write_file(dir.file("c.gold.key.txt"), "i0 new_york%1:15:00::\n");
    auto split = load_corpus(xml, gold, SplitName::Dev, "");
    CHECK(split.sentences[0].tokens[0].surface == "New York");
    CHECK(split.sentences[0].tokens[0].pos == Pos::Noun);
}
