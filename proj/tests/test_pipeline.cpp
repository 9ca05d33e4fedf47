#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "fixtures.hpp"
#include "wsd/pairgen.hpp"

using namespace wsd;
using namespace wsd::testing;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::filesystem::path& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

CliResult run_cli(const std::string& args) {
    static int counter = 0;
    auto base = std::filesystem::temp_directory_path() /
                ("wsd_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    auto out = base.string() + ".out", err = base.string() + ".err";
    std::string cmd = std::string(WSD_CLI_PATH) + " " + args + " >" + out + " 2>" + err;
    int rc = std::system(cmd.c_str());
    CliResult res;
    res.exit_code = WEXITSTATUS(rc);
    res.out = slurp(out);
    res.err = slurp(err);
    std::filesystem::remove(out);
    std::filesystem::remove(err);
    return res;
}

std::string fixture_config() {
    return (std::filesystem::path(WSD_SOURCE_DIR) / "data" / "fixtures" / "config.json").string();
}

std::size_t line_count(const std::filesystem::path& p) {
    std::ifstream is(p);
    std::string line;
    std::size_t n = 0;
    while (std::getline(is, line))
        if (!line.empty()) ++n;
    return n;
}

}  // namespace

TEST_CASE("--help lists the pipeline stages and global options") {
    auto res = run_cli("--help");
    CHECK(res.exit_code == 0);
    for (const char* word : {"prepare", "augment", "pretrain", "finetune", "evaluate", "report",
                             "--config", "--output-dir", "--seed", "--n-augment",
                             "--report-format", "--mt-endpoint"})
        CHECK_MESSAGE(res.out.find(word) != std::string::npos, "missing: ", word);
}

TEST_CASE("missing config and bad input paths exit with the usage code") {
    CHECK(run_cli("prepare").exit_code != 0);  // --config is required

    TempDir dir("cli_badcfg");
    auto missing = run_cli("-c " + dir.file("absent.json").string() + " prepare");
    CHECK(missing.exit_code == 2);

    // config pointing at a nonexistent gold file names the path on stderr
    nlohmann::json cfg;
    auto fixtures = std::filesystem::path(WSD_SOURCE_DIR) / "data" / "fixtures";
    cfg["wordnet"] = {{"index_sense", (fixtures / "wordnet/index.sense").string()},
                      {"data_files", {(fixtures / "wordnet/data.noun").string(),
                                      (fixtures / "wordnet/data.verb").string()}}};
    cfg["corpora"] = {
        {"train", {{"xml", (fixtures / "corpora/semcor.xml").string()},
                   {"gold", (dir.path() / "no_such_gold.txt").string()}}},
        {"dev", {{"xml", (fixtures / "corpora/se07.xml").string()},
                 {"gold", (fixtures / "corpora/se07.gold.key.txt").string()}}}};
    cfg["output_dir"] = (dir.path() / "out").string();
    write_file(dir.file("cfg.json"), cfg.dump(2));
    auto res = run_cli("-c " + dir.file("cfg.json").string() + " prepare");
    CHECK(res.exit_code == 2);
    CHECK(res.err.find("no_such_gold.txt") != std::string::npos);
}

TEST_CASE("prepare writes pair files whose counts match an independent recount") {
    TempDir dir("cli_prepare");
    auto res = run_cli("-c " + fixture_config() + " --output-dir " + dir.path().string() +
                       " prepare");
    REQUIRE(res.exit_code == 0);
    CHECK(res.out.find("train pairs: 9 (2 positive, 7 negative, ratio 3.5:1)") !=
          std::string::npos);

    // brute-force recount: one pair per candidate sense per instance
    auto fixtures = std::filesystem::path(WSD_SOURCE_DIR) / "data" / "fixtures";
    auto inv = SenseInventory::load(fixtures / "wordnet/index.sense",
                                    {fixtures / "wordnet/data.noun", fixtures / "wordnet/data.verb"});
    auto train = load_corpus(fixtures / "corpora/semcor.xml",
                             fixtures / "corpora/semcor.gold.key.txt", SplitName::Train, "SemCor");
    std::size_t expected = 0;
    for (const auto& inst : instances(train))
        expected += inv.candidates(inst.lemma, inst.pos).size();
    CHECK(line_count(dir.file("pairs.train.jsonl")) == expected);
    CHECK(expected == 9);

    // every split got its pair file
    CHECK(std::filesystem::exists(dir.file("pairs.dev.jsonl")));
    CHECK(std::filesystem::exists(dir.file("pairs.test.SE2.jsonl")));
    CHECK(std::filesystem::exists(dir.file("pairs.test.SE3.jsonl")));
    CHECK(std::filesystem::exists(dir.file("config.snapshot.json")));

    // label sums match the gold annotations per file
    for (const auto& p : read_pairs(dir.file("pairs.train.jsonl")))
        CHECK((p.label == 0 || p.label == 1));
}

TEST_CASE("prepare output is byte-identical across reruns") {
    TempDir a("cli_rerun_a"), b("cli_rerun_b");
    REQUIRE(run_cli("-c " + fixture_config() + " --output-dir " + a.path().string() +
                    " prepare").exit_code == 0);
    REQUIRE(run_cli("-c " + fixture_config() + " --output-dir " + b.path().string() +
                    " prepare").exit_code == 0);
    for (const char* f : {"pairs.train.jsonl", "pairs.dev.jsonl", "pairs.test.SE2.jsonl",
                          "pairs.test.SE3.jsonl"})
        CHECK(slurp(a.file(f)) == slurp(b.file(f)));
}

TEST_CASE("the full pipeline runs end to end against a local translation server") {
    // deterministic mock MT: prepend the target language tag on each hop
    httplib::Server server;
    server.Post("/translate", [](const httplib::Request& req, httplib::Response& res) {
        auto j = nlohmann::json::parse(req.body);
        std::string text = j.at("tgt").get<std::string>() + " " + j.at("text").get<std::string>();
        res.set_content(nlohmann::json{{"text", text}}.dump(), "application/json");
    });
    int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread srv([&] { server.listen_after_bind(); });
    server.wait_until_ready();
    std::string endpoint = "http://127.0.0.1:" + std::to_string(port);

    TempDir dir("cli_full");
    std::string base = "-c " + fixture_config() + " --output-dir " + dir.path().string();

    REQUIRE(run_cli(base + " prepare").exit_code == 0);

    auto aug = run_cli(base + " --mt-endpoint " + endpoint + " augment");
    REQUIRE(aug.exit_code == 0);
    server.stop();
    srv.join();

    // both positive train instances gained paraphrases; markers survived
    auto pool = AugmentationPool::load(dir.file("pool.jsonl"));
    CHECK(pool.paraphrases.size() == 2);
    for (const auto& [id, list] : pool.paraphrases) {
        CHECK(list.size() == 3);  // one per configured route
        for (const auto& para : list)
            CHECK(para.find("\" ") != std::string::npos);
    }
    CHECK(line_count(dir.file("augment_audit.jsonl")) == 6);  // 2 positives x 3 routes

    auto pre = run_cli(base + " pretrain");
    REQUIRE(pre.exit_code == 0);
    CHECK(std::filesystem::exists(dir.file("ckpt.pretrain.json")));

    auto fin = run_cli(base + " finetune");
    REQUIRE(fin.exit_code == 0);
    CHECK(std::filesystem::exists(dir.file("ckpt.finetune.json")));

    auto eval = run_cli(base + " evaluate");
    REQUIRE(eval.exit_code == 0);
    CHECK(std::filesystem::exists(dir.file("report.json")));
    CHECK(std::filesystem::exists(dir.file("predictions.SE07.txt")));
    CHECK(std::filesystem::exists(dir.file("predictions.SE2.txt")));
    CHECK(std::filesystem::exists(dir.file("predictions.SE3.txt")));

    // the baseline row carries the known first-sense accuracy on the dev set
    std::istringstream table(eval.out);
    std::string line, mfs_row;
    while (std::getline(table, line))
        if (line.rfind("MFS Baseline", 0) == 0) mfs_row = line;
    REQUIRE_FALSE(mfs_row.empty());
    std::istringstream rs(mfs_row);
    std::vector<std::string> cells;
    std::string c;
    while (rs >> c) cells.push_back(c);
    REQUIRE(cells.size() == 12);   // "MFS" "Baseline" + 10 numeric columns
    CHECK(cells[2] == "75.0");     // SE07: 3 of 4 first-sense instances
    CHECK(cells[5] == "-");        // SE13 absent
    CHECK(cells[6] == "-");        // SE15 absent

    // report subcommand re-renders from the stored report
    auto rep = run_cli(base + " --report-format markdown report");
    REQUIRE(rep.exit_code == 0);
    CHECK(rep.out.find("| MFS Baseline |") != std::string::npos);

    // predictions files use the answer-key format with known instance ids
    auto preds = slurp(dir.file("predictions.SE07.txt"));
    CHECK(line_count(dir.file("predictions.SE07.txt")) == 4);
    CHECK(preds.find("%1:") != std::string::npos);
}

TEST_CASE("stages demand their upstream artifacts") {
    TempDir dir("cli_order");
    std::string base = "-c " + fixture_config() + " --output-dir " + dir.path().string();
    auto fin = run_cli(base + " finetune");
    CHECK(fin.exit_code == 2);
    CHECK(fin.err.find("missing required artifact") != std::string::npos);
    auto aug = run_cli(base + " augment");
    CHECK(aug.exit_code == 2);
    auto eval = run_cli(base + " evaluate");
    CHECK(eval.exit_code == 2);
}
