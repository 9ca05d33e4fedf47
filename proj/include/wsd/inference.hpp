#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wsd/corpus_io.hpp"
#include "wsd/model.hpp"
#include "wsd/pairgen.hpp"
#include "wsd/sense_inventory.hpp"

namespace wsd {

struct Prediction {
    std::string instance_id;
    SenseKey predicted;
    std::map<std::string, double> scores;  // sense key raw -> score
    bool backoff_used = false;
    // breakdown metadata carried from the instance
    Pos pos = Pos::Noun;
    std::string dataset;
};

struct EvalReport {
    std::map<std::string, double> per_dataset;  // name -> F1
    std::map<std::string, double> per_pos;      // Noun/Verb/Adj/Adv -> F1
    double overall = 0.0;
    std::size_t evaluated = 0;
    std::size_t answered = 0;
    std::size_t backoff_count = 0;
};

enum class ReportFormat { Text, Json, Markdown };

std::optional<ReportFormat> report_format_from_name(std::string_view name);

// Scores every candidate sense with the SAN head's positive-class probability
// and picks the argmax; ties go to the lowest sense_number. Lemmas absent from
// the inventory under the tagged POS back off to the first sense under any POS.
Prediction predict_instance(const TargetInstance& inst, const SenseInventory& inv,
                            const Model& model, const std::string& dataset = "",
                            const PairGenOptions& opts = {});

Prediction mfs_predict(const TargetInstance& inst, const SenseInventory& inv,
                       const std::string& dataset = "");

// F1 == accuracy under the always-answer policy; a prediction is correct when
// it matches any gold key.
EvalReport score_predictions(const std::vector<Prediction>& preds, const GoldKeyMap& gold);

std::string render_report(const EvalReport& report, ReportFormat format,
                          const std::string& system_name = "model");

// Table-1-shaped comparison: one row per (system name, report).
std::string render_table(const std::vector<std::pair<std::string, EvalReport>>& rows,
                         ReportFormat format);

EvalReport report_from_json(const std::string& text, const std::string& system_name);

// Framework answer format: "instance_id sense_key" per line.
void write_predictions(const std::vector<Prediction>& preds, const std::filesystem::path& path);

}  // namespace wsd
