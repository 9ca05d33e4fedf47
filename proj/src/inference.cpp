#include "wsd/inference.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "wsd/errors.hpp"

namespace wsd {

namespace {

const char* kDatasetColumns[] = {"SE07", "SE2", "SE3", "SE13", "SE15"};
const char* kPosColumns[] = {"Noun", "Verb", "Adj", "Adv"};

Prediction backoff_prediction(const TargetInstance& inst, const SenseInventory& inv,
                              const std::string& dataset) {
    for (Pos pos : kAllPos) {
        auto first = inv.first_sense(inst.lemma, pos);
        if (first) {
            Prediction p;
            p.instance_id = inst.instance_id;
            p.predicted = *first;
            p.backoff_used = true;
            p.pos = inst.pos;
            p.dataset = dataset;
            return p;
        }
    }
    throw NoPredictionPossibleError(inst.instance_id);
}

std::string format_f1(double f1) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(1) << f1;
    return os.str();
}

}  // namespace

std::optional<ReportFormat> report_format_from_name(std::string_view name) {
    if (name == "text") return ReportFormat::Text;
    if (name == "json") return ReportFormat::Json;
    if (name == "markdown") return ReportFormat::Markdown;
    return std::nullopt;
}

Prediction predict_instance(const TargetInstance& inst, const SenseInventory& inv,
                            const Model& model, const std::string& dataset,
                            const PairGenOptions& opts) {
    const auto& cands = inv.candidates(inst.lemma, inst.pos);
    if (cands.empty()) return backoff_prediction(inst, inv, dataset);

    auto pairs = generate_pairs(inst, inv, opts);
    Prediction pred;
    pred.instance_id = inst.instance_id;
    pred.pos = inst.pos;
    pred.dataset = dataset;

    double best = -1.0;
    for (const auto& pair : pairs) {
        Tape tape;
        auto enc = model.encoder().forward(
            tape, tokenize(pair.context, pair.gloss, model.vocab(),
                           model.encoder().config().max_len));
        auto out = model.heads().san_pairwise(tape, enc, std::nullopt);
        double score = out.probs.at(1);  // positive-class probability
        pred.scores[pair.sense_key.raw] = score;
        // pairs are ordered by sense_number, so strict > keeps the lowest on ties
        if (score > best) {
            best = score;
            pred.predicted = pair.sense_key;
        }
    }
    return pred;
}

Prediction mfs_predict(const TargetInstance& inst, const SenseInventory& inv,
                       const std::string& dataset) {
    auto first = inv.first_sense(inst.lemma, inst.pos);
    if (!first) return backoff_prediction(inst, inv, dataset);
    Prediction p;
    p.instance_id = inst.instance_id;
    p.predicted = *first;
    p.scores[first->raw] = 1.0;
    p.pos = inst.pos;
    p.dataset = dataset;
    return p;
}

EvalReport score_predictions(const std::vector<Prediction>& preds, const GoldKeyMap& gold) {
    struct Bucket {
        std::size_t total = 0;
        std::size_t correct = 0;
        double f1() const {
            return total == 0 ? 0.0 : 100.0 * static_cast<double>(correct) / total;
        }
    };
    Bucket all;
    std::map<std::string, Bucket> by_dataset, by_pos;

    for (const auto& pred : preds) {
        auto it = gold.find(pred.instance_id);
        if (it == gold.end())
            throw WsdError("UnknownInstance: " + pred.instance_id + " not in gold map");
        bool correct = std::any_of(it->second.begin(), it->second.end(),
                                   [&](const SenseKey& g) { return g.raw == pred.predicted.raw; });
        ++all.total;
        all.correct += correct;
        if (!pred.dataset.empty()) {
            auto& b = by_dataset[pred.dataset];
            ++b.total;
            b.correct += correct;
        }
        auto& bp = by_pos[std::string(pos_name(pred.pos))];
        ++bp.total;
        bp.correct += correct;
    }

    EvalReport report;
    report.evaluated = all.total;
    report.answered = all.total;  // always-answer policy
    report.overall = all.f1();
    for (const auto& [name, b] : by_dataset) report.per_dataset[name] = b.f1();
    for (const auto& [name, b] : by_pos) report.per_pos[name] = b.f1();
    report.backoff_count = static_cast<std::size_t>(
        std::count_if(preds.begin(), preds.end(),
                      [](const Prediction& p) { return p.backoff_used; }));
    return report;
}

namespace {

std::vector<std::string> report_cells(const EvalReport& r) {
    std::vector<std::string> cells;
    for (const char* ds : kDatasetColumns) {
        auto it = r.per_dataset.find(ds);
        cells.push_back(it == r.per_dataset.end() ? "-" : format_f1(it->second));
    }
    for (const char* pos : kPosColumns) {
        auto it = r.per_pos.find(pos);
        cells.push_back(it == r.per_pos.end() ? "-" : format_f1(it->second));
    }
    cells.push_back(r.evaluated == 0 ? "-" : format_f1(r.overall));
    return cells;
}

nlohmann::ordered_json report_to_json_obj(const EvalReport& r, const std::string& name) {
    nlohmann::ordered_json j;
    j["system"] = name;
    j["per_dataset"] = r.per_dataset;
    j["per_pos"] = r.per_pos;
    j["overall"] = r.overall;
    j["counts"] = {{"evaluated", r.evaluated},
                   {"answered", r.answered},
                   {"backoff", r.backoff_count}};
    return j;
}

}  // namespace

std::string render_table(const std::vector<std::pair<std::string, EvalReport>>& rows,
                         ReportFormat format) {
    std::vector<std::string> header = {"System"};
    for (const char* ds : kDatasetColumns) header.push_back(ds);
    for (const char* pos : kPosColumns) header.push_back(pos);
    header.push_back("All");

    if (format == ReportFormat::Json) {
        nlohmann::ordered_json j = nlohmann::ordered_json::array();
        for (const auto& [name, r] : rows) j.push_back(report_to_json_obj(r, name));
        return j.dump(2);
    }

    std::vector<std::vector<std::string>> table;
    table.push_back(header);
    for (const auto& [name, r] : rows) {
        std::vector<std::string> row = {name};
        auto cells = report_cells(r);
        row.insert(row.end(), cells.begin(), cells.end());
        table.push_back(row);
    }

    std::ostringstream os;
    if (format == ReportFormat::Markdown) {
        for (std::size_t ri = 0; ri < table.size(); ++ri) {
            os << "|";
            for (const auto& cell : table[ri]) os << " " << cell << " |";
            os << "\n";
            if (ri == 0) {
                os << "|";
                for (std::size_t c = 0; c < table[0].size(); ++c) os << " --- |";
                os << "\n";
            }
        }
        return os.str();
    }

    std::vector<std::size_t> widths(header.size(), 0);
    for (const auto& row : table)
        for (std::size_t c = 0; c < row.size(); ++c)
            widths[c] = std::max(widths[c], row[c].size());
    for (const auto& row : table) {
        for (std::size_t c = 0; c < row.size(); ++c)
            os << std::left << std::setw(static_cast<int>(widths[c]) + 2) << row[c];
        os << "\n";
    }
    return os.str();
}

std::string render_report(const EvalReport& report, ReportFormat format,
                          const std::string& system_name) {
    if (format == ReportFormat::Json) return report_to_json_obj(report, system_name).dump(2);
    return render_table({{system_name, report}}, format);
}

EvalReport report_from_json(const std::string& text, const std::string& system_name) {
    auto j = nlohmann::json::parse(text);
    if (j.is_array()) {
        for (const auto& row : j)
            if (row.at("system").get<std::string>() == system_name) {
                j = row;
                break;
            }
        if (j.is_array()) throw WsdError("system not found in report: " + system_name);
    }
    EvalReport r;
    r.per_dataset = j.at("per_dataset").get<std::map<std::string, double>>();
    r.per_pos = j.at("per_pos").get<std::map<std::string, double>>();
    r.overall = j.at("overall").get<double>();
    r.evaluated = j.at("counts").at("evaluated").get<std::size_t>();
    r.answered = j.at("counts").at("answered").get<std::size_t>();
    r.backoff_count = j.at("counts").at("backoff").get<std::size_t>();
    return r;
}

void write_predictions(const std::vector<Prediction>& preds, const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    for (const auto& p : preds) os << p.instance_id << " " << p.predicted.raw << "\n";
}

}  // namespace wsd
