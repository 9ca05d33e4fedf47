#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "wsd/errors.hpp"
#include "wsd/log.hpp"
#include "wsd/pipeline.hpp"

namespace {

struct Overrides {
    std::string output_dir;
    std::string report_format;
    std::string mt_endpoint;
    long seed = -1;
    int n_augment = -1;
    int pretrain_epochs = -1;
    int finetune_epochs = -1;
    int batch_size = -1;
    double lr = -1.0;

    void apply(wsd::PipelineConfig& config) const {
        if (!output_dir.empty()) config.output_dir = output_dir;
        if (!report_format.empty()) config.report_format = report_format;
        if (!mt_endpoint.empty()) config.mt_endpoint = mt_endpoint;
        if (seed >= 0) {
            config.train.seed = static_cast<std::uint64_t>(seed);
            config.encoder.seed = static_cast<std::uint64_t>(seed);
        }
        if (n_augment >= 0) config.train.n_augment = n_augment;
        if (pretrain_epochs >= 0) config.train.pretrain_epochs = pretrain_epochs;
        if (finetune_epochs >= 0) config.train.finetune_epochs = finetune_epochs;
        if (batch_size > 0) config.train.batch_size = batch_size;
        if (lr > 0.0) config.train.lr = lr;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gloss-pair word sense disambiguation pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    Overrides ovr;
    app.add_option("-c,--config", config_path, "Pipeline config file (JSON)")->required();
    app.add_option("--output-dir", ovr.output_dir, "Run directory (overrides config output_dir)");
    app.add_option("--seed", ovr.seed, "RNG seed for training and init (default 42)");
    app.add_option("--n-augment", ovr.n_augment,
                   "Augmented samples per positive pair per epoch (default 3)");
    app.add_option("--pretrain-epochs", ovr.pretrain_epochs,
                   "Multi-task pre-training epochs (default 5)");
    app.add_option("--finetune-epochs", ovr.finetune_epochs, "WSD tuning epochs (default 4)");
    app.add_option("--batch-size", ovr.batch_size, "Mini-batch size (default 256)");
    app.add_option("--lr", ovr.lr, "Adamax learning rate (default 2e-5)");
    app.add_option("--report-format", ovr.report_format,
                   "Report format: text, json, markdown (default text)");
    app.add_option("--mt-endpoint", ovr.mt_endpoint,
                   "Translation service URL (or env WSD_MT_ENDPOINT)");

    auto* prepare = app.add_subcommand("prepare", "Parse corpora and write context-gloss pairs");
    auto* augment = app.add_subcommand("augment", "Back-translate positive pairs into a pool");
    auto* pretrain = app.add_subcommand("pretrain", "Multi-task pre-training over task datasets");
    auto* finetune = app.add_subcommand("finetune", "Tune the pairwise head on WSD pairs");
    auto* evaluate = app.add_subcommand("evaluate", "Score test corpora and write the report");
    auto* report = app.add_subcommand("report", "Re-render an existing report");

    CLI11_PARSE(app, argc, argv);

    try {
        auto config = wsd::PipelineConfig::from_file(config_path);
        ovr.apply(config);
        wsd::set_log_prefix(config.run_id + " ");

        if (prepare->parsed()) wsd::cmd_prepare(config);
        else if (augment->parsed()) wsd::cmd_augment(config);
        else if (pretrain->parsed()) wsd::cmd_pretrain(config);
        else if (finetune->parsed()) wsd::cmd_finetune(config);
        else if (evaluate->parsed()) wsd::cmd_evaluate(config);
        else if (report->parsed()) wsd::cmd_report(config);
        return 0;
    } catch (const wsd::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
