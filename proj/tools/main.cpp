#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "subsume/error.hpp"
#include "subsume/pipeline.hpp"

namespace {

struct CliOverrides {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> workdir;
    std::optional<std::string> model;
    std::optional<std::size_t> dim;
    std::optional<std::string> self_matching;
    std::optional<std::string> external;
    std::optional<std::string> exec;
};

subsume::PipelineConfig make_config(const CliOverrides& cli) {
    subsume::PipelineConfig cfg = cli.config_path.empty()
                                      ? subsume::PipelineConfig{}
                                      : subsume::PipelineConfig::from_file(cli.config_path);
    if (cli.seed) cfg.seed = *cli.seed;
    if (cli.workdir) cfg.workdir = *cli.workdir;
    if (cli.model) cfg.apply("model", *cli.model);
    if (cli.dim) cfg.dims = {*cli.dim};
    if (cli.self_matching) cfg.apply("self_matching", *cli.self_matching);
    if (cli.external) cfg.apply("external", *cli.external);
    if (cli.exec) cfg.apply("exec", *cli.exec);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Concept subsumption prediction over OWL ontology annotations"};
    app.require_subcommand(1);

    CliOverrides cli;
    app.add_option("--config", cli.config_path, "Key-value configuration file");
    app.add_option("--seed", cli.seed, "Global seed override");
    app.add_option("--workdir", cli.workdir, "Artifact directory override");
    app.add_option("--model", cli.model, "inme | come | inme_come | concat:<file>");
    app.add_option("--dim", cli.dim, "Single compressed dimension (replaces the grid)");
    app.add_option("--self-matching", cli.self_matching, "on | off | auto");
    app.add_option("--external", cli.external, "External embedding file for concat models");
    app.add_option("--exec", cli.exec, "serial | openmp kernel execution");

    const struct {
        const char* name;
        const char* description;
        void (subsume::Pipeline::*run)();
    } verbs[] = {
        {"ingest", "Parse the ontology and write the store and ingest report", &subsume::Pipeline::cmd_ingest},
        {"build", "Build the vocabulary and the occurrence/co-occurrence matrices", &subsume::Pipeline::cmd_build},
        {"train-ae", "Train the autoencoder per configured dimension", &subsume::Pipeline::cmd_train_ae},
        {"embed", "Write entity embedding tables", &subsume::Pipeline::cmd_embed},
        {"train-rf", "Split the axioms and train the random forest variants", &subsume::Pipeline::cmd_train_rf},
        {"eval", "Select the best variant on validation data and report test metrics", &subsume::Pipeline::cmd_eval},
        {"selfpred", "Rank random synthetic entities as their own superclass", &subsume::Pipeline::cmd_selfpred},
        {"pipeline", "Run every stage in order", &subsume::Pipeline::cmd_pipeline},
    };
    for (const auto& verb : verbs) app.add_subcommand(verb.name, verb.description);

    CLI11_PARSE(app, argc, argv);

    try {
        subsume::PipelineConfig cfg = make_config(cli);
        cfg.validate();
        subsume::WorkdirLock lock(cfg.workdir);
        subsume::Pipeline pipeline(std::move(cfg));
        for (const auto& verb : verbs) {
            if (app.got_subcommand(verb.name)) {
                (pipeline.*verb.run)();
                return 0;
            }
        }
        std::cerr << "error: no subcommand\n";
        return 2;
    } catch (const subsume::MissingArtifact& e) {
        std::cerr << "error [" << e.stage << "]: " << e.what() << "\n";
        return 3;
    } catch (const subsume::ConfigError& e) {
        std::cerr << "error [config]: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
