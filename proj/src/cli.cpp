#include "cornerforge/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "cornerforge/dataset.hpp"
#include "cornerforge/error.hpp"
#include "cornerforge/evaluation.hpp"
#include "cornerforge/extraction.hpp"
#include "cornerforge/io.hpp"
#include "cornerforge/log.hpp"
#include "cornerforge/matching.hpp"
#include "cornerforge/metrics.hpp"
#include "cornerforge/ontology.hpp"
#include "cornerforge/registry.hpp"
#include "cornerforge/synthgen.hpp"

namespace cornerforge {

namespace {

namespace fs = std::filesystem;

CornerCaseOntology run_ingest(const std::string& registry_path, const std::string& ontology_path) {
    const std::vector<CornerCaseSpec> specs = load_registry(io::read_text_file(registry_path));
    for (const RegistryDiagnostic& diagnostic : validate_registry(specs)) {
        log::warn("corner case " + std::to_string(diagnostic.corner_case_id) + " cause '" +
                  diagnostic.cause + "': " + diagnostic.message);
    }
    const CornerCaseOntology base = CornerCaseOntology::load(io::load_json_file(ontology_path));
    return inject_meta_classes(base, specs);
}

MetricsFile run_compile(const std::string& registry_path, const std::string& ontology_path) {
    const std::vector<CornerCaseSpec> specs = load_registry(io::read_text_file(registry_path));
    const CornerCaseOntology ontology = CornerCaseOntology::load(io::load_json_file(ontology_path));
    return compile(ontology, specs);
}

ExtractionResult run_extract(const std::string& metrics_path, const std::string& ontology_path,
                             const std::string& mapping_path, const std::string& dataset_path,
                             int jobs) {
    const MetricsFile metrics = metrics_from_json(io::load_json_file(metrics_path));
    const CornerCaseOntology ontology = CornerCaseOntology::load(io::load_json_file(ontology_path));
    const DatasetIndex dataset = DatasetIndex::load(io::load_json_file(dataset_path));
    const LabelMapping mapping = LabelMapping::load(io::load_json_file(mapping_path), ontology, metrics);
    return extract_all(metrics, dataset, mapping, jobs);
}

EnrichmentResult run_enrich(const std::string& dataset_path, const std::string& detections_path,
                            double threshold_m, int jobs) {
    const DatasetIndex dataset = DatasetIndex::load(io::load_json_file(dataset_path));
    const std::vector<Detection> detections =
        detections_from_json(io::load_json_file(detections_path), dataset);
    return enrich(dataset, detections, threshold_m, jobs);
}

void write_synth_outputs(const SynthOutput& output, const std::string& out_dir) {
    fs::create_directories(out_dir);
    io::write_json_file(out_dir + "/dataset.json", output.dataset);
    io::write_json_file(out_dir + "/detections.json", output.detections);
    io::write_json_file(out_dir + "/plantlog.json", plantlog_to_json(output.plantlog));
}

struct Paths {
    std::string registry, ontology, mapping, dataset, detections;
    std::string metrics, hits, enriched, out, format = "json";
    double threshold_m = 0.5;
    int jobs = 1;
};

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Compiles expert-described corner cases into dataset queries, scores a detector "
                 "against the matching annotations, and reports which corner cases it missed."};
    app.require_subcommand(1);
    Paths paths;
    std::string synth_spec_path;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--jobs", paths.jobs, "Worker threads (output is identical for any value)")
            ->check(CLI::PositiveNumber);
    };

    CLI::App* ingest = app.add_subcommand("ingest", "Merge the registry sheet into the ontology");
    ingest->add_option("--registry", paths.registry)->required();
    ingest->add_option("--ontology", paths.ontology)->required();
    ingest->add_option("--out", paths.out)->required();

    CLI::App* compile_cmd = app.add_subcommand("compile", "Compile corner-case causes into metrics");
    compile_cmd->add_option("--registry", paths.registry)->required();
    compile_cmd->add_option("--ontology", paths.ontology)->required();
    compile_cmd->add_option("--out", paths.out)->required();

    CLI::App* extract = app.add_subcommand("extract", "Find a-priori corner cases in a dataset");
    extract->add_option("--metrics", paths.metrics)->required();
    extract->add_option("--ontology", paths.ontology)->required();
    extract->add_option("--mapping", paths.mapping)->required();
    extract->add_option("--dataset", paths.dataset)->required();
    extract->add_option("--out", paths.out)->required();
    add_common(extract);

    CLI::App* enrich_cmd = app.add_subcommand("enrich", "Match detections against ground truth");
    enrich_cmd->add_option("--dataset", paths.dataset)->required();
    enrich_cmd->add_option("--detections", paths.detections)->required();
    enrich_cmd->add_option("--threshold-m", paths.threshold_m, "Match gate in meters");
    enrich_cmd->add_option("--out", paths.out)->required();
    add_common(enrich_cmd);

    CLI::App* evaluate = app.add_subcommand("evaluate", "Derive a-posteriori corner cases");
    evaluate->add_option("--hits", paths.hits)->required();
    evaluate->add_option("--enriched", paths.enriched)->required();
    evaluate->add_option("--out", paths.out)->required();

    CLI::App* report = app.add_subcommand("report", "Aggregate per corner case, layer, and level");
    report->add_option("--hits", paths.hits)->required();
    report->add_option("--enriched", paths.enriched)->required();
    report->add_option("--registry", paths.registry)->required();
    report->add_option("--format", paths.format)->check(CLI::IsMember({"json", "csv"}));
    report->add_option("--out", paths.out)->required();

    CLI::App* synth = app.add_subcommand("synth", "Generate a seeded synthetic dataset");
    synth->add_option("spec", synth_spec_path, "Synth spec JSON")->required();
    synth->add_option("--out", paths.out, "Output directory")->required();

    CLI::App* run_all = app.add_subcommand("run-all", "Run every stage over one dataset");
    run_all->add_option("--registry", paths.registry)->required();
    run_all->add_option("--ontology", paths.ontology)->required();
    run_all->add_option("--mapping", paths.mapping)->required();
    run_all->add_option("--dataset", paths.dataset)->required();
    run_all->add_option("--detections", paths.detections)->required();
    run_all->add_option("--threshold-m", paths.threshold_m, "Match gate in meters");
    run_all->add_option("--out", paths.out, "Output directory")->required();
    add_common(run_all);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (paths.threshold_m <= 0.0) {
            throw Error::validation("Malformed", "--threshold-m must be positive");
        }
        if (ingest->parsed()) {
            io::write_json_file(paths.out, run_ingest(paths.registry, paths.ontology).to_json());
        } else if (compile_cmd->parsed()) {
            io::write_json_file(paths.out,
                                metrics_to_json(run_compile(paths.registry, paths.ontology)));
        } else if (extract->parsed()) {
            io::write_json_file(paths.out,
                                extraction_to_json(run_extract(paths.metrics, paths.ontology,
                                                               paths.mapping, paths.dataset,
                                                               paths.jobs)));
        } else if (enrich_cmd->parsed()) {
            io::write_json_file(paths.out,
                                enrichment_to_json(run_enrich(paths.dataset, paths.detections,
                                                              paths.threshold_m, paths.jobs)));
        } else if (evaluate->parsed()) {
            const ExtractionResult hits = extraction_from_json(io::load_json_file(paths.hits));
            const EnrichmentResult outcomes = enrichment_from_json(io::load_json_file(paths.enriched));
            io::write_json_file(paths.out, a_posteriori_to_json(derive_a_posteriori(hits, outcomes)));
        } else if (report->parsed()) {
            const ExtractionResult hits = extraction_from_json(io::load_json_file(paths.hits));
            const EnrichmentResult outcomes = enrichment_from_json(io::load_json_file(paths.enriched));
            const std::vector<CornerCaseSpec> specs = load_registry(io::read_text_file(paths.registry));
            const CornerCaseReport aggregated = aggregate(derive_a_posteriori(hits, outcomes), specs);
            io::write_text_file(paths.out, write_report(aggregated, paths.format));
        } else if (synth->parsed()) {
            const SynthSpec spec = synth_spec_from_json(io::load_json_file(synth_spec_path));
            write_synth_outputs(generate(spec), paths.out);
        } else if (run_all->parsed()) {
            fs::create_directories(paths.out);
            const std::vector<CornerCaseSpec> specs = load_registry(io::read_text_file(paths.registry));
            const CornerCaseOntology enriched_ontology = run_ingest(paths.registry, paths.ontology);
            io::write_json_file(paths.out + "/ontology_enriched.json", enriched_ontology.to_json());

            const MetricsFile metrics = compile(enriched_ontology, specs);
            io::write_json_file(paths.out + "/metrics.json", metrics_to_json(metrics));

            const DatasetIndex dataset = DatasetIndex::load(io::load_json_file(paths.dataset));
            const LabelMapping mapping =
                LabelMapping::load(io::load_json_file(paths.mapping), enriched_ontology, metrics);
            const ExtractionResult hits = extract_all(metrics, dataset, mapping, paths.jobs);
            io::write_json_file(paths.out + "/hits.json", extraction_to_json(hits));

            const std::vector<Detection> detections =
                detections_from_json(io::load_json_file(paths.detections), dataset);
            const EnrichmentResult outcomes = enrich(dataset, detections, paths.threshold_m, paths.jobs);
            io::write_json_file(paths.out + "/enriched.json", enrichment_to_json(outcomes));

            const APosterioriResult result = derive_a_posteriori(hits, outcomes);
            io::write_json_file(paths.out + "/aposteriori.json", a_posteriori_to_json(result));

            const CornerCaseReport aggregated = aggregate(result, specs);
            io::write_text_file(paths.out + "/report.json", write_report(aggregated, "json"));
            io::write_text_file(paths.out + "/report.csv", write_report(aggregated, "csv"));
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "cornerforge: %s\n", e.what());
        return e.kind() == ErrorKind::Io ? 2 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "cornerforge: %s\n", e.what());
        return 1;
    }
    return 0;
}

} // namespace cornerforge
