// memeconf: command-line front end for every pipeline stage.

#include "memeconf/clustering.hpp"
#include "memeconf/dataset.hpp"
#include "memeconf/ensemble.hpp"
#include "memeconf/error.hpp"
#include "memeconf/metrics.hpp"
#include "memeconf/pipeline.hpp"
#include "memeconf/predictions.hpp"
#include "memeconf/rules.hpp"
#include "memeconf/simulator.hpp"
#include "memeconf/tuples.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace memeconf;

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kData = 3, kStage = 4 };

int exit_code_for(Errc code)
{
    switch (code) {
    case Errc::invalid_argument:
        return kConfig;
    case Errc::parse:
    case Errc::duplicate_id:
    case Errc::missing_field:
    case Errc::out_of_range:
    case Errc::coverage_mismatch:
    case Errc::missing_id:
    case Errc::degenerate:
        return kData;
    case Errc::io:
        return kStage;
    }
    return kStage;
}

struct Globals {
    std::optional<std::uint64_t> seed;
    std::string out;
    bool quiet = false;

    void info(std::string_view msg) const
    {
        if (!quiet)
            std::cerr << msg << '\n';
    }

    const std::string& need_out(const char* what) const
    {
        if (out.empty())
            throw Error(Errc::invalid_argument, std::string("--out is required: ") + what);
        return out;
    }
};

void ensure_parent(const fs::path& file)
{
    if (file.has_parent_path())
        fs::create_directories(file.parent_path());
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else
            cur += c;
    }
    out.push_back(cur);
    out.erase(std::remove(out.begin(), out.end(), std::string{}), out.end());
    return out;
}

std::map<MemeId, int> labels_of(std::span<const MemeRecord> records)
{
    std::map<MemeId, int> out;
    for (const auto& r : records)
        if (r.label)
            out.emplace(r.id, *r.label);
    return out;
}

// Flag name for a config key: sim_mu -> --sim-mu.
std::string flag_for(std::string key)
{
    std::replace(key.begin(), key.end(), '_', '-');
    return "--" + key;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Confounder-aware meme classification pipeline"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--seed", g.seed, "Random seed");
    app.add_option("-o,--out,--outdir", g.out, "Output file or directory");
    app.add_flag("-q,--quiet", g.quiet, "Suppress progress messages");

    std::function<void()> action;

    // gen-data
    std::size_t gen_n = 2000;
    std::string gen_composition;
    double gen_label_noise = 0.0;
    double gen_overlap = 1.0;
    auto* gen = app.add_subcommand("gen-data", "Generate a synthetic corpus with known confounders");
    gen->add_option("--n", gen_n, "Number of memes")->check(CLI::PositiveNumber);
    gen->add_option("--composition", gen_composition, "multimodal,unimodal,text-confounder,image-confounder,random");
    gen->add_option("--label-noise", gen_label_noise, "Per-meme label flip probability")->check(CLI::Range(0.0, 1.0));
    gen->add_option("--triple-overlap", gen_overlap, "Share of confounders grouped into 3-tuples")
        ->check(CLI::Range(0.0, 1.0));
    gen->callback([&] {
        action = [&] {
            GeneratorOptions opt;
            opt.n = gen_n;
            if (!gen_composition.empty())
                opt.composition = DatasetComposition::parse(gen_composition);
            opt.noise.label_noise = gen_label_noise;
            opt.triple_overlap = gen_overlap;
            opt.seed = g.seed.value_or(0);
            const fs::path dir = g.need_out("gen-data writes a directory");
            const auto data = generate_dataset(opt);
            write_dataset(data, dir);
            g.info("wrote " + std::to_string(data.records.size()) + " memes (" + std::to_string(data.triples.size()) +
                   " triples, " + std::to_string(data.pairs.size()) + " pairs) to " + dir.string());
        };
    });

    // hash
    std::string manifest_path;
    auto* hash = app.add_subcommand("hash", "pHash every image in a manifest");
    hash->add_option("--manifest", manifest_path)->required()->check(CLI::ExistingFile);
    hash->callback([&] {
        action = [&] {
            const fs::path out = g.need_out("hash writes id,hash_hex lines");
            const auto records = read_manifest(manifest_path);
            const auto hashes = hash_manifest(records, fs::path(manifest_path).parent_path());
            ensure_parent(out);
            write_hashes(hashes, out);
            g.info("hashed " + std::to_string(hashes.size()) + " images");
        };
    });

    // cluster
    std::string hashes_path;
    int threshold = kDefaultHammingThreshold;
    auto* cluster = app.add_subcommand("cluster", "Cluster images by Hamming radius and texts by normalized form");
    cluster->add_option("--manifest", manifest_path)->required()->check(CLI::ExistingFile);
    cluster->add_option("--hashes", hashes_path)->required()->check(CLI::ExistingFile);
    cluster->add_option("--threshold", threshold, "Hamming radius")->check(CLI::Range(0, 64));
    cluster->callback([&] {
        action = [&] {
            const fs::path out = g.need_out("cluster writes id,image_cluster,text_cluster lines");
            const auto records = read_manifest(manifest_path);
            const auto assignment = assign_clusters(records, read_hashes(hashes_path), threshold);
            ensure_parent(out);
            write_clusters(assignment, out);
            g.info("clustered " + std::to_string(assignment.size()) + " memes");
        };
    });

    // stats
    std::string clusters_path, tuples_path, scope = "test";
    auto* stats = app.add_subcommand("stats", "Repeat statistics for clusters and optionally tuples");
    stats->add_option("--clusters", clusters_path)->required()->check(CLI::ExistingFile);
    auto* stats_tuples = stats->add_option("--tuples", tuples_path)->check(CLI::ExistingFile);
    stats->add_option("--manifest", manifest_path)->check(CLI::ExistingFile);
    stats->add_option("--scope", scope, "Splits the tuples were detected on");
    stats_tuples->needs("--manifest");
    stats->callback([&] {
        action = [&] {
            std::cout << format_corpus_stats(corpus_stats(read_clusters(clusters_path)));
            if (!tuples_path.empty()) {
                const auto splits = parse_split_list(scope);
                const auto records = filter_splits(read_manifest(manifest_path), splits);
                std::cout << format_tuple_stats(tuple_stats(read_groups(tuples_path), records.size()));
            }
        };
    });

    // tuples
    std::string signatures_path;
    auto* tuples = app.add_subcommand("tuples", "Detect 3-tuples, 2-tuples and unimodal-hate signatures");
    tuples->add_option("--manifest", manifest_path)->required()->check(CLI::ExistingFile);
    tuples->add_option("--clusters", clusters_path)->required()->check(CLI::ExistingFile);
    tuples->add_option("--scope", scope, "Comma-separated splits to search");
    tuples->add_option("--signatures", signatures_path, "Also write unimodal-hate signatures from labeled train memes");
    tuples->callback([&] {
        action = [&] {
            const fs::path out = g.need_out("tuples writes one group per line");
            const auto records = read_manifest(manifest_path);
            const auto assignment = read_clusters(clusters_path);
            const auto splits = parse_split_list(scope);
            const auto groups = detect_tuples(filter_splits(records, splits), assignment);
            ensure_parent(out);
            write_groups(groups, out);
            const auto s = tuple_stats(groups, filter_splits(records, splits).size());
            g.info(std::to_string(s.three_tuples) + " 3-tuples, " + std::to_string(s.two_tuples) + " 2-tuples, " +
                   std::to_string(s.other_groups) + " other groups");
            if (!signatures_path.empty()) {
                const std::vector<Split> train{Split::train};
                const auto sig = detect_unimodal_hate(filter_splits(records, train), assignment);
                ensure_parent(signatures_path);
                write_groups(sig, signatures_path);
                g.info(std::to_string(sig.size()) + " unimodal-hate signatures");
            }
        };
    });

    // pseudo-label
    auto* pseudo = app.add_subcommand("pseudo-label", "Rule-1 pseudo labels for 3-tuple members");
    pseudo->add_option("--tuples", tuples_path)->required()->check(CLI::ExistingFile);
    pseudo->callback([&] {
        action = [&] {
            const fs::path out = g.need_out("pseudo-label writes id,label,provenance lines");
            const auto labels = rule1_pseudo_labels(read_groups(tuples_path));
            ensure_parent(out);
            write_pseudo_labels(labels, out);
            g.info(std::to_string(labels.labels.size()) + " pseudo labels");
        };
    });

    // adjust
    std::string preds_path, rule;
    double hi = 1.0, lo = 0.0;
    auto* adjust = app.add_subcommand("adjust", "Apply rule 1, rule 2 or unimodal signatures to a prediction file");
    adjust->add_option("--tuples", tuples_path, "Tuple groups (signatures for --rule unimodal)")
        ->required()
        ->check(CLI::ExistingFile);
    adjust->add_option("--preds", preds_path)->required()->check(CLI::ExistingFile);
    adjust->add_option("--rule", rule)->required()->check(CLI::IsMember({"1", "2", "unimodal"}));
    adjust->add_option("--hi", hi)->check(CLI::Range(0.0, 1.0));
    adjust->add_option("--lo", lo)->check(CLI::Range(0.0, 1.0));
    adjust->add_option("--clusters", clusters_path, "Cluster assignment, needed by --rule unimodal")
        ->check(CLI::ExistingFile);
    adjust->callback([&] {
        action = [&] {
            const fs::path out = g.need_out("adjust writes a prediction file");
            const auto groups = read_groups(tuples_path);
            const auto preds = read_predictions(preds_path);
            PredictionSet result;
            if (rule == "1")
                result = apply_rule1(groups, preds);
            else if (rule == "2")
                result = apply_rule2(groups, preds, hi, lo);
            else {
                if (clusters_path.empty())
                    throw Error(Errc::invalid_argument, "--rule unimodal needs --clusters");
                result = apply_unimodal_signatures(groups, read_clusters(clusters_path), preds);
            }
            ensure_parent(out);
            write_predictions(result, out);
        };
    });

    // simulate
    std::string pseudo_path;
    std::size_t models = 4;
    auto* simulate = app.add_subcommand("simulate", "Simulated base-model predictions, one file per model");
    simulate->add_option("--manifest", manifest_path, "Labeled manifest (e.g. truth.jsonl)")
        ->required()
        ->check(CLI::ExistingFile);
    simulate->add_option("--tuples", tuples_path)->required()->check(CLI::ExistingFile);
    simulate->add_option("--pseudo", pseudo_path, "Pseudo labels that boost the simulated models")
        ->check(CLI::ExistingFile);
    simulate->add_option("--models", models)->check(CLI::PositiveNumber);
    simulate->add_option("--scope", scope, "Splits to predict");
    SimulatorConfig sim_cfg;
    simulate->add_option("--mu", sim_cfg.separation_mu);
    simulate->add_option("--sigma", sim_cfg.sigma);
    simulate->add_option("--boost", sim_cfg.pseudo_label_boost);
    simulate->add_option("--shared-noise", sim_cfg.shared_noise);
    simulate->callback([&] {
        action = [&] {
            const fs::path outdir = g.need_out("simulate writes a directory of prediction files");
            sim_cfg.seed = g.seed.value_or(0);
            sim_cfg.validate();
            const auto splits = parse_split_list(scope);
            const auto memes = filter_splits(read_manifest(manifest_path), splits);
            const auto groups = read_groups(tuples_path);
            std::optional<PseudoLabelSet> labels;
            if (!pseudo_path.empty())
                labels = read_pseudo_labels(pseudo_path);
            std::vector<SimulationJob> jobs;
            for (std::size_t m = 0; m < models; ++m)
                jobs.push_back({static_cast<int>(m), labels ? &*labels : nullptr});
            const auto sets = simulate_batch(memes, groups, sim_cfg, jobs);
            fs::create_directories(outdir);
            for (const auto& s : sets)
                write_predictions(s, outdir / (s.model_id + ".csv"));
            g.info("wrote " + std::to_string(sets.size()) + " prediction files to " + outdir.string());
        };
    });

    // kfold
    std::size_t kf_n = 0, kf_k = 5;
    auto* kf = app.add_subcommand("kfold", "Print a k-fold plan");
    kf->add_option("--n", kf_n)->required();
    kf->add_option("--k", kf_k)->required();
    kf->callback([&] { action = [&] { std::cout << format_kfold(kfold(kf_n, kf_k, g.seed)); }; });

    // stack
    std::string stack_preds;
    auto* stack = app.add_subcommand("stack", "Equal-weight average of prediction files");
    stack->add_option("--preds", stack_preds, "Comma-separated prediction files")->required();
    stack->callback([&] {
        action = [&] {
            const fs::path out = g.need_out("stack writes a submission file");
            std::vector<PredictionSet> sets;
            for (const auto& f : split_list(stack_preds))
                sets.push_back(read_predictions(f));
            const auto stacked = stack_equal_weight(sets);
            ensure_parent(out);
            write_submission(stacked, out);
            g.info("stacked " + std::to_string(sets.size()) + " prediction sets");
        };
    });

    // evaluate
    std::string submission_path, truth_path, eval_split;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "AUROC and accuracy of a submission");
    evaluate_cmd->add_option("--submission", submission_path)->required()->check(CLI::ExistingFile);
    evaluate_cmd->add_option("--truth", truth_path)->required()->check(CLI::ExistingFile);
    evaluate_cmd->add_option("--split", eval_split)->check(CLI::IsMember({"train", "dev", "test"}));
    evaluate_cmd->callback([&] {
        action = [&] {
            const auto sub = read_submission(submission_path);
            auto truth_records = read_manifest(truth_path);
            auto scores = sub.mean_score;
            auto predicted = sub.label;
            if (!eval_split.empty()) {
                const std::vector<Split> splits{parse_split(eval_split)};
                truth_records = filter_splits(truth_records, splits);
                const auto keep = labels_of(truth_records);
                std::erase_if(scores, [&](const auto& kv) { return !keep.contains(kv.first); });
                std::erase_if(predicted, [&](const auto& kv) { return !keep.contains(kv.first); });
            }
            std::cout << format_report(evaluate(scores, predicted, labels_of(truth_records)));
        };
    });

    // pipeline
    std::string config_path;
    std::map<std::string, std::string> overrides;
    auto* pipeline = app.add_subcommand("pipeline", "Run every stage end to end");
    pipeline->add_option("--config", config_path, "key = value file")->check(CLI::ExistingFile);
    for (const auto& [key, value] : config_entries(PipelineConfig{})) {
        if (key == "seed" || key == "outdir")
            continue;
        pipeline->add_option(flag_for(key), overrides[key], "config key '" + key + "'");
    }
    pipeline->callback([&] {
        action = [&] {
            PipelineConfig cfg;
            if (!config_path.empty())
                cfg = read_config_file(config_path);
            for (const auto& [key, value] : overrides)
                if (pipeline->get_option(flag_for(key))->count() > 0)
                    apply_config_entry(cfg, key, value);
            if (g.seed)
                cfg.seed = *g.seed;
            if (!g.out.empty())
                cfg.outdir = g.out;
            cfg.validate();
            LogFn log;
            if (!g.quiet)
                log = [](std::string_view s) { std::cerr << s << '\n'; };
            PipelineResult result;
            try {
                result = run_pipeline(cfg, log);
            } catch (const Error& e) {
                throw Error(Errc::io, e.what()); // any failure inside a stage is a stage failure
            }
            g.info("submission: " + result.submission.string());
            if (result.report)
                std::cout << format_report(*result.report);
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        action();
    } catch (const Error& e) {
        std::cerr << "error [" << errc_name(e.code()) << "]: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kStage;
    }
    return kOk;
}
