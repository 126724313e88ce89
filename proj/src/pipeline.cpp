#include "memeconf/pipeline.hpp"

#include "memeconf/ensemble.hpp"
#include "memeconf/error.hpp"
#include "memeconf/rules.hpp"
#include "textio.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

namespace memeconf {

std::string_view to_string(AdjustPlacement p) noexcept
{
    switch (p) {
    case AdjustPlacement::before_stacking: return "before";
    case AdjustPlacement::after_stacking: return "after";
    case AdjustPlacement::off: return "off";
    }
    return "off";
}

AdjustPlacement parse_placement(std::string_view s)
{
    if (s == "before" || s == "before_stacking")
        return AdjustPlacement::before_stacking;
    if (s == "after" || s == "after_stacking")
        return AdjustPlacement::after_stacking;
    if (s == "off" || s == "both_off")
        return AdjustPlacement::off;
    throw Error(Errc::invalid_argument, "rule2 placement must be before, after or off (got '" + std::string(s) + "')");
}

PipelineConfig PipelineConfig::baseline()
{
    PipelineConfig cfg;
    cfg.rule1 = false;
    cfg.pseudo_labels = false;
    cfg.rule2 = AdjustPlacement::off;
    cfg.unimodal = false;
    return cfg;
}

void PipelineConfig::validate() const
{
    if (outdir.empty())
        throw Error(Errc::invalid_argument, "pipeline needs an output directory");
    if (k < 2)
        throw Error(Errc::invalid_argument, "k must be >= 2");
    if (models < 1 && preds_dir.empty())
        throw Error(Errc::invalid_argument, "need at least one simulated model");
    if (threshold < 0 || threshold > 64)
        throw Error(Errc::invalid_argument, "hamming threshold must be in [0, 64]");
    if (!(lo >= 0.0 && lo < hi && hi <= 1.0))
        throw Error(Errc::invalid_argument, "rule 2 needs 0 <= lo < hi <= 1");
    if (scope.empty())
        throw Error(Errc::invalid_argument, "empty scope");
    composition.validate();
    sim.validate();
    if (!manifest.empty() && !std::filesystem::exists(manifest))
        throw Error(Errc::invalid_argument, "manifest " + manifest.string() + " does not exist");
    if (!truth.empty() && !std::filesystem::exists(truth))
        throw Error(Errc::invalid_argument, "truth manifest " + truth.string() + " does not exist");
    if (!preds_dir.empty() && !std::filesystem::is_directory(preds_dir))
        throw Error(Errc::invalid_argument, "prediction directory " + preds_dir.string() + " does not exist");
}

// ---------------------------------------------------------------------------
// key = value configuration

namespace {

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(std::string_view key, std::string_view value)
{
    const std::string v(value);
    try {
        std::size_t pos = 0;
        T out{};
        if constexpr (std::is_floating_point_v<T>)
            out = static_cast<T>(std::stod(v, &pos));
        else if constexpr (std::is_signed_v<T>)
            out = static_cast<T>(std::stoll(v, &pos));
        else {
            if (!v.empty() && v.front() == '-')
                throw std::invalid_argument(v);
            out = static_cast<T>(std::stoull(v, &pos));
        }
        if (pos != v.size())
            throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw Error(Errc::invalid_argument, "bad value '" + v + "' for config key '" + std::string(key) + "'");
    }
}

bool parse_bool(std::string_view key, std::string_view v)
{
    if (v == "true" || v == "1" || v == "on" || v == "yes")
        return true;
    if (v == "false" || v == "0" || v == "off" || v == "no")
        return false;
    throw Error(Errc::invalid_argument, "bad boolean '" + std::string(v) + "' for config key '" + std::string(key) + "'");
}

std::string fmt(double v)
{
    return textio::format_double(v);
}

std::string join_splits(const std::vector<Split>& splits)
{
    std::string out;
    for (auto s : splits) {
        if (!out.empty())
            out += ',';
        out += to_string(s);
    }
    return out;
}

} // namespace

void apply_config_entry(PipelineConfig& cfg, std::string_view key, std::string_view raw)
{
    const std::string value = trim(raw);
    if (key == "outdir")
        cfg.outdir = value;
    else if (key == "manifest")
        cfg.manifest = value;
    else if (key == "truth")
        cfg.truth = value;
    else if (key == "preds")
        cfg.preds_dir = value;
    else if (key == "n")
        cfg.n = parse_number<std::size_t>(key, value);
    else if (key == "composition")
        cfg.composition = DatasetComposition::parse(value);
    else if (key == "label_noise")
        cfg.noise.label_noise = parse_number<double>(key, value);
    else if (key == "image_noise")
        cfg.noise.image_amplitude = parse_number<double>(key, value);
    else if (key == "text_perturb")
        cfg.noise.text_perturb_prob = parse_number<double>(key, value);
    else if (key == "triple_overlap")
        cfg.triple_overlap = parse_number<double>(key, value);
    else if (key == "seed")
        cfg.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "threshold")
        cfg.threshold = parse_number<int>(key, value);
    else if (key == "scope") {
        try {
            cfg.scope = parse_split_list(value);
        } catch (const Error& e) {
            throw Error(Errc::invalid_argument, e.what());
        }
    } else if (key == "k")
        cfg.k = parse_number<std::size_t>(key, value);
    else if (key == "models")
        cfg.models = parse_number<std::size_t>(key, value);
    else if (key == "kfold_seed") {
        if (value.empty() || value == "none")
            cfg.kfold_seed.reset();
        else
            cfg.kfold_seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "rule1")
        cfg.rule1 = parse_bool(key, value);
    else if (key == "pseudo_labels")
        cfg.pseudo_labels = parse_bool(key, value);
    else if (key == "rule2")
        cfg.rule2 = parse_placement(value);
    else if (key == "unimodal")
        cfg.unimodal = parse_bool(key, value);
    else if (key == "hi")
        cfg.hi = parse_number<double>(key, value);
    else if (key == "lo")
        cfg.lo = parse_number<double>(key, value);
    else if (key == "sim_mu")
        cfg.sim.separation_mu = parse_number<double>(key, value);
    else if (key == "sim_sigma")
        cfg.sim.sigma = parse_number<double>(key, value);
    else if (key == "sim_boost")
        cfg.sim.pseudo_label_boost = parse_number<double>(key, value);
    else if (key == "sim_shared_noise")
        cfg.sim.shared_noise = parse_number<double>(key, value);
    else if (key == "sim_discount") {
        std::vector<double> v;
        std::stringstream ss(value);
        for (std::string piece; std::getline(ss, piece, ',');)
            v.push_back(parse_number<double>(key, trim(piece)));
        if (v.size() != 4)
            throw Error(Errc::invalid_argument, "sim_discount needs 4 values (three_tuple,two_tuple,unimodal,independent)");
        cfg.sim.discount = {v[0], v[1], v[2], v[3]};
    } else
        throw Error(Errc::invalid_argument, "unknown config key '" + std::string(key) + "'");
}

PipelineConfig parse_config_text(std::string_view text, PipelineConfig base)
{
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        if (trim(line).empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(Errc::invalid_argument, "config line " + std::to_string(lineno) + ": expected key = value");
        try {
            apply_config_entry(base, trim(std::string_view(line).substr(0, eq)), std::string_view(line).substr(eq + 1));
        } catch (const Error& e) {
            throw Error(e.code(), "config line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return base;
}

PipelineConfig read_config_file(const std::filesystem::path& path, PipelineConfig base)
{
    std::ifstream in(path);
    if (!in)
        throw Error(Errc::invalid_argument, "cannot open config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), std::move(base));
}

std::vector<std::pair<std::string, std::string>> config_entries(const PipelineConfig& c)
{
    const auto& comp = c.composition;
    const auto& d = c.sim.discount;
    return {
        {"outdir", c.outdir.string()},
        {"manifest", c.manifest.string()},
        {"truth", c.truth.string()},
        {"preds", c.preds_dir.string()},
        {"n", std::to_string(c.n)},
        {"composition", fmt(comp.multimodal_hate) + "," + fmt(comp.unimodal_hate) + "," +
                            fmt(comp.benign_text_confounder) + "," + fmt(comp.benign_image_confounder) + "," +
                            fmt(comp.random_benign)},
        {"label_noise", fmt(c.noise.label_noise)},
        {"image_noise", fmt(c.noise.image_amplitude)},
        {"text_perturb", fmt(c.noise.text_perturb_prob)},
        {"triple_overlap", fmt(c.triple_overlap)},
        {"seed", std::to_string(c.seed)},
        {"threshold", std::to_string(c.threshold)},
        {"scope", join_splits(c.scope)},
        {"k", std::to_string(c.k)},
        {"models", std::to_string(c.models)},
        {"kfold_seed", c.kfold_seed ? std::to_string(*c.kfold_seed) : "none"},
        {"rule1", c.rule1 ? "true" : "false"},
        {"pseudo_labels", c.pseudo_labels ? "true" : "false"},
        {"rule2", std::string(to_string(c.rule2))},
        {"unimodal", c.unimodal ? "true" : "false"},
        {"hi", fmt(c.hi)},
        {"lo", fmt(c.lo)},
        {"sim_mu", fmt(c.sim.separation_mu)},
        {"sim_sigma", fmt(c.sim.sigma)},
        {"sim_boost", fmt(c.sim.pseudo_label_boost)},
        {"sim_shared_noise", fmt(c.sim.shared_noise)},
        {"sim_discount", fmt(d.three_tuple) + "," + fmt(d.two_tuple) + "," + fmt(d.unimodal) + "," + fmt(d.independent)},
    };
}

std::string fnv1a_digest(const std::filesystem::path& file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw Error(Errc::io, "cannot open " + file.string());
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[1 << 14];
    while (in) {
        in.read(buf, sizeof buf);
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
    }
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

// ---------------------------------------------------------------------------
// run

namespace {

template <typename F>
auto run_stage(std::string_view name, const LogFn& log, F&& body)
{
    if (log)
        log("[" + std::string(name) + "]");
    try {
        return body();
    } catch (const Error& e) {
        throw Error(e.code(), "stage '" + std::string(name) + "' failed: " + e.what());
    } catch (const std::exception& e) {
        throw Error(Errc::io, "stage '" + std::string(name) + "' failed: " + e.what());
    }
}

std::map<MemeId, int> label_map(std::span<const MemeRecord> records)
{
    std::map<MemeId, int> out;
    for (const auto& r : records)
        if (r.label)
            out.emplace(r.id, *r.label);
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    auto out = textio::open_out(path);
    out << text;
    textio::finish(out, path);
}

} // namespace

PipelineResult run_pipeline(const PipelineConfig& config, const LogFn& log)
{
    config.validate();
    PipelineConfig cfg = config;
    cfg.sim.seed = cfg.seed;

    const auto& out = cfg.outdir;
    std::filesystem::create_directories(out);
    PipelineResult result;
    std::vector<std::string> artifacts;
    auto artifact = [&](const std::string& rel) {
        artifacts.push_back(rel);
        return out / rel;
    };

    run_stage("data", log, [&] {
        if (!cfg.manifest.empty())
            return;
        GeneratorOptions g;
        g.n = cfg.n;
        g.composition = cfg.composition;
        g.noise = cfg.noise;
        g.seed = cfg.seed;
        g.triple_overlap = cfg.triple_overlap;
        g.self_check_radius = cfg.threshold;
        const auto data = generate_dataset(g);
        write_dataset(data, out / "data");
        cfg.manifest = out / "data" / "manifest.jsonl";
        cfg.truth = out / "data" / "truth.jsonl";
        artifacts.push_back("data/manifest.jsonl");
        artifacts.push_back("data/truth.jsonl");
    });

    const auto records = run_stage("read-manifest", log, [&] { return read_manifest(cfg.manifest); });
    const auto truth = run_stage("read-truth", log, [&] {
        return cfg.truth.empty() ? label_map(records) : label_map(read_manifest(cfg.truth));
    });
    const auto manifest_dir = cfg.manifest.parent_path();

    const auto hashes = run_stage("hash", log, [&] {
        auto h = hash_manifest(records, manifest_dir);
        write_hashes(h, artifact("hashes.csv"));
        return h;
    });

    const auto assignment = run_stage("cluster", log, [&] {
        auto a = assign_clusters(records, hashes, cfg.threshold);
        write_clusters(a, artifact("clusters.csv"));
        result.corpus = corpus_stats(a);
        write_text(artifact("corpus_stats.txt"), format_corpus_stats(result.corpus));
        return a;
    });

    const auto scope = filter_splits(records, cfg.scope);
    const std::vector<Split> train_split{Split::train};
    const auto train = filter_splits(records, train_split);

    const auto groups = run_stage("tuples", log, [&] {
        if (scope.empty())
            throw Error(Errc::degenerate, "no records in scope " + join_splits(cfg.scope));
        auto g = detect_tuples(scope, assignment);
        write_groups(g, artifact("tuples.jsonl"));
        result.tuples = tuple_stats(g, scope.size());
        write_text(artifact("tuple_stats.txt"), format_tuple_stats(result.tuples));
        return g;
    });
    const auto signatures = run_stage("signatures", log, [&] {
        auto s = detect_unimodal_hate(train, assignment);
        write_groups(s, artifact("signatures.jsonl"));
        return s;
    });

    // Rule-1 pseudo labels join the training pool before base models are fit.
    PseudoLabelSet pseudo;
    const auto merged = run_stage("pseudo-label", log, [&] {
        if (!cfg.pseudo_labels)
            return std::vector<MemeRecord>(train);
        pseudo = rule1_pseudo_labels(groups);
        write_pseudo_labels(pseudo, artifact("pseudo_labels.csv"));
        auto m = merge_pseudo_labels(train, pseudo, scope);
        // Re-anchor image paths so the merged manifest resolves from outdir.
        for (auto& r : m)
            r.image_ref = std::filesystem::relative(manifest_dir / r.image_ref, out).generic_string();
        write_manifest(m, artifact("train_merged.jsonl"));
        return m;
    });

    const auto plan = run_stage("kfold", log, [&] {
        auto p = kfold(merged.size(), cfg.k, cfg.kfold_seed);
        write_text(artifact("kfold.txt"), format_kfold(p));
        return p;
    });

    std::vector<PredictionSet> base = run_stage("predict", log, [&] {
        std::vector<PredictionSet> sets;
        if (!cfg.preds_dir.empty()) {
            std::vector<std::filesystem::path> files;
            for (const auto& e : std::filesystem::directory_iterator(cfg.preds_dir))
                if (e.is_regular_file() && e.path().extension() == ".csv")
                    files.push_back(e.path());
            std::sort(files.begin(), files.end());
            if (files.empty())
                throw Error(Errc::degenerate, "no .csv prediction files in " + cfg.preds_dir.string());
            for (const auto& f : files)
                sets.push_back(read_predictions(f));
            for (const auto& r : scope)
                if (!sets.front().scores.contains(r.id))
                    throw Error(Errc::coverage_mismatch,
                                "prediction file " + files.front().string() + " has no score for meme " +
                                    std::to_string(r.id));
            return sets;
        }

        // A fold model trained on every pseudo-labeled meme outside its
        // validation fold; only those memes get the pseudo-label boost.
        std::unordered_map<MemeId, std::size_t> merged_index;
        for (std::size_t i = 0; i < merged.size(); ++i)
            merged_index.emplace(merged[i].id, i);
        std::vector<PseudoLabelSet> seen(cfg.k);
        for (std::size_t f = 0; f < cfg.k; ++f) {
            const auto& val = plan.folds[f].validation;
            const std::set<std::size_t> held_out(val.begin(), val.end());
            for (const auto& [id, pl] : pseudo.labels)
                if (!held_out.contains(merged_index.at(id)))
                    seen[f].labels.emplace(id, pl);
        }

        std::vector<MemeRecord> labeled;
        for (auto r : scope) {
            const auto it = truth.find(r.id);
            if (it == truth.end())
                throw Error(Errc::missing_field, "simulation needs a true label for meme " + std::to_string(r.id) +
                                                     " (pass a truth manifest)");
            r.label = it->second;
            labeled.push_back(std::move(r));
        }
        std::vector<MemeRecord> all_labeled;
        for (auto r : records)
            if (const auto it = truth.find(r.id); it != truth.end()) {
                r.label = it->second;
                all_labeled.push_back(std::move(r));
            }
        auto difficulty_groups = groups;
        for (auto& g : detect_unimodal_hate(all_labeled, assignment))
            difficulty_groups.push_back(std::move(g));

        std::vector<SimulationJob> jobs;
        for (std::size_t m = 0; m < cfg.models; ++m)
            for (std::size_t f = 0; f < cfg.k; ++f)
                jobs.push_back({static_cast<int>(m * cfg.k + f), cfg.pseudo_labels ? &seen[f] : nullptr});
        sets = simulate_batch(labeled, difficulty_groups, cfg.sim, jobs);

        std::filesystem::create_directories(out / "preds");
        for (std::size_t m = 0; m < cfg.models; ++m)
            for (std::size_t f = 0; f < cfg.k; ++f) {
                auto& s = sets[m * cfg.k + f];
                s.model_id = "model" + std::to_string(m) + "_fold" + std::to_string(f);
                write_predictions(s, artifact("preds/" + s.model_id + ".csv"));
            }
        return sets;
    });

    const bool scored = std::all_of(scope.begin(), scope.end(), [&](const MemeRecord& r) { return truth.contains(r.id); });
    if (scored)
        for (const auto& s : base)
            result.base_auroc.emplace_back(s.model_id, auroc(s.scores, truth));

    auto adjusted = run_stage("adjust-before-stacking", log, [&] {
        if (cfg.rule2 != AdjustPlacement::before_stacking)
            return base;
        std::filesystem::create_directories(out / "preds_adjusted");
        std::vector<PredictionSet> adj;
        for (const auto& s : base) {
            adj.push_back(apply_rule2(groups, s, cfg.hi, cfg.lo));
            write_predictions(adj.back(), artifact("preds_adjusted/" + s.model_id + ".csv"));
        }
        return adj;
    });

    auto final_scores = run_stage("stack", log, [&] {
        const auto stacked = stack_equal_weight(adjusted);
        write_submission(stacked, artifact("stacked.csv"));
        return as_prediction_set(stacked);
    });
    const auto source_count = adjusted.size();

    final_scores = run_stage("adjust-after-stacking", log, [&] {
        return cfg.rule2 == AdjustPlacement::after_stacking ? apply_rule2(groups, final_scores, cfg.hi, cfg.lo)
                                                             : final_scores;
    });
    final_scores = run_stage("rule1", log, [&] { return cfg.rule1 ? apply_rule1(groups, final_scores) : final_scores; });
    final_scores = run_stage("unimodal", log, [&] {
        return cfg.unimodal ? apply_unimodal_signatures(signatures, assignment, final_scores) : final_scores;
    });

    const auto submission = run_stage("threshold", log, [&] {
        auto s = threshold_scores(final_scores.scores, source_count);
        result.submission = artifact("submission.csv");
        write_submission(s, result.submission);
        return s;
    });

    run_stage("evaluate", log, [&] {
        if (!scored)
            return;
        result.report = evaluate(submission.mean_score, submission.label, truth);
        std::string text = format_report(*result.report);
        text += "base models:\n";
        for (const auto& [id, a] : result.base_auroc) {
            char line[128];
            std::snprintf(line, sizeof line, "  %-16s AUROC %.4f\n", id.c_str(), a);
            text += line;
        }
        write_text(artifact("report.txt"), text);
    });

    run_stage("run-manifest", log, [&] {
        nlohmann::ordered_json j;
        nlohmann::ordered_json c;
        for (const auto& [k, v] : config_entries(config))
            c[k] = v;
        j["config"] = c;
        nlohmann::ordered_json d;
        std::sort(artifacts.begin(), artifacts.end());
        for (const auto& rel : artifacts) {
            const auto digest = fnv1a_digest(out / rel);
            d[rel] = digest;
            result.digests[rel] = digest;
        }
        j["artifacts"] = d;
        write_text(out / "run.json", j.dump(2) + "\n");
    });
    return result;
}

} // namespace memeconf
