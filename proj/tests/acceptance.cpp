// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include "memeconf/clustering.hpp"
#include "memeconf/dataset.hpp"
#include "memeconf/metrics.hpp"
#include "memeconf/phash.hpp"
#include "memeconf/pipeline.hpp"
#include "memeconf/rng.hpp"
#include "memeconf/rules.hpp"
#include "memeconf/tuples.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

namespace fs = std::filesystem;
using namespace memeconf;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

fs::path scratch_root()
{
    static const fs::path root = [] {
        auto p = fs::temp_directory_path() / ("memeconf_acceptance_" + std::to_string(::getpid()));
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return root;
}

// ---------------------------------------------------------------------------

Outcome auroc_oracle()
{
    const auto t0 = Clock::now();
    Rng rng(20240601);
    double worst_rank = 0.0, worst_trap = 0.0;
    int instances = 0;
    while (instances < 500) {
        const std::size_t n = 5 + rng.below(196);
        const std::uint64_t levels = 2 + rng.below(n); // few levels -> many ties
        std::vector<double> scores(n);
        std::vector<int> labels(n);
        for (std::size_t i = 0; i < n; ++i) {
            scores[i] = double(rng.below(levels)) / double(levels);
            labels[i] = rng.bernoulli(0.5) ? 1 : 0;
        }
        const auto pos = std::count(labels.begin(), labels.end(), 1);
        if (pos == 0 || pos == static_cast<long>(n))
            continue;
        ++instances;
        const double a = auroc(scores, labels);
        worst_rank = std::max(worst_rank, std::abs(a - oracle::auroc_pairs(scores, labels)));
        worst_trap = std::max(worst_trap, std::abs(a - trapezoid_area(roc_curve(scores, labels))));
    }
    const double t = seconds_since(t0);
    return {worst_rank <= 1e-12 && worst_trap <= 1e-12 && t < 10.0,
            fmt("500 instances, max |rank-pairs| %.2e, max |rank-trapezoid| %.2e, %.2fs", worst_rank, worst_trap, t)};
}

Outcome clustering_oracle()
{
    const auto t0 = Clock::now();
    Rng rng(777);
    int mismatches = 0, checks = 0;
    for (int set = 0; set < 50; ++set) {
        const std::size_t n = 1 + rng.below(200);
        // Noisy copies of a few centers so components of every size appear.
        std::vector<std::uint64_t> centers(1 + rng.below(n / 4 + 1));
        for (auto& c : centers)
            c = rng.next();
        std::vector<HashEntry> entries;
        std::vector<MemeId> ids(n);
        for (std::size_t i = 0; i < n; ++i)
            ids[i] = 1000 + i;
        rng.shuffle(ids);
        for (std::size_t i = 0; i < n; ++i) {
            auto bits = centers[rng.below(centers.size())];
            const auto flips = rng.below(20);
            for (std::uint64_t f = 0; f < flips; ++f)
                bits ^= std::uint64_t{1} << rng.below(64);
            entries.push_back({ids[i], PerceptualHash{bits}});
        }
        for (int threshold : {0, 5, 10, 16}) {
            ++checks;
            if (cluster_images(entries, threshold) != oracle::closure_partition(entries, threshold))
                ++mismatches;
        }
    }
    const double t = seconds_since(t0);
    return {mismatches == 0 && t < 30.0, fmt("%d/%d partitions equal the closure oracle, %.2fs", checks - mismatches,
                                             checks, t)};
}

Outcome phash_invariance()
{
    Rng rng(4242);
    int failures = 0, self = 0;
    for (int i = 0; i < 200; ++i) {
        const auto img = synthetic_image(rng.next(), 64);
        const double a = rng.uniform(0.1, 10.0);
        const double b = rng.uniform(-50.0, 50.0);
        auto shifted = img;
        for (double& v : shifted.data)
            v = a * v + b;
        const auto h = phash(img);
        failures += phash(shifted) != h;
        self += hamming(h, h) != 0;
    }
    return {failures == 0 && self == 0,
            fmt("%d/200 hashes unchanged under a*p+b, %d nonzero self-distances", 200 - failures, self)};
}

std::set<ConstructedTriple> detected_triples(const GeneratedDataset& data)
{
    const auto hashes = hash_images(data.images);
    std::vector<HashEntry> entries;
    for (std::size_t i = 0; i < data.records.size(); ++i)
        entries.push_back({data.records[i].id, hashes[i]});
    const auto assignment = assign_clusters(data.records, entries, kDefaultHammingThreshold);
    std::set<ConstructedTriple> out;
    for (const auto& g : detect_tuples(data.records, assignment))
        if (const auto* t = std::get_if<ThreeTuple>(&g))
            out.insert({t->pivot, t->image_partner, t->text_partner});
    return out;
}

Outcome tuple_recovery()
{
    GeneratorOptions clean;
    clean.n = 1000;
    clean.seed = 11;
    clean.noise = {0.0, 0.0, 0.0};
    const auto a = generate_dataset(clean);
    const std::set<ConstructedTriple> truth_a(a.triples.begin(), a.triples.end());
    const bool exact = detected_triples(a) == truth_a;

    GeneratorOptions noisy;
    noisy.n = 1000;
    noisy.seed = 11;
    const auto b = generate_dataset(noisy);
    const auto found = detected_triples(b);
    std::size_t hit = 0;
    for (const auto& t : b.triples)
        hit += found.contains(t);
    const double recovery = double(hit) / double(b.triples.size());
    return {exact && recovery >= 0.95,
            fmt("zero noise: %s (%zu triples); default noise recovery %.4f (%zu/%zu)", exact ? "set-equal" : "MISMATCH",
                truth_a.size(), recovery, hit, b.triples.size())};
}

double rule1_accuracy_on(const GeneratedDataset& data)
{
    const auto hashes = hash_images(data.images);
    std::vector<HashEntry> entries;
    for (std::size_t i = 0; i < data.records.size(); ++i)
        entries.push_back({data.records[i].id, hashes[i]});
    const auto assignment = assign_clusters(data.records, entries, kDefaultHammingThreshold);
    const auto pseudo = rule1_pseudo_labels(detect_tuples(data.records, assignment));
    std::map<MemeId, int> truth;
    for (const auto& r : data.records)
        truth[r.id] = *r.label;
    std::size_t correct = 0;
    for (const auto& [id, pl] : pseudo.labels)
        correct += pl.label == truth.at(id);
    return pseudo.labels.empty() ? 0.0 : double(correct) / double(pseudo.labels.size());
}

Outcome pseudo_label_accuracy()
{
    GeneratorOptions opt;
    opt.n = 2000;
    opt.seed = 5;
    opt.noise.label_noise = 0.0;
    const double clean = rule1_accuracy_on(generate_dataset(opt));

    double lo = 1.0, hi = 0.0, sum = 0.0;
    int in_band = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        opt.seed = seed;
        opt.noise.label_noise = 0.02;
        const double acc = rule1_accuracy_on(generate_dataset(opt));
        lo = std::min(lo, acc);
        hi = std::max(hi, acc);
        sum += acc;
        in_band += acc >= 0.96 && acc <= 1.0;
    }
    return {clean == 1.0 && in_band == 20,
            fmt("zero noise %.4f; 2%% noise mean %.4f, range [%.4f, %.4f], %d/20 seeds in [0.96, 1.0]", clean,
                sum / 20.0, lo, hi, in_band)};
}

// ---------------------------------------------------------------------------
// Criteria 6-8 share simulated end-to-end runs.

struct SeedRun {
    PipelineResult baseline, full, after;
};

PipelineConfig run_config(const fs::path& data_dir, const fs::path& outdir, std::uint64_t seed)
{
    PipelineConfig cfg;
    cfg.manifest = data_dir / "manifest.jsonl";
    cfg.truth = data_dir / "truth.jsonl";
    cfg.outdir = outdir;
    cfg.seed = seed;
    return cfg;
}

fs::path write_corpus(std::uint64_t seed, double triple_overlap, const std::string& tag)
{
    GeneratorOptions opt;
    opt.n = 2000;
    opt.seed = seed;
    opt.triple_overlap = triple_overlap;
    const auto dir = scratch_root() / (tag + std::to_string(seed)) / "data";
    write_dataset(generate_dataset(opt), dir);
    return dir;
}

std::vector<SeedRun>& default_runs(double* elapsed = nullptr)
{
    static double took = 0.0;
    static std::vector<SeedRun> runs = [] {
        const auto t0 = Clock::now();
        std::vector<SeedRun> out;
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            const auto data = write_corpus(seed, 1.0, "default");
            const auto root = data.parent_path();
            SeedRun r;
            auto base = run_config(data, root / "baseline", seed);
            base.rule1 = false;
            base.pseudo_labels = false;
            base.rule2 = AdjustPlacement::off;
            r.baseline = run_pipeline(base);
            r.full = run_pipeline(run_config(data, root / "full", seed));
            out.push_back(std::move(r));
        }
        took = seconds_since(t0);
        return out;
    }();
    if (elapsed)
        *elapsed = took;
    return runs;
}

Outcome end_to_end_uplift()
{
    double elapsed = 0.0;
    const auto& runs = default_runs(&elapsed);
    double base_sum = 0.0, full_sum = 0.0, base_acc = 0.0, full_acc = 0.0;
    int uplift = 0;
    for (const auto& r : runs) {
        const auto& b = *r.baseline.report;
        const auto& f = *r.full.report;
        base_sum += b.auroc;
        full_sum += f.auroc;
        base_acc += b.accuracy;
        full_acc += f.accuracy;
        uplift += (f.auroc - b.auroc >= 0.10) && (f.accuracy - b.accuracy >= 0.10);
    }
    const double n = double(runs.size());
    const double base_mean = base_sum / n;
    const bool band = base_mean >= 0.70 && base_mean <= 0.75;
    return {band && uplift >= 18 && elapsed < 300.0,
            fmt("baseline AUROC %.4f (acc %.4f) -> full AUROC %.4f (acc %.4f); uplift >= 0.10 on both in %d/20 "
                "seeds; %.1fs",
                base_mean, base_acc / n, full_sum / n, full_acc / n, uplift, elapsed)};
}

Outcome adjustment_placement()
{
    int before_wins = 0;
    double before_sum = 0.0, after_sum = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        // Fewer 3-tuples leave genuine confounder pairs behind for rule 2.
        const auto data = write_corpus(seed, 0.75, "pairs");
        const auto root = data.parent_path();
        auto before = run_config(data, root / "before", seed);
        auto after = before;
        after.outdir = root / "after";
        after.rule2 = AdjustPlacement::after_stacking;
        const double b = run_pipeline(before).report->auroc;
        const double a = run_pipeline(after).report->auroc;
        before_sum += b;
        after_sum += a;
        before_wins += b >= a;
    }
    return {before_wins > 10, fmt("before >= after in %d/20 seeds (mean AUROC %.4f before, %.4f after)", before_wins,
                                  before_sum / 20.0, after_sum / 20.0)};
}

Outcome stacking_benefit()
{
    int wins = 0;
    double stacked = 0.0, single = 0.0;
    for (const auto& r : default_runs()) {
        double mean = 0.0;
        for (const auto& [id, a] : r.baseline.base_auroc)
            mean += a;
        mean /= double(r.baseline.base_auroc.size());
        stacked += r.baseline.report->auroc;
        single += mean;
        wins += r.baseline.report->auroc >= mean;
    }
    return {wins >= 18, fmt("stacked >= mean single-model AUROC in %d/20 seeds (%.4f vs %.4f)", wins, stacked / 20.0,
                            single / 20.0)};
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism()
{
    const auto root = scratch_root() / "determinism";
    fs::create_directories(root);
    {
        std::ofstream cfg(root / "run.conf");
        cfg << "n = 2000\nseed = 7\nk = 5\nmodels = 4\n";
    }
    std::vector<std::string> subs;
    for (const char* tag : {"a", "b"}) {
        const auto out = root / tag;
        const std::string cmd = std::string("\"") + MEMECONF_CLI + "\" pipeline --quiet --config \"" +
                                (root / "run.conf").string() + "\" --outdir \"" + out.string() + "\" > /dev/null";
        if (std::system(cmd.c_str()) != 0)
            return {false, "pipeline invocation failed: " + cmd};
        subs.push_back(slurp(out / "submission.csv"));
    }
    const bool same = !subs[0].empty() && subs[0] == subs[1];
    return {same, fmt("two CLI runs: submission files %s (%zu bytes)", same ? "byte-identical" : "DIFFER",
                      subs[0].size())};
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"AUROC oracle equivalence", auroc_oracle},
        {"clustering oracle equivalence", clustering_oracle},
        {"pHash affine invariance", phash_invariance},
        {"tuple recovery", tuple_recovery},
        {"rule-1 pseudo-label accuracy", pseudo_label_accuracy},
        {"end-to-end uplift", end_to_end_uplift},
        {"adjustment placement", adjustment_placement},
        {"stacking benefit", stacking_benefit},
        {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("criterion %zu %-30s %s  %s\n", i + 1, criteria[i].first.c_str(), o.pass ? "PASS" : "FAIL",
                    o.detail.c_str());
        std::fflush(stdout);
    }
    fs::remove_all(scratch_root());
    return failed == 0 ? 0 : 1;
}
