#include "memeconf/rules.hpp"

#include "memeconf/error.hpp"
#include "textio.hpp"

#include <set>
#include <unordered_map>
#include <unordered_set>

namespace memeconf {

namespace {

double& score_of(PredictionSet& preds, MemeId id)
{
    const auto it = preds.scores.find(id);
    if (it == preds.scores.end())
        throw Error(Errc::missing_id, "no prediction for tuple member " + std::to_string(id));
    return it->second;
}

} // namespace

PredictionSet apply_rule1(std::span<const TupleGroup> groups, const PredictionSet& preds)
{
    PredictionSet out = preds;
    for (const auto& g : groups)
        if (const auto* t = std::get_if<ThreeTuple>(&g)) {
            score_of(out, t->pivot) = 1.0;
            score_of(out, t->image_partner) = 0.0;
            score_of(out, t->text_partner) = 0.0;
        }
    return out;
}

PseudoLabelSet rule1_pseudo_labels(std::span<const TupleGroup> groups)
{
    PseudoLabelSet out;
    for (const auto& g : groups)
        if (const auto* t = std::get_if<ThreeTuple>(&g)) {
            out.labels[t->pivot] = {1, "rule1"};
            out.labels[t->image_partner] = {0, "rule1"};
            out.labels[t->text_partner] = {0, "rule1"};
        }
    return out;
}

PredictionSet apply_rule2(std::span<const TupleGroup> groups, const PredictionSet& preds, double hi, double lo)
{
    if (!(lo >= 0.0 && lo < hi && hi <= 1.0))
        throw Error(Errc::invalid_argument, "rule 2 needs 0 <= lo < hi <= 1");
    PredictionSet out = preds;
    for (const auto& g : groups)
        if (const auto* t = std::get_if<TwoTuple>(&g)) {
            double& a = score_of(out, t->a);
            double& b = score_of(out, t->b);
            if (a > b) {
                a = hi;
                b = lo;
            } else if (b > a) {
                a = lo;
                b = hi;
            }
        }
    return out;
}

PredictionSet apply_unimodal_signatures(std::span<const TupleGroup> signatures, const ClusterAssignment& assignment,
                                        const PredictionSet& preds)
{
    std::set<MemeId> image_sigs, text_sigs;
    for (const auto& g : signatures)
        if (const auto* u = std::get_if<UnimodalHate>(&g))
            (u->modality == Modality::image ? image_sigs : text_sigs).insert(u->cluster);

    PredictionSet out = preds;
    for (auto& [id, score] : out.scores) {
        const auto it = assignment.find(id);
        if (it == assignment.end())
            continue;
        if (image_sigs.contains(it->second.image) || text_sigs.contains(it->second.text))
            score = 1.0;
    }
    return out;
}

std::vector<MemeRecord> merge_pseudo_labels(std::span<const MemeRecord> train, const PseudoLabelSet& pseudo,
                                            std::span<const MemeRecord> test)
{
    std::vector<MemeRecord> out(train.begin(), train.end());
    std::unordered_set<MemeId> train_ids;
    for (const auto& r : train)
        train_ids.insert(r.id);
    std::unordered_map<MemeId, const MemeRecord*> test_by_id;
    for (const auto& r : test)
        test_by_id.emplace(r.id, &r);

    for (const auto& [id, pl] : pseudo.labels) {
        if (train_ids.contains(id))
            throw Error(Errc::duplicate_id, "pseudo-labeled meme " + std::to_string(id) + " is already in train");
        const auto it = test_by_id.find(id);
        if (it == test_by_id.end())
            throw Error(Errc::missing_id, "pseudo-labeled meme " + std::to_string(id) + " is not in the test records");
        MemeRecord r = *it->second;
        r.label = pl.label;
        r.split = Split::train;
        out.push_back(std::move(r));
    }
    return out;
}

void write_pseudo_labels(const PseudoLabelSet& pseudo, const std::filesystem::path& path)
{
    auto out = textio::open_out(path);
    out << "id,label,provenance\n";
    for (const auto& [id, pl] : pseudo.labels)
        out << id << ',' << pl.label << ',' << pl.provenance << '\n';
    textio::finish(out, path);
}

PseudoLabelSet read_pseudo_labels(const std::filesystem::path& path)
{
    PseudoLabelSet out;
    bool header = true;
    textio::for_each_line(path, [&](const std::string& line, std::size_t, const std::string& where) {
        if (header) {
            if (line != "id,label,provenance")
                throw Error(Errc::parse, where + ": expected header 'id,label,provenance'");
            header = false;
            return;
        }
        const auto f = textio::split_csv(line);
        if (f.size() != 3)
            throw Error(Errc::parse, where + ": expected 'id,label,provenance'");
        const auto id = textio::parse_uint(f[0], where);
        const auto label = textio::parse_uint(f[1], where);
        if (label > 1)
            throw Error(Errc::parse, where + ": label must be 0 or 1");
        if (!out.labels.emplace(id, PseudoLabel{static_cast<int>(label), f[2]}).second)
            throw Error(Errc::duplicate_id, where + ": duplicate id " + f[0]);
    });
    return out;
}

} // namespace memeconf
