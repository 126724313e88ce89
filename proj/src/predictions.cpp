#include "memeconf/predictions.hpp"

#include "memeconf/ensemble.hpp"
#include "textio.hpp"

#include <cmath>

namespace memeconf {

using namespace textio;

void validate_scores(const PredictionSet& preds)
{
    for (const auto& [id, s] : preds.scores)
        if (!(s >= 0.0 && s <= 1.0))
            throw Error(Errc::out_of_range, "score of meme " + std::to_string(id) + " outside [0, 1]");
}

namespace {

void expect_header(const std::string& line, const std::string& header, const std::string& where)
{
    if (line != header)
        throw Error(Errc::parse, where + ": expected header '" + header + "'");
}

double read_proba(const std::string& text, const std::string& where)
{
    const double p = parse_double(text, where);
    if (!(p >= 0.0 && p <= 1.0))
        throw Error(Errc::out_of_range, where + ": probability " + text + " outside [0, 1]");
    return p;
}

} // namespace

PredictionSet read_predictions(const std::filesystem::path& path)
{
    PredictionSet out;
    out.model_id = path.stem().string();
    bool header = true;
    for_each_line(path, [&](const std::string& line, std::size_t, const std::string& where) {
        if (header) {
            expect_header(line, "id,proba", where);
            header = false;
            return;
        }
        const auto f = split_csv(line);
        if (f.size() != 2)
            throw Error(Errc::parse, where + ": expected 'id,proba'");
        const auto id = parse_uint(f[0], where);
        if (!out.scores.emplace(id, read_proba(f[1], where)).second)
            throw Error(Errc::duplicate_id, where + ": duplicate id " + f[0]);
    });
    if (header)
        throw Error(Errc::parse, path.string() + ": empty prediction file");
    return out;
}

void write_predictions(const PredictionSet& preds, const std::filesystem::path& path)
{
    validate_scores(preds);
    auto out = open_out(path);
    out << "id,proba\n";
    for (const auto& [id, s] : preds.scores)
        out << id << ',' << format_double(s) << '\n';
    finish(out, path);
}

void write_submission(const StackedPrediction& stacked, const std::filesystem::path& path)
{
    auto out = open_out(path);
    out << "id,proba,label\n";
    for (const auto& [id, s] : stacked.mean_score) {
        if (!(s >= 0.0 && s <= 1.0))
            throw Error(Errc::out_of_range, "score of meme " + std::to_string(id) + " outside [0, 1]");
        out << id << ',' << format_double(s) << ',' << stacked.label.at(id) << '\n';
    }
    finish(out, path);
}

StackedPrediction read_submission(const std::filesystem::path& path)
{
    StackedPrediction out;
    bool header = true;
    for_each_line(path, [&](const std::string& line, std::size_t, const std::string& where) {
        if (header) {
            expect_header(line, "id,proba,label", where);
            header = false;
            return;
        }
        const auto f = split_csv(line);
        if (f.size() != 3)
            throw Error(Errc::parse, where + ": expected 'id,proba,label'");
        const auto id = parse_uint(f[0], where);
        const auto label = parse_uint(f[2], where);
        if (label > 1)
            throw Error(Errc::parse, where + ": label must be 0 or 1");
        if (!out.mean_score.emplace(id, read_proba(f[1], where)).second)
            throw Error(Errc::duplicate_id, where + ": duplicate id " + f[0]);
        out.label.emplace(id, static_cast<int>(label));
    });
    if (header)
        throw Error(Errc::parse, path.string() + ": empty submission file");
    return out;
}

} // namespace memeconf
