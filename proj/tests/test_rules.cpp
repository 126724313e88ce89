#include "memeconf/error.hpp"
#include "memeconf/rules.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace memeconf;
namespace fs = std::filesystem;

namespace {

PredictionSet preds(std::map<MemeId, double> scores)
{
    return PredictionSet{"m", std::move(scores)};
}

} // namespace

TEST_CASE("rule 1 overrides 3-tuple scores")
{
    const std::vector<TupleGroup> one{ThreeTuple{1, 2, 3}};
    const auto out = apply_rule1(one, preds({{1, 0.4}, {2, 0.8}, {3, 0.6}, {4, 0.55}}));
    CHECK(out.scores == std::map<MemeId, double>{{1, 1.0}, {2, 0.0}, {3, 0.0}, {4, 0.55}});

    const auto p = preds({{1, 0.3}, {2, 0.7}});
    CHECK(apply_rule1(std::vector<TupleGroup>{TwoTuple{1, 2, Modality::image}}, p) == p);
    CHECK(apply_rule1(std::vector<TupleGroup>{}, p) == p);

    CHECK_THROWS_AS(apply_rule1(one, preds({{1, 0.4}, {2, 0.8}})), Error);
}

TEST_CASE("rule 1 on disjoint tuples is order independent and idempotent")
{
    std::vector<TupleGroup> groups{ThreeTuple{1, 2, 3}, ThreeTuple{6, 5, 4}};
    const auto p = preds({{1, 0.1}, {2, 0.9}, {3, 0.5}, {4, 0.9}, {5, 0.2}, {6, 0.3}});
    const auto a = apply_rule1(groups, p);
    CHECK(a.scores == std::map<MemeId, double>{{1, 1}, {2, 0}, {3, 0}, {4, 0}, {5, 0}, {6, 1}});
    std::swap(groups[0], groups[1]);
    CHECK(apply_rule1(groups, p) == a);
    CHECK(apply_rule1(groups, a) == a);
}

TEST_CASE("rule 1 pseudo labels")
{
    const std::vector<TupleGroup> groups{ThreeTuple{1, 2, 3}, TwoTuple{4, 5, Modality::text}};
    const auto labels = rule1_pseudo_labels(groups);
    REQUIRE(labels.labels.size() == 3);
    CHECK(labels.labels.at(1) == PseudoLabel{1, "rule1"});
    CHECK(labels.labels.at(2).label == 0);
    CHECK(labels.labels.at(3).label == 0);
    CHECK(rule1_pseudo_labels(std::vector<TupleGroup>{}).labels.empty());
}

TEST_CASE("rule 2 pushes the higher-scored member up")
{
    const std::vector<TupleGroup> g{TwoTuple{1, 2, Modality::image}};
    CHECK(apply_rule2(g, preds({{1, 0.7}, {2, 0.6}})).scores == std::map<MemeId, double>{{1, 1.0}, {2, 0.0}});
    CHECK(apply_rule2(g, preds({{1, 0.2}, {2, 0.9}})).scores == std::map<MemeId, double>{{1, 0.0}, {2, 1.0}});
    CHECK(apply_rule2(g, preds({{1, 0.5}, {2, 0.5}})).scores == std::map<MemeId, double>{{1, 0.5}, {2, 0.5}});
    CHECK(apply_rule2(g, preds({{1, 0.7}, {2, 0.6}}), 0.9, 0.1).scores ==
          std::map<MemeId, double>{{1, 0.9}, {2, 0.1}});

    const auto once = apply_rule2(g, preds({{1, 0.3}, {2, 0.4}}));
    CHECK(apply_rule2(g, once) == once);

    CHECK_THROWS_AS(apply_rule2(g, preds({{1, 0.7}, {2, 0.6}}), 0.4, 0.6), Error);
    CHECK_THROWS_AS(apply_rule2(g, preds({{1, 0.7}})), Error);
}

TEST_CASE("unimodal signatures")
{
    const ClusterAssignment clusters{{1, {10, 20}}, {2, {11, 21}}, {3, {12, 22}}};
    const std::vector<TupleGroup> sig{UnimodalHate{Modality::image, 10, {90, 91}},
                                      UnimodalHate{Modality::text, 22, {92, 93}}, ThreeTuple{1, 2, 3}};
    const auto out = apply_unimodal_signatures(sig, clusters, preds({{1, 0.3}, {2, 0.4}, {3, 0.2}}));
    CHECK(out.scores == std::map<MemeId, double>{{1, 1.0}, {2, 0.4}, {3, 1.0}});

    const auto p = preds({{2, 0.4}});
    CHECK(apply_unimodal_signatures(sig, clusters, p) == p);
}

TEST_CASE("merging pseudo labels into train")
{
    const std::vector<MemeRecord> train{{1, "a", "x", 1, Split::train}, {2, "b", "y", 0, Split::train}};
    const std::vector<MemeRecord> test{{5, "c", "z", std::nullopt, Split::test},
                                       {6, "d", "w", std::nullopt, Split::test},
                                       {7, "e", "v", std::nullopt, Split::test}};
    CHECK(merge_pseudo_labels(train, PseudoLabelSet{}, test) == train);

    PseudoLabelSet p;
    p.labels = {{5, {1, "rule1"}}, {6, {0, "rule1"}}, {7, {0, "rule1"}}};
    const auto merged = merge_pseudo_labels(train, p, test);
    REQUIRE(merged.size() == 5);
    for (const auto& r : merged) {
        CHECK(r.label.has_value());
        CHECK(r.split == Split::train);
    }
    CHECK(merged[2].label == 1);

    p.labels[1] = {1, "rule1"};
    CHECK_THROWS_AS(merge_pseudo_labels(train, p, test), Error);
    p.labels.erase(1);
    p.labels[99] = {1, "rule1"};
    CHECK_THROWS_AS(merge_pseudo_labels(train, p, test), Error);
}

TEST_CASE("pseudo label file round trip")
{
    PseudoLabelSet p;
    p.labels = {{3, {1, "rule1"}}, {8, {0, "rule1"}}};
    const auto path = fs::temp_directory_path() / "memeconf_test_pseudo.csv";
    write_pseudo_labels(p, path);
    CHECK(read_pseudo_labels(path) == p);
    {
        std::ofstream out(path);
        out << "id,label,provenance\n3,2,rule1\n";
    }
    CHECK_THROWS_AS(read_pseudo_labels(path), Error);
    fs::remove(path);
}
