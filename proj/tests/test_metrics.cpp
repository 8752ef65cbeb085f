#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>
#include <random>

#include "fairaudit/metrics.hpp"
#include "helpers.hpp"

using namespace fairaudit;

TEST_CASE("classify applies per-subgroup cutoffs") {
    const std::vector<std::string> group = {"a", "a"};
    CutoffMap m = CutoffMap::uniform({"a"});
    SUBCASE("score at the cutoff is favorable") {
        const std::vector<double> s = {0.5, 0.49};
        CHECK(classify(s, group, m) == std::vector<int>{1, 0});
    }
    SUBCASE("different cutoffs per level") {
        const std::vector<std::string> g2 = {"a", "b"};
        CutoffMap m2;
        m2.set("a", 0.5);
        m2.set("b", 0.7);
        const std::vector<double> s = {0.6, 0.6};
        CHECK(classify(s, g2, m2) == std::vector<int>{1, 0});
    }
    SUBCASE("missing level") {
        const std::vector<std::string> g2 = {"a", "zz"};
        const std::vector<double> s = {0.6, 0.6};
        CHECK_THROWS_AS(classify(s, g2, m), std::runtime_error);
    }
}

TEST_CASE("confusion_by_subgroup counts the four cells") {
    const std::vector<int> y = {1, 0, 1, 0};
    const std::map<std::string, std::vector<std::size_t>> part = {{"a", {0, 1, 2, 3}}};
    SUBCASE("mixed outcomes") {
        const std::vector<int> pred = {1, 0, 0, 1};
        const auto c = confusion_by_subgroup(y, pred, part);
        CHECK(c.at("a") == ConfusionCounts{1, 1, 1, 1});
    }
    SUBCASE("perfect classifier has no FP or FN") {
        const auto c = confusion_by_subgroup(y, y, part);
        CHECK(c.at("a").fp == 0);
        CHECK(c.at("a").fn == 0);
        CHECK(c.at("a").tp == 2);
        CHECK(c.at("a").tn == 2);
    }
}

TEST_CASE("metric_from_counts follows the metric table") {
    SUBCASE("TPR") {
        CHECK(*metric_from_counts({1, 0, 0, 1}, MetricId::TPR) == 0.5);
    }
    SUBCASE("PPV undefined on a zero denominator") {
        ConfusionCounts c;
        c.tp = 0; c.fp = 0; c.tn = 3; c.fn = 2;
        CHECK_FALSE(metric_from_counts(c, MetricId::PPV).has_value());
    }
    SUBCASE("hand-evaluated quadruple") {
        const ConfusionCounts c{3, 1, 4, 2};  // tp fp tn fn
        CHECK(*metric_from_counts(c, MetricId::STP) == doctest::Approx(0.4).epsilon(1e-15));
        CHECK(*metric_from_counts(c, MetricId::ACC) == doctest::Approx(0.7).epsilon(1e-15));
        CHECK(*metric_from_counts(c, MetricId::TS) == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(*metric_from_counts(c, MetricId::TPR) == 0.6);
        CHECK(*metric_from_counts(c, MetricId::PPV) == 0.75);
        CHECK(*metric_from_counts(c, MetricId::F1) ==
              doctest::Approx(2 * 0.75 * 0.6 / (0.75 + 0.6)).epsilon(1e-15));
    }
    SUBCASE("F1 undefined when PPV+TPR is zero") {
        ConfusionCounts c;
        c.tp = 0; c.fp = 2; c.fn = 3; c.tn = 1;
        CHECK_FALSE(metric_from_counts(c, MetricId::F1).has_value());
    }
    SUBCASE("complement identities hold bitwise") {
        std::mt19937 rng(3);
        std::uniform_int_distribution<long long> u(0, 40);
        for (int i = 0; i < 500; ++i) {
            ConfusionCounts c{u(rng), u(rng), u(rng), u(rng)};
            if (c.total() == 0) continue;
            auto pair_of = [&](MetricId direct, MetricId complement) {
                const Maybe a = metric_from_counts(c, direct);
                const Maybe b = metric_from_counts(c, complement);
                CHECK(a.has_value() == b.has_value());
                if (a) CHECK(*b == 1.0 - *a);
            };
            pair_of(MetricId::TPR, MetricId::FNR);
            pair_of(MetricId::TNR, MetricId::FPR);
            pair_of(MetricId::PPV, MetricId::FDR);
            pair_of(MetricId::NPV, MetricId::FOR);
        }
    }
    SUBCASE("defined values lie in [0,1]") {
        std::mt19937 rng(4);
        std::uniform_int_distribution<long long> u(0, 12);
        for (int i = 0; i < 500; ++i) {
            ConfusionCounts c{u(rng), u(rng), u(rng), u(rng)};
            if (c.total() == 0) continue;
            for (MetricId id : kAllMetrics) {
                const Maybe v = metric_from_counts(c, id);
                if (v) {
                    CHECK(*v >= 0.0);
                    CHECK(*v <= 1.0);
                }
            }
        }
    }
}

namespace {

AuditDataset four_row_fixture() {
    // one subgroup 'a' with the hand confusion tp=1 fp=1 tn=1 fn=1, plus a
    // second subgroup 'b' with no positive labels
    AuditDataset d;
    d.label_name = "y";
    d.group_name = "g";
    d.y_true = {1, 0, 1, 0, 0, 0};
    d.group = {"a", "a", "a", "a", "b", "b"};
    d.scores.push_back({"lm", "score_lm", {0.9, 0.2, 0.3, 0.8, 0.9, 0.1}});
    return d;
}

}  // namespace

TEST_CASE("group_metric_table composes classify, confusion, and the formulas") {
    const AuditDataset d = four_row_fixture();
    const CutoffMap cutoffs = CutoffMap::uniform(d.levels());
    const GroupMetricTable t = group_metric_table(d, cutoffs);

    // subgroup a: pred = 1,0,0,1 -> tp=1 fp=1 tn=1 fn=1
    CHECK(*t.value("lm", "a", MetricId::TPR) == 0.5);
    CHECK(*t.value("lm", "a", MetricId::STP) == 0.5);
    CHECK(*t.value("lm", "a", MetricId::ACC) == 0.5);
    // subgroup b has no positives: TPR and FNR undefined
    CHECK_FALSE(t.value("lm", "b", MetricId::TPR).has_value());
    CHECK_FALSE(t.value("lm", "b", MetricId::FNR).has_value());
    CHECK(t.value("lm", "b", MetricId::FPR).has_value());

    SUBCASE("duplicated score columns give identical tables") {
        AuditDataset d2 = d;
        d2.scores.push_back({"copy", "score_copy", d.scores[0].values});
        const GroupMetricTable t2 = group_metric_table(d2, cutoffs);
        for (MetricId id : kAllMetrics)
            for (const auto& level : {"a", "b"})
                CHECK(t2.value("lm", level, id) == t2.value("copy", level, id));
    }
    SUBCASE("row permutation does not change the table") {
        AuditDataset p;
        p.label_name = d.label_name;
        p.group_name = d.group_name;
        const std::vector<std::size_t> perm = {5, 3, 0, 4, 2, 1};
        ScoreColumn sc{"lm", "score_lm", {}};
        for (std::size_t i : perm) {
            p.y_true.push_back(d.y_true[i]);
            p.group.push_back(d.group[i]);
            sc.values.push_back(d.scores[0].values[i]);
        }
        p.scores.push_back(sc);
        const GroupMetricTable tp = group_metric_table(p, cutoffs);
        for (MetricId id : kAllMetrics)
            for (const auto& level : {"a", "b"})
                CHECK(tp.value("lm", level, id) == t.value("lm", level, id));
    }
}

namespace {

GroupMetricTable hand_table(const std::map<std::string, std::map<MetricId, Maybe>>& values) {
    std::map<std::string, MetricArray> per_level;
    for (const auto& [level, metrics] : values) {
        MetricArray a;
        for (const auto& [id, v] : metrics) metric_slot(a, id) = v;
        per_level.emplace(level, a);
    }
    GroupMetricTable t;
    t.add_model("m", std::move(per_level));
    return t;
}

}  // namespace

TEST_CASE("metric_ratios") {
    const ProtectedSpec spec{"a", {"b"}};
    SUBCASE("division") {
        const auto t = hand_table({{"a", {{MetricId::STP, 0.5}}}, {"b", {{MetricId::STP, 0.4}}}});
        CHECK(*metric_ratios(t, "m", spec, MetricId::STP).at("b") == doctest::Approx(0.8).epsilon(1e-15));
    }
    SUBCASE("identity") {
        const auto t = hand_table({{"a", {{MetricId::TPR, 0.7}}}, {"b", {{MetricId::TPR, 0.7}}}});
        CHECK(*metric_ratios(t, "m", spec, MetricId::TPR).at("b") == 1.0);
    }
    SUBCASE("privileged zero is undefined") {
        const auto t = hand_table({{"a", {{MetricId::FPR, 0.0}}}, {"b", {{MetricId::FPR, 0.2}}}});
        CHECK_FALSE(metric_ratios(t, "m", spec, MetricId::FPR).at("b").has_value());
    }
    SUBCASE("undefined term is undefined") {
        const auto t = hand_table({{"a", {{MetricId::PPV, std::nullopt}}},
                                   {"b", {{MetricId::PPV, 0.2}}}});
        CHECK_FALSE(metric_ratios(t, "m", spec, MetricId::PPV).at("b").has_value());
    }
}

TEST_CASE("parity_loss") {
    SUBCASE("all subgroups equal gives zero") {
        const ProtectedSpec spec{"a", {"b"}};
        const auto t = hand_table({{"a", {{MetricId::STP, 0.6}}}, {"b", {{MetricId::STP, 0.6}}}});
        CHECK(*parity_loss(t, "m", spec, MetricId::STP) == 0.0);
    }
    SUBCASE("ratio one half") {
        const ProtectedSpec spec{"a", {"b"}};
        const auto t = hand_table({{"a", {{MetricId::STP, 0.8}}}, {"b", {{MetricId::STP, 0.4}}}});
        CHECK(*parity_loss(t, "m", spec, MetricId::STP) ==
              doctest::Approx(0.693147).epsilon(1e-6));
    }
    SUBCASE("three groups with ratios one half and two") {
        const ProtectedSpec spec{"a", {"b", "c"}};
        const auto t = hand_table({{"a", {{MetricId::STP, 0.4}}},
                                   {"b", {{MetricId::STP, 0.2}}},
                                   {"c", {{MetricId::STP, 0.8}}}});
        CHECK(*parity_loss(t, "m", spec, MetricId::STP) ==
              doctest::Approx(1.386294).epsilon(1e-6));
    }
    SUBCASE("zero ratio is undefined") {
        const ProtectedSpec spec{"a", {"b"}};
        const auto t = hand_table({{"a", {{MetricId::TPR, 0.5}}}, {"b", {{MetricId::TPR, 0.0}}}});
        CHECK_FALSE(parity_loss(t, "m", spec, MetricId::TPR).has_value());
    }
    SUBCASE("inversion symmetry within 1e-12") {
        std::mt19937 rng(5);
        std::uniform_real_distribution<double> u(0.05, 1.0);
        const ProtectedSpec ab{"a", {"b"}};
        const ProtectedSpec ba{"b", {"a"}};
        for (int i = 0; i < 200; ++i) {
            const double x = u(rng), y = u(rng);
            const auto t = hand_table({{"a", {{MetricId::STP, x}}}, {"b", {{MetricId::STP, y}}}});
            const double fwd = *parity_loss(t, "m", ab, MetricId::STP);
            const double rev = *parity_loss(t, "m", ba, MetricId::STP);
            CHECK(std::fabs(fwd - rev) <= 1e-12);
        }
    }
}
