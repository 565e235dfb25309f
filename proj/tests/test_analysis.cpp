#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "ethica/analysis.hpp"
#include "ethica/error.hpp"
#include "helpers.hpp"

using namespace ethica;
using namespace testutil;

namespace {

// Independent contingency-table chi-square oracle over rendered values.
double oracle_cramers_v(const Table& t, const std::string& ca, const std::string& cb) {
    std::size_t ia = t.column_index(ca), ib = t.column_index(cb);
    std::map<std::pair<std::string, std::string>, double> obs;
    std::map<std::string, double> ra, cbm;
    double n = 0;
    for (const auto& row : t.rows) {
        std::string a = value_to_string(row[ia]);
        std::string b = value_to_string(row[ib]);
        obs[{a, b}] += 1;
        ra[a] += 1;
        cbm[b] += 1;
        n += 1;
    }
    if (ra.size() < 2 || cbm.size() < 2) return 0.0;
    double chi2 = 0;
    for (const auto& [a, na] : ra)
        for (const auto& [b, nb] : cbm) {
            double e = na * nb / n;
            double o = obs.count({a, b}) ? obs[{a, b}] : 0.0;
            chi2 += (o - e) * (o - e) / e;
        }
    return std::sqrt(chi2 / n / static_cast<double>(std::min(ra.size(), cbm.size()) - 1));
}

Table managers_table() {
    std::vector<std::vector<std::string>> rows;
    for (int i = 0; i < 10; ++i) rows.push_back({"m"});
    for (int i = 0; i < 2; ++i) rows.push_back({"f"});
    return make_table("managers", {{"Gender", "text"}}, rows);
}

}  // namespace

TEST_CASE("group_cardinalities counts each distinct value") {
    GroupProfile p = group_cardinalities(managers_table(), "Gender");
    REQUIRE(p.groups.size() == 2);
    CHECK(p.groups[0] == std::pair<std::string, std::size_t>{"m", 10});
    CHECK(p.groups[1] == std::pair<std::string, std::size_t>{"f", 2});
    CHECK(p.total() == 12);
}

TEST_CASE("group_cardinalities of empty and singleton tables") {
    Table empty = make_table("t", {{"g", "text"}}, {});
    CHECK(group_cardinalities(empty, "g").groups.empty());
    Table one = make_table("t", {{"g", "text"}}, {{"x"}});
    GroupProfile p = group_cardinalities(one, "g");
    REQUIRE(p.groups.size() == 1);
    CHECK(p.groups[0].second == 1);
    CHECK_THROWS_AS(group_cardinalities(one, "nope"), Error);
}

TEST_CASE("group cardinalities always sum to the row count") {
    std::mt19937 rng(31337);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<std::vector<std::string>> rows(rng() % 60);
        for (auto& r : rows)
            r.push_back(rng() % 7 == 0 ? "\\N" : std::string(1, 'a' + rng() % 4));
        Table t = make_table("t", {{"g", "text"}}, rows);
        CHECK(group_cardinalities(t, "g").total() == t.row_count());
    }
}

TEST_CASE("disparity flags {m:10, f:2} at the four-fifths threshold") {
    DisparityReport r = disparity(group_cardinalities(managers_table(), "Gender"), 0.8);
    CHECK(r.ratio == doctest::Approx(0.2));
    CHECK(r.flagged);
    CHECK(r.min_group.first == "f");
    CHECK(r.max_group.first == "m");
}

TEST_CASE("disparity does not flag balance or single groups") {
    GroupProfile balanced{"g", {{"m", 5}, {"f", 5}}};
    DisparityReport r = disparity(balanced, 0.8);
    CHECK(r.ratio == doctest::Approx(1.0));
    CHECK_FALSE(r.flagged);

    GroupProfile single{"g", {{"m", 7}}};
    CHECK_FALSE(disparity(single, 0.999).flagged);
    CHECK_FALSE(disparity(GroupProfile{"g", {}}, 0.8).flagged);
    CHECK_THROWS_AS(disparity(balanced, 0.0), Error);
    CHECK_THROWS_AS(disparity(balanced, 1.5), Error);
}

TEST_CASE("disparity is monotone in the threshold") {
    std::mt19937 rng(555);
    for (int trial = 0; trial < 50; ++trial) {
        GroupProfile p{"g",
                       {{"a", 1 + rng() % 50}, {"b", 1 + rng() % 50}, {"c", 1 + rng() % 50}}};
        double tau = 0.05 + 0.9 * (rng() % 100) / 100.0;
        double tau2 = tau + (1.0 - tau) * 0.5;
        if (disparity(p, tau).flagged) CHECK(disparity(p, tau2).flagged);
    }
}

TEST_CASE("Cramér's V of a column with itself is 1; constant column is 0") {
    Table t = make_table("t", {{"a", "text"}, {"b", "text"}, {"k", "text"}},
                         {{"x", "x", "c"}, {"y", "y", "c"}, {"x", "x", "c"}, {"z", "z", "c"}});
    CHECK(cramers_v(t, "a", "a") == doctest::Approx(1.0));
    CHECK(cramers_v(t, "a", "b") == doctest::Approx(1.0));  // bijective renaming
    CHECK(cramers_v(t, "a", "k") == doctest::Approx(0.0));
    CHECK_THROWS_AS(cramers_v(make_table("t", {{"a", "text"}}, {{"x"}}), "a", "a"), Error);
}

TEST_CASE("Cramér's V is 0 under exact independence (balanced 2x2)") {
    Table t = make_table("t", {{"g", "text"}, {"d", "text"}},
                         {{"m", "it"}, {"m", "hr"}, {"f", "it"}, {"f", "hr"}});
    CHECK(cramers_v(t, "g", "d") == doctest::Approx(0.0));
}

TEST_CASE("Cramér's V matches the contingency-table oracle") {
    std::mt19937 rng(2025);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<std::vector<std::string>> rows(10 + rng() % 40);
        for (auto& r : rows) {
            std::string g = rng() % 3 ? "m" : "f";
            std::string d = std::string(1, 'p' + rng() % 3);
            r = {g, d};
        }
        Table t = make_table("t", {{"g", "text"}, {"d", "text"}}, rows);
        double got = cramers_v(t, "g", "d");
        double want = oracle_cramers_v(t, "g", "d");
        CHECK(got == doctest::Approx(want).epsilon(1e-9));
        // categorical association is symmetric
        CHECK(cramers_v(t, "d", "g") == doctest::Approx(got).epsilon(1e-9));
    }
}

TEST_CASE("pregnancy-count perfectly separates gender (20-row oracle check)") {
    std::vector<std::vector<std::string>> rows;
    for (int i = 0; i < 13; ++i) rows.push_back({"m", "0"});
    for (int i = 0; i < 7; ++i) rows.push_back({"f", std::to_string(1 + i % 2)});
    Table t = make_table("t", {{"Gender", "text"}, {"PregCount", "integer"}}, rows);
    double got = cramers_v(t, "Gender", "PregCount");
    CHECK(got == doctest::Approx(oracle_cramers_v(t, "Gender", "PregCount")).epsilon(1e-9));
    CHECK(got == doctest::Approx(1.0));

    auto scores = correlated_columns(t, "Gender", 0.5);
    REQUIRE(scores.size() == 1);
    CHECK(scores[0].column_b == "PregCount");
    CHECK(scores[0].value >= 0.5);
}

TEST_CASE("correlation ratio separates group means") {
    // disjoint group supports: eta = 1
    Table t = make_table("t", {{"g", "text"}, {"y", "decimal"}},
                         {{"m", "1.0"}, {"m", "1.0"}, {"f", "9.0"}, {"f", "9.0"}});
    CHECK(correlation_ratio(t, "g", "y") == doctest::Approx(1.0));
    // identical distributions: eta = 0
    Table u = make_table("t", {{"g", "text"}, {"y", "decimal"}},
                         {{"m", "1.0"}, {"m", "2.0"}, {"f", "1.0"}, {"f", "2.0"}});
    CHECK(correlation_ratio(u, "g", "y") == doctest::Approx(0.0));
    // constant numeric: eta = 0
    Table v = make_table("t", {{"g", "text"}, {"y", "decimal"}},
                         {{"m", "3.0"}, {"f", "3.0"}});
    CHECK(correlation_ratio(v, "g", "y") == doctest::Approx(0.0));
}

TEST_CASE("correlated_columns sorts descending and honors the threshold") {
    std::vector<std::vector<std::string>> rows;
    std::mt19937 rng(99);
    for (int i = 0; i < 40; ++i) {
        std::string g = i % 2 ? "m" : "f";
        std::string copy = g == "m" ? "1" : "0";             // V = 1
        std::string noise = std::string(1, 'a' + rng() % 3); // V near 0
        rows.push_back({g, copy, noise});
    }
    Table t = make_table("t", {{"g", "text"}, {"coded", "integer"}, {"noise", "text"}},
                         rows);
    auto scores = correlated_columns(t, "g", 0.5);
    REQUIRE(scores.size() == 1);
    CHECK(scores[0].column_b == "coded");
    CHECK(scores[0].value == doctest::Approx(1.0));
    for (std::size_t i = 1; i < scores.size(); ++i)
        CHECK(scores[i - 1].value >= scores[i].value);

    CHECK_THROWS_AS(correlated_columns(t, "nope", 0.5), Error);
    Table tiny = make_table("t", {{"g", "text"}}, {{"m"}});
    CHECK_THROWS_AS(correlated_columns(tiny, "g", 0.5), Error);
}

TEST_CASE("association scores stay within [0,1] on random data") {
    std::mt19937 rng(321);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::vector<std::string>> rows(5 + rng() % 50);
        for (auto& r : rows) {
            r = {rng() % 2 ? "m" : "f",
                 std::to_string(rng() % 100) + "." + std::to_string(rng() % 10),
                 std::string(1, 'a' + rng() % 5)};
        }
        Table t = make_table(
            "t", {{"g", "text"}, {"y", "decimal"}, {"c", "text"}}, rows);
        for (const auto& s : correlated_columns(t, "g", 0.0)) {
            CHECK(s.value >= 0.0);
            CHECK(s.value <= 1.0);
        }
    }
}
