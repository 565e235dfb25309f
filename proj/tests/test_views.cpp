#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "ethica/error.hpp"
#include "ethica/views.hpp"
#include "helpers.hpp"

using namespace ethica;
using namespace testutil;

namespace {

std::string data_path(const std::string& rel) {
    return std::string(ETHICA_DATA_DIR) + "/" + rel;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

NodePtr desk_cdt() { return parse_tree(slurp(data_path("desk/cdt.tree"))); }

Database desk_db() {
    return load_database(data_path("desk"), data_path("desk/manifest.txt"));
}

}  // namespace

TEST_CASE("sha256_hex matches known vectors") {
    CHECK(sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("parse_registry reads the desk registry") {
    auto cdt = desk_cdt();
    auto reg = parse_registry(slurp(data_path("desk/views.reg")), *cdt);
    REQUIRE(reg.size() == 3);
    CHECK(reg[0].name == "promotion");
    CHECK(reg[0].pattern.elements.size() == 2);
    REQUIRE(reg[0].named_exprs.size() == 2);
    CHECK(reg[0].named_exprs[0].first == "E1");
    CHECK(reg[0].named_exprs[1].first == "E2");
    CHECK(reg[1].pattern.elements.size() == 1);
    CHECK(reg[2].name == "everything");
    CHECK(reg[2].pattern.empty());  // bare `when` is the catch-all
}

TEST_CASE("parse_registry rejects malformed input") {
    auto cdt = desk_cdt();
    CHECK_THROWS_AS(parse_registry("def E1 = PERSON\n", *cdt), Error);    // def before view
    CHECK_THROWS_AS(parse_registry("view v\nwhen role=pilot\n", *cdt), Error);
    CHECK_THROWS_AS(parse_registry("view v\nwhen\ndef X select(T)\n", *cdt), Error);
    CHECK_THROWS_AS(parse_registry("view v\nwhen\n", *cdt), Error);       // no defs
    CHECK_THROWS_AS(
        parse_registry("view v\nwhen\ndef A = T\ndef A = T\n", *cdt), Error);
}

TEST_CASE("match_binding picks the most specific containing pattern") {
    auto cdt = desk_cdt();
    auto reg = parse_registry(slurp(data_path("desk/views.reg")), *cdt);

    Context c = parse_context("action=promotion; role=clerk", *cdt);
    CHECK(match_binding(reg, c).name == "promotion");

    // extra elements in the context don't hurt containment
    Context wide =
        parse_context("action=promotion; role=clerk; institution=public", *cdt);
    CHECK(match_binding(reg, wide).name == "promotion");

    // pattern values must match exactly
    Context mgr = parse_context("action=promotion; role=manager", *cdt);
    CHECK(match_binding(reg, mgr).name == "everything");

    Context rec = parse_context("action=recruitment; role=clerk", *cdt);
    CHECK(match_binding(reg, rec).name == "recruitment");

    // the empty pattern matches any context, including the empty one
    CHECK(match_binding(reg, parse_context("", *cdt)).name == "everything");
}

TEST_CASE("match_binding without a catch-all errors on no match") {
    auto cdt = desk_cdt();
    auto reg = parse_registry(
        "view promo\nwhen action=promotion\ndef E = PERSON\n", *cdt);
    Context c = parse_context("action=dismissal", *cdt);
    CHECK_THROWS_AS(match_binding(reg, c), Error);
}

TEST_CASE("match_binding breaks specificity ties by registry order") {
    auto cdt = desk_cdt();
    auto reg = parse_registry(
        "view a\nwhen action=promotion\ndef E = PERSON\n"
        "view b\nwhen role=clerk\ndef E = PERSON\n",
        *cdt);
    Context c = parse_context("action=promotion; role=clerk", *cdt);
    CHECK(match_binding(reg, c).name == "a");
}

TEST_CASE("materialize evaluates every labeled expression") {
    auto cdt = desk_cdt();
    Database db = desk_db();
    auto reg = parse_registry(slurp(data_path("desk/views.reg")), *cdt);
    Context c = parse_context("action=promotion; role=clerk", *cdt);

    ContextualView cv = materialize(db, match_binding(reg, c), c);
    CHECK(cv.binding_name == "promotion");
    REQUIRE(cv.tables.size() == 2);
    CHECK(cv.table("E1").row_count() == 40);  // 30 male + 10 female clerks
    CHECK(cv.table("E2").row_count() == 12);  // 10 male + 2 female managers
    CHECK_THROWS_AS(cv.table("E9"), Error);

    // every view row's pID exists in the PERSON base table
    const Table& e1 = cv.table("E1");
    std::size_t pid = e1.column_index("pID");
    std::set<std::string> people;
    for (const auto& row : db.table("PERSON").rows)
        people.insert(value_to_string(row[0]));
    for (const auto& row : e1.rows)
        CHECK(people.count(value_to_string(row[pid])) == 1);
}

TEST_CASE("source_hash is stable and covers the referenced CSV bytes") {
    auto cdt = desk_cdt();
    Database db = desk_db();
    auto reg = parse_registry(slurp(data_path("desk/views.reg")), *cdt);
    Context c = parse_context("action=promotion; role=clerk", *cdt);

    ContextualView a = materialize(db, match_binding(reg, c), c);
    ContextualView b = materialize(db, match_binding(reg, c), c);
    CHECK(a.source_hash == b.source_hash);
    CHECK(a.source_hash.size() == 64);

    // the recruitment binding references the same two base tables, so it
    // must produce the same digest
    Context rec = parse_context("action=recruitment", *cdt);
    ContextualView r = materialize(db, match_binding(reg, rec), rec);
    CHECK(r.source_hash == a.source_hash);
}

TEST_CASE("materialize hashes in-memory tables through canonical CSV") {
    Table t = make_table("T", {{"a", "text"}, {"n", "integer"}},
                         {{"x", "1"}, {"y", "2"}});
    Database db = make_db({t});  // no csv_paths: falls back to rendered CSV
    auto cdt = parse_tree("root r\n  dim action\n    val promotion\n");
    auto reg = parse_registry("view v\nwhen\ndef E = select(T, n > 1)\n", *cdt);
    Context c = parse_context("", *cdt);

    ContextualView cv = materialize(db, reg[0], c);
    CHECK(cv.table("E").row_count() == 1);
    CHECK(cv.source_hash == sha256_hex("T" + std::string(1, '\0') +
                                       table_to_csv(t) + std::string(1, '\0')));
}

TEST_CASE("materialize surfaces evaluation errors") {
    Database db = make_db({make_table("T", {{"a", "text"}}, {{"x"}})});
    auto cdt = parse_tree("root r\n  dim action\n    val promotion\n");
    auto reg = parse_registry("view v\nwhen\ndef E = select(T, missing = 1)\n", *cdt);
    CHECK_THROWS_AS(materialize(db, reg[0], parse_context("", *cdt)), Error);
}
