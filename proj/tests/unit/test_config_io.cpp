#include <catch2/catch.hpp>

#include "specshift/config.hpp"
#include "specshift/io.hpp"

using namespace specshift;
using nlohmann::json;

TEST_CASE("subshift configs parse into generators") {
    auto sft = parse_subshift(json::parse(R"({"type":"sft","edges":[["a",1,1],["b",1,2],["c",2,1]]})"));
    CHECK(sft.kind == "sft");
    CHECK(sft.sft().vertex_count == 2);
    CHECK(sft.sft().edges.size() == 3);

    auto sub = parse_subshift(json::parse(R"({"type":"substitution","rules":{"a":"ab","b":"a"}})"));
    CHECK(sub.kind == "substitution");
    CHECK(sub.substitution().rules.at('a') == "ab");

    auto st = parse_subshift(json::parse(R"({"type":"sturmian","partial_quotients":[1,1,1,1,1,1,1,1]})"));
    CHECK(st.kind == "sturmian");
    CHECK(st.sturmian().order() == 8);

    auto ub = parse_subshift(json::parse(R"({"type":"sturmian","preset":"unbounded","n_max":3})"));
    CHECK(ub.sturmian().quotient(3) == 72);

    CHECK_THROWS_AS(parse_subshift(json::parse(R"({"type":"weird"})")), validation_error);
    CHECK_THROWS_AS(parse_subshift(json::parse(R"({"type":"sft","edges":[["ab",1,1]]})")),
                    validation_error);
    CHECK_THROWS_AS(sft.sturmian(), validation_error);
}

TEST_CASE("tables and measures assemble from configs") {
    auto spec = parse_subshift(json::parse(R"({"type":"sft","edges":[["0",1,1],["1",1,1]]})"));
    auto table = build_table(spec, 4);
    CHECK(table.count(4) == 16);
    auto m = build_measure(spec, table, "auto", 1000, 7);
    CHECK(m.source == MeasureSource::parry);

    auto sturm = parse_subshift(json::parse(R"({"type":"sturmian","partial_quotients":
        [1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1]})"));
    auto ts = build_table(sturm, 6);
    auto ms = build_measure(sturm, ts, "auto", 1000, 7);
    CHECK(ms.source == MeasureSource::interval);
    auto me = build_measure(sturm, ts, "empirical", 2000, 7);
    CHECK(me.source == MeasureSource::empirical);
    CHECK(std::abs(me.value(1, ts.index_of(1, "1")) - ms.value(1, ts.index_of(1, "1"))) < 0.05);
}

TEST_CASE("alpha specifications") {
    auto lin = parse_alpha(json("linear"), 4);
    CHECK(lin.at(3) == 3.0);
    auto quad = parse_alpha(json("quadratic"), 4);
    CHECK(quad.at(3) == 9.0);
    auto list = parse_alpha(json::parse("[0.0, 0.5, 2.5, 7.0, 9.0]"), 4);
    CHECK(list.at(2) == 2.5);
    CHECK_THROWS_AS(parse_alpha(json("cubic"), 4), validation_error);
    CHECK_THROWS_AS(parse_alpha(json::parse("[0.0, 0.0, 1.0, 2.0, 3.0]"), 4), validation_error);
    CHECK_THROWS_AS(parse_alpha(json::parse("[0.0, 1.0]"), 4), validation_error);
}

TEST_CASE("run configs carry defaults") {
    auto cfg = parse_run_config(json::parse(R"({
        "subshift": {"type":"sft","edges":[["0",1,1],["1",1,1]]},
        "max_level": 5,
        "experiment": "commutant",
        "seed": 99
    })"));
    CHECK(cfg.max_level == 5);
    CHECK(cfg.experiment == "commutant");
    CHECK(cfg.seed == 99);
    CHECK(cfg.measure_source == "auto");

    auto no_shift = parse_run_config(json::parse(R"({"max_level": 3, "experiment": "bounded_quotients"})"));
    CHECK_THROWS_AS(no_shift.shift(), validation_error);
    CHECK_THROWS_AS(parse_run_config(json::parse(R"({
        "subshift": {"type":"sft","edges":[["0",1,1],["1",1,1]]},
        "max_level": 1
    })")),
                    validation_error);
}

TEST_CASE("formatting and hashing are stable") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0 / 3.0) == "0.333333333333");
    CHECK(format_double(12345678901234.0) == "1.23456789012e+13");
    CHECK(hash_hex("abc") == hash_hex("abc"));
    CHECK(hash_hex("abc") != hash_hex("abd"));
    CHECK(hash_hex("").size() == 16);
    CHECK_THROWS_AS(load_json_file("/nonexistent/path.json"), validation_error);
}
