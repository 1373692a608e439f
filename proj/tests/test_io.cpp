#include <catch2/catch_amalgamated.hpp>

#include "alphadiv/io.hpp"
#include "helpers.hpp"

using namespace alphadiv;

TEST_CASE("measure JSON round trip is bit-faithful") {
    SplitMix64 rng(808);
    for (int rep = 0; rep < 50; ++rep) {
        DiscreteMeasure m = testutil::random_measure(rng, 5);
        std::string text = to_json(m).dump();
        DiscreteMeasure back = measure_from_json(json::parse(text));
        REQUIRE(back.size() == m.size());
        for (std::size_t i = 0; i < m.size(); ++i) {
            CHECK(back.points()[i] == m.points()[i]);
            CHECK(back.weights()[i] == m.weights()[i]);
        }
    }
}

TEST_CASE("extended value clamp contract") {
    CHECK(ExtendedValue::of(-5e-13).value() == 0.0);
    CHECK(ExtendedValue::of(0.0).value() == 0.0);
    CHECK_THROWS_AS(ExtendedValue::of(-5e-12), InternalConsistency);
    CHECK_THROWS_AS(ExtendedValue::of(std::nan("")), InternalConsistency);
    CHECK_THROWS_AS(AlphaOrder(std::nan("")), InvalidOrder);
    CHECK(AlphaOrder::infinity().is_infinity());
    CHECK_FALSE(AlphaOrder(3.0).is_infinity());
}

TEST_CASE("extended value serialization") {
    CHECK(to_json(ExtendedValue::infinity()) == json("inf"));
    CHECK(to_json(ExtendedValue::of(0.25)) == json(0.25));
    CHECK(extended_value_from_json(json("inf")).is_infinite());
    CHECK(extended_value_from_json(json(0.25)).value() == 0.25);
    CHECK_THROWS_AS(extended_value_from_json(json("nan")), Error);
}

TEST_CASE("bound report JSON shape") {
    BoundReport rep = alpha_lower_bound({1, 1, 0, 1}, 2.0);
    json j = to_json(rep);
    CHECK(j.at("bound").get<double>() == Catch::Approx(0.5));
    CHECK(j.at("tight_guaranteed").get<bool>());
    CHECK_FALSE(j.at("equal_means").get<bool>());
    CHECK(j.at("witness").is_object());
    CHECK(j.at("witness").at("r").get<double>() == Catch::Approx(0.7236067977));

    json eq = to_json(alpha_lower_bound({0, 1, 0, 2}, 2.0));
    CHECK(eq.at("equal_means").get<bool>());
    CHECK(eq.at("witness").is_null());

    json inf_bound = to_json(alpha_lower_bound({1, 0, 0, 0}, 2.0));
    CHECK(inf_bound.at("bound") == json("inf"));
}

TEST_CASE("search result JSON shape") {
    SearchConfig cfg;
    cfg.support_radius = 6.0;
    cfg.grid_points_per_axis = 9;
    cfg.seed = 4;
    SearchResult r = min_search({1, 1, 0, 1}, 0.5, cfg);
    json j = to_json(r);
    CHECK(j.at("best_value").is_number());
    CHECK(j.at("bound").is_number());
    CHECK(j.at("gap").get<double>() >= -1e-9);
    CHECK(j.at("evaluations").get<long>() > 0);
    CHECK(j.at("feasibility_ratio").get<double>() > 0.0);
    CHECK(j.at("best_pair").at("p").contains("points"));
}

TEST_CASE("pair JSON round trip") {
    MeasurePair pair = make_pair(make_measure({0, 2}, {0.4, 0.6}),
                                 make_measure({1, 2}, {0.5, 0.5}));
    MeasurePair back = pair_from_json(json::parse(to_json(pair).dump()));
    CHECK(back.points() == pair.points());
    CHECK(back.p().weights() == pair.p().weights());
    CHECK(back.q().weights() == pair.q().weights());
}
