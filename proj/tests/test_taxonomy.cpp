#include <doctest.h>

#include "cornerforge/error.hpp"
#include "cornerforge/taxonomy.hpp"

using namespace cornerforge;

TEST_CASE("classification legality table") {
    // Sensor pairs with Physical/Hardware, Content with Domain/Object/Scene.
    CHECK(level_legal_under(Layer::Sensor, Level::Physical));
    CHECK(level_legal_under(Layer::Sensor, Level::Hardware));
    CHECK_FALSE(level_legal_under(Layer::Sensor, Level::Domain));
    CHECK_FALSE(level_legal_under(Layer::Sensor, Level::Object));
    CHECK_FALSE(level_legal_under(Layer::Sensor, Level::Scene));
    CHECK(level_legal_under(Layer::Content, Level::Domain));
    CHECK(level_legal_under(Layer::Content, Level::Object));
    CHECK(level_legal_under(Layer::Content, Level::Scene));
    CHECK_FALSE(level_legal_under(Layer::Content, Level::Physical));
    CHECK_FALSE(level_legal_under(Layer::Content, Level::Hardware));

    // Outlier sublevels sit under Physical/Hardware, Collective/Contextual under Scene.
    CHECK(sublevel_legal_under(Level::Physical, SubLevel::GlobalOutlier));
    CHECK(sublevel_legal_under(Level::Physical, SubLevel::LocalOutlier));
    CHECK(sublevel_legal_under(Level::Hardware, SubLevel::GlobalOutlier));
    CHECK(sublevel_legal_under(Level::Hardware, SubLevel::LocalOutlier));
    CHECK(sublevel_legal_under(Level::Scene, SubLevel::Collective));
    CHECK(sublevel_legal_under(Level::Scene, SubLevel::Contextual));
    CHECK_FALSE(sublevel_legal_under(Level::Scene, SubLevel::GlobalOutlier));
    CHECK_FALSE(sublevel_legal_under(Level::Physical, SubLevel::Collective));
    CHECK_FALSE(sublevel_legal_under(Level::Domain, SubLevel::Collective));
    CHECK_FALSE(sublevel_legal_under(Level::Object, SubLevel::GlobalOutlier));
}

TEST_CASE("make rejects illegal triples") {
    CHECK_THROWS_AS(Classification::make(Layer::Sensor, Level::Domain), Error);
    CHECK_THROWS_AS(Classification::make(Layer::Content, Level::Physical), Error);
    CHECK_THROWS_AS(Classification::make(Layer::Content, Level::Domain, SubLevel::Collective), Error);
    CHECK_THROWS_AS(Classification::make(Layer::Content, Level::Object, SubLevel::GlobalOutlier),
                    Error);
    CHECK_THROWS_AS(Classification::make(Layer::Sensor, Level::Physical, SubLevel::Collective),
                    Error);
    CHECK_NOTHROW(Classification::make(Layer::Sensor, Level::Physical));
    CHECK_NOTHROW(Classification::make(Layer::Content, Level::Scene, SubLevel::Contextual));
}

TEST_CASE("parse_classification handles sheet strings") {
    const Classification a = parse_classification("Sensor", "Physical - Global Outlier");
    CHECK(a.layer() == Layer::Sensor);
    CHECK(a.level() == Level::Physical);
    CHECK(a.sublevel() == SubLevel::GlobalOutlier);
    CHECK(a.to_string() == "Sensor/Physical - Global Outlier");
    CHECK(a.level_string() == "Physical - Global Outlier");

    const Classification b = parse_classification("Content", "Object");
    CHECK(b.layer() == Layer::Content);
    CHECK(b.level() == Level::Object);
    CHECK_FALSE(b.sublevel().has_value());
    CHECK(b.to_string() == "Content/Object");

    const Classification c = parse_classification("content", "scene - collective");
    CHECK(c == Classification::make(Layer::Content, Level::Scene, SubLevel::Collective));

    CHECK_THROWS_WITH_AS(parse_classification("Sensor", "Domain"),
                         doctest::Contains("IllegalCombination"), Error);
    CHECK_THROWS_AS(parse_classification("Weather", "Domain"), Error);
}

TEST_CASE("temporal and method layers are out of scope") {
    CHECK_THROWS_WITH_AS(parse_classification("Temporal", "Domain"),
                         doctest::Contains("OutOfScopeLayer"), Error);
    CHECK_THROWS_WITH_AS(parse_classification("Method", "Domain"),
                         doctest::Contains("OutOfScopeLayer"), Error);
}

TEST_CASE("parse and serialize round-trip every legal classification") {
    const auto try_roundtrip = [](Layer layer, Level level, std::optional<SubLevel> sub) {
        const Classification value = sub ? Classification::make(layer, level, *sub)
                                         : Classification::make(layer, level);
        const Classification again = parse_classification(to_string(layer), value.level_string());
        CHECK(again == value);
    };
    try_roundtrip(Layer::Sensor, Level::Physical, std::nullopt);
    try_roundtrip(Layer::Sensor, Level::Physical, SubLevel::GlobalOutlier);
    try_roundtrip(Layer::Sensor, Level::Physical, SubLevel::LocalOutlier);
    try_roundtrip(Layer::Sensor, Level::Hardware, std::nullopt);
    try_roundtrip(Layer::Sensor, Level::Hardware, SubLevel::GlobalOutlier);
    try_roundtrip(Layer::Sensor, Level::Hardware, SubLevel::LocalOutlier);
    try_roundtrip(Layer::Content, Level::Domain, std::nullopt);
    try_roundtrip(Layer::Content, Level::Object, std::nullopt);
    try_roundtrip(Layer::Content, Level::Scene, std::nullopt);
    try_roundtrip(Layer::Content, Level::Scene, SubLevel::Collective);
    try_roundtrip(Layer::Content, Level::Scene, SubLevel::Contextual);
}

TEST_CASE("classification ordering is total and stable") {
    const Classification a = Classification::make(Layer::Sensor, Level::Physical);
    const Classification b = Classification::make(Layer::Sensor, Level::Physical, SubLevel::GlobalOutlier);
    CHECK(a != b);
    CHECK(((a < b) || (b < a)));
}

TEST_CASE("sensor sources parse and serialize") {
    const SensorSources rvl = SensorSources::parse("R/V/L");
    CHECK(rvl.contains(SensorSource::Radar));
    CHECK(rvl.contains(SensorSource::Video));
    CHECK(rvl.contains(SensorSource::Lidar));
    CHECK(rvl.to_string() == "R/V/L");

    const SensorSources v = SensorSources::parse("V");
    CHECK(v.contains(SensorSource::Video));
    CHECK_FALSE(v.contains(SensorSource::Radar));
    CHECK(v.to_string() == "V");

    // Case- and order-insensitive; serialization is canonical R/V/L order.
    CHECK(SensorSources::parse("v/r") == SensorSources({SensorSource::Radar, SensorSource::Video}));
    CHECK(SensorSources::parse("v/r").to_string() == "R/V");
    CHECK(SensorSources::parse("l/V/r") == rvl);

    CHECK_THROWS_WITH_AS(SensorSources::parse(""), doctest::Contains("EmptySet"), Error);
    CHECK_THROWS_WITH_AS(SensorSources::parse("R/X"), doctest::Contains("UnknownToken"), Error);
}

TEST_CASE("layer and fusion parsing") {
    CHECK(parse_layer("Sensor") == Layer::Sensor);
    CHECK(parse_layer("content") == Layer::Content);
    CHECK(parse_fusion("Single") == FusionStage::Single);
    CHECK(parse_fusion("multi") == FusionStage::Multi);
    CHECK(to_string(FusionStage::Single) == "Single");
    CHECK(to_string(FusionStage::Multi) == "Multi");
    CHECK_THROWS_AS(parse_fusion("dual"), Error);
}
