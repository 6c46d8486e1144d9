#include <doctest.h>

#include <map>

#include "cornerforge/error.hpp"
#include "cornerforge/evaluation.hpp"
#include "cornerforge/io.hpp"
#include "support.hpp"

using namespace cornerforge;
using namespace testsupport;

namespace {

struct Pipeline {
    CornerCaseOntology ontology;
    std::vector<CornerCaseSpec> specs;
    MetricsFile metrics;
    LabelMapping mapping;
    DatasetIndex dataset;
    ExtractionResult hits;

    explicit Pipeline(const nlohmann::json& dataset_doc)
        : ontology(CornerCaseOntology::load(fixture_json("ontology.json"))),
          specs(load_registry(fixture_text("registry.csv"))),
          metrics(compile(ontology, specs)),
          mapping(LabelMapping::load(fixture_json("mapping.json"), ontology, metrics)),
          dataset(DatasetIndex::load(dataset_doc)),
          hits(extract_all(metrics, dataset, mapping)) {}
};

// Two rain scenes (4 annotations) and one dry scene (2 annotations).
nlohmann::json rainy_dataset() {
    return jdataset(
        {jscene("scene_a", "heavy rain on the road"), jscene("scene_b", "light rain again"),
         jscene("scene_c", "sunny afternoon")},
        {jsample("s1", "scene_a", 1000, 3.0, 0.0), jsample("s2", "scene_b", 2000, 3.0, 0.0),
         jsample("s3", "scene_c", 3000, 3.0, 0.0)},
        {jann("a1", "s1", "car", 0, 0), jann("a2", "s1", "truck", 10, 0),
         jann("a3", "s2", "car", 0, 0), jann("a4", "s2", "bus", 10, 0),
         jann("a5", "s3", "car", 0, 0), jann("a6", "s3", "car", 10, 0)});
}

nlohmann::json perfect_detections(const DatasetIndex& dataset) {
    nlohmann::json list = nlohmann::json::array();
    for (const Annotation& annotation : dataset.annotations()) {
        list.push_back(jdet("det_" + annotation.id, annotation.sample_id, annotation.label,
                            annotation.center.x, annotation.center.y));
    }
    return jdetections(list);
}

APosterioriEntry entry(int id, const std::string& cause, std::set<std::string> a_priori,
                       std::set<std::string> post, std::set<std::string> scenes,
                       std::set<std::string> post_scenes) {
    APosterioriEntry e;
    e.corner_case_id = id;
    e.cause_text = cause;
    e.a_priori_annotations = std::move(a_priori);
    e.a_posteriori_annotations = std::move(post);
    e.a_priori_scenes = std::move(scenes);
    e.a_posteriori_scenes = std::move(post_scenes);
    return e;
}

} // namespace

TEST_CASE("perfect detector yields zero a-posteriori everywhere") {
    Pipeline pipe(rainy_dataset());
    const auto detections = detections_from_json(perfect_detections(pipe.dataset), pipe.dataset);
    const EnrichmentResult enriched = enrich(pipe.dataset, detections, 0.5);
    const APosterioriResult result = derive_a_posteriori(pipe.hits, enriched);
    for (const APosterioriEntry& e : result.entries) {
        CHECK(e.a_posteriori_annotations.empty());
        CHECK(e.a_posteriori_scenes.empty());
    }
    const CornerCaseReport report = aggregate(result, pipe.specs);
    for (const auto& [key, row] : report.corner_case) CHECK(row.a_posteriori == 0);
    for (const auto& [key, row] : report.layer) CHECK(row.a_posteriori == 0);
    for (const auto& [key, row] : report.level) CHECK(row.a_posteriori == 0);
}

TEST_CASE("null detector turns every a-priori into a-posteriori") {
    Pipeline pipe(rainy_dataset());
    const EnrichmentResult enriched = enrich(pipe.dataset, {}, 0.5);
    const APosterioriResult result = derive_a_posteriori(pipe.hits, enriched);
    for (const APosterioriEntry& e : result.entries) {
        CHECK(e.a_posteriori_annotations == e.a_priori_annotations);
        CHECK(e.a_posteriori_scenes == e.a_priori_scenes);
    }
    const CornerCaseReport report = aggregate(result, pipe.specs);
    for (const auto& [key, row] : report.corner_case) CHECK(row.a_posteriori == row.a_priori);
    for (const auto& [key, row] : report.corner_case_scenes) CHECK(row.a_posteriori == row.a_priori);
    for (const auto& [key, row] : report.layer) CHECK(row.a_posteriori == row.a_priori);
    for (const auto& [key, row] : report.level) CHECK(row.a_posteriori == row.a_priori);
}

TEST_CASE("a-posteriori is the intersection of hits and false negatives") {
    Pipeline pipe(rainy_dataset());
    // Drop a1 (rain scene) and a5 (dry scene): only a1 is an a-priori miss.
    nlohmann::json detections = nlohmann::json::array();
    for (const Annotation& annotation : pipe.dataset.annotations()) {
        if (annotation.id == "a1" || annotation.id == "a5") continue;
        detections.push_back(jdet("det_" + annotation.id, annotation.sample_id, annotation.label,
                                  annotation.center.x, annotation.center.y));
    }
    const EnrichmentResult enriched =
        enrich(pipe.dataset, detections_from_json(jdetections(detections), pipe.dataset), 0.5);
    const APosterioriResult result = derive_a_posteriori(pipe.hits, enriched);

    const auto rain5 = std::find_if(result.entries.begin(), result.entries.end(),
                                    [](const APosterioriEntry& e) { return e.corner_case_id == 5; });
    REQUIRE(rain5 != result.entries.end());
    CHECK(rain5->a_priori_annotations == std::set<std::string>{"a1", "a2", "a3", "a4"});
    CHECK(rain5->a_posteriori_annotations == std::set<std::string>{"a1"});
    CHECK(rain5->a_priori_scenes == std::set<std::string>{"scene_a", "scene_b"});
    CHECK(rain5->a_posteriori_scenes == std::set<std::string>{"scene_a"}); // scene_b fully detected

    // Corner cases that found nothing stay present with empty sets.
    const auto wheelchairs = std::find_if(
        result.entries.begin(), result.entries.end(),
        [](const APosterioriEntry& e) { return e.corner_case_id == 3; });
    REQUIRE(wheelchairs != result.entries.end());
    CHECK(wheelchairs->a_priori_annotations.empty());
    CHECK(wheelchairs->a_posteriori_annotations.empty());
}

TEST_CASE("hits must reference enriched annotations") {
    Pipeline pipe(rainy_dataset());
    const EnrichmentResult enriched = enrich(pipe.dataset, {}, 0.5);
    ExtractionResult broken = pipe.hits;
    for (HitSet& hits : broken.hits) {
        if (hits.corner_case_id == 5) hits.annotation_ids.insert("ghost");
    }
    CHECK_THROWS_WITH_AS(derive_a_posteriori(broken, enriched), doctest::Contains("IdMismatch"),
                         Error);
}

TEST_CASE("aggregate arithmetic on a single corner case") {
    const auto specs = load_registry(
        "id,description,cause,ravioli,source,layer,level\n"
        "1,Camera overexposure,night glare,V,Single,Sensor,Physical - Global Outlier\n");
    APosterioriResult result;
    std::set<std::string> a_priori, post;
    for (int i = 0; i < 10; ++i) a_priori.insert("a" + std::to_string(i));
    for (int i = 0; i < 6; ++i) post.insert("a" + std::to_string(i));
    result.entries = {entry(1, "night glare", a_priori, post, {"sc1", "sc2"}, {"sc1"})};

    const CornerCaseReport report = aggregate(result, specs);
    REQUIRE(report.corner_case.count("1") == 1);
    CHECK(report.corner_case.at("1").a_priori == 10);
    CHECK(report.corner_case.at("1").a_posteriori == 6);
    CHECK(report.corner_case.at("1").ratio == 0.6);
    CHECK(report.corner_case_scenes.at("1").a_priori == 2);
    CHECK(report.corner_case_scenes.at("1").a_posteriori == 1);
    CHECK(report.corner_case_scenes.at("1").ratio == 0.5);
    CHECK(report.layer.at("Sensor").a_priori == 10);
    CHECK(report.level.at("Sensor/Physical - Global Outlier").a_posteriori == 6);
}

TEST_CASE("zero a-priori rows stay present with an absent ratio") {
    const auto specs = load_registry(
        "id,description,cause,ravioli,source,layer,level\n"
        "3,Unusual persons,persons in wheelchairs,R/V/L,Single,Content,Object\n");
    APosterioriResult result;
    result.entries = {entry(3, "persons in wheelchairs", {}, {}, {}, {})};
    const CornerCaseReport report = aggregate(result, specs);
    REQUIRE(report.corner_case.count("3") == 1);
    CHECK(report.corner_case.at("3").a_priori == 0);
    CHECK(report.corner_case.at("3").a_posteriori == 0);
    CHECK_FALSE(report.corner_case.at("3").ratio.has_value());
    CHECK_FALSE(report.layer.at("Content").ratio.has_value());
}

TEST_CASE("multi-classified corner cases contribute to every level row") {
    const auto specs = load_registry("id,description,cause,ravioli,source,layer,level\n"
                                     "5,Too many reflections,rain,L,Single,Content,Domain\n"
                                     "5,Too many reflections,rain,L,Single,Content,Object\n");
    APosterioriResult result;
    std::set<std::string> a_priori;
    for (int i = 0; i < 10; ++i) a_priori.insert("a" + std::to_string(i));
    result.entries = {entry(5, "rain", a_priori, {"a0", "a1"}, {"sc"}, {"sc"})};

    const CornerCaseReport report = aggregate(result, specs);
    CHECK(report.corner_case.at("5").a_priori == 10);
    CHECK(report.level.at("Content/Domain").a_priori == 10);
    CHECK(report.level.at("Content/Object").a_priori == 10);
    CHECK(report.level.at("Content/Domain").a_posteriori == 2);
    // The layer row sums both (corner case, classification) contributions.
    CHECK(report.layer.at("Content").a_priori == 20);
    CHECK(report.layer.at("Content").a_posteriori == 4);
}

TEST_CASE("multiple causes of one corner case union before counting") {
    const auto specs = load_registry("id,description,cause,ravioli,source,layer,level\n"
                                     "9,Dual cause,causeA,V,Single,Content,Object\n"
                                     "9,Dual cause,causeB,V,Single,Content,Object\n");
    APosterioriResult result;
    result.entries = {entry(9, "causeA", {"x", "y"}, {"x"}, {"sc1"}, {"sc1"}),
                      entry(9, "causeB", {"y", "z"}, {"z"}, {"sc1", "sc2"}, {"sc2"})};
    const CornerCaseReport report = aggregate(result, specs);
    CHECK(report.corner_case.at("9").a_priori == 3);      // {x, y, z}
    CHECK(report.corner_case.at("9").a_posteriori == 2);  // {x, z}
    CHECK(report.corner_case_scenes.at("9").a_priori == 2);
    CHECK(report.corner_case_scenes.at("9").a_posteriori == 2);
    CHECK(report.level.at("Content/Object").a_priori == 3);
}

TEST_CASE("layer rows equal a brute-force re-aggregation") {
    Pipeline pipe(rainy_dataset());
    const EnrichmentResult enriched = enrich(pipe.dataset, {}, 0.5);
    const APosterioriResult result = derive_a_posteriori(pipe.hits, enriched);
    const CornerCaseReport report = aggregate(result, pipe.specs);

    std::map<std::string, std::size_t> expected_layer;
    std::map<std::string, std::size_t> expected_level;
    for (const CornerCaseSpec& spec : pipe.specs) {
        std::set<std::string> unioned;
        for (const APosterioriEntry& e : result.entries) {
            if (e.corner_case_id == spec.id) {
                unioned.insert(e.a_priori_annotations.begin(), e.a_priori_annotations.end());
            }
        }
        for (const Classification& classification : spec.classifications) {
            expected_layer[to_string(classification.layer())] += unioned.size();
            expected_level[classification.to_string()] += unioned.size();
        }
    }
    for (const auto& [key, count] : expected_layer) CHECK(report.layer.at(key).a_priori == count);
    for (const auto& [key, count] : expected_level) CHECK(report.level.at(key).a_priori == count);
    CHECK(report.layer.size() == expected_layer.size());
    CHECK(report.level.size() == expected_level.size());
}

TEST_CASE("report serialization round-trips in both formats") {
    Pipeline pipe(rainy_dataset());
    const EnrichmentResult enriched = enrich(pipe.dataset, {}, 0.5);
    const APosterioriResult result = derive_a_posteriori(pipe.hits, enriched);

    const APosterioriResult parsed = a_posteriori_from_json(a_posteriori_to_json(result));
    CHECK(parsed == result);

    const CornerCaseReport report = aggregate(result, pipe.specs);
    const CornerCaseReport again = report_from_json(report_to_json(report));
    CHECK(again == report);
    CHECK(io::dump_json(report_to_json(again)) == io::dump_json(report_to_json(report)));

    CHECK(write_report(report, "json") == io::dump_json(report_to_json(report)));
    CHECK(write_report(report, "csv") == report_to_csv(report));
    CHECK_THROWS_WITH_AS(write_report(report, "yaml"), doctest::Contains("UnsupportedFormat"),
                         Error);
}

TEST_CASE("CSV report format contract") {
    const CornerCaseReport empty;
    CHECK(report_to_csv(empty) == "scope,key,a_priori,a_posteriori,ratio\n");

    CornerCaseReport report;
    report.corner_case["1"] = ReportRow{10, 6, 0.6};
    report.corner_case["2"] = ReportRow{0, 0, std::nullopt};
    const std::string csv = report_to_csv(report);
    CHECK(csv == "scope,key,a_priori,a_posteriori,ratio\n"
                 "corner_case,1,10,6,0.59999999999999998\n"
                 "corner_case,2,0,0,\n");

    // Fields with separators are quoted.
    CornerCaseReport quoted;
    quoted.corner_case["odd,key"] = ReportRow{1, 0, 0.0};
    CHECK(report_to_csv(quoted).find("\"odd,key\"") != std::string::npos);
}

TEST_CASE("scene-granular rows use the scene-level reading") {
    Pipeline pipe(rainy_dataset());
    // Drop only a3: scene_b has one FN, scene_a none.
    nlohmann::json detections = nlohmann::json::array();
    for (const Annotation& annotation : pipe.dataset.annotations()) {
        if (annotation.id == "a3") continue;
        detections.push_back(jdet("det_" + annotation.id, annotation.sample_id, annotation.label,
                                  annotation.center.x, annotation.center.y));
    }
    const EnrichmentResult enriched =
        enrich(pipe.dataset, detections_from_json(jdetections(detections), pipe.dataset), 0.5);
    const APosterioriResult result = derive_a_posteriori(pipe.hits, enriched);
    const CornerCaseReport report = aggregate(result, pipe.specs);
    CHECK(report.corner_case.at("5").a_priori == 4);
    CHECK(report.corner_case.at("5").a_posteriori == 1);
    CHECK(report.corner_case_scenes.at("5").a_priori == 2);
    CHECK(report.corner_case_scenes.at("5").a_posteriori == 1);
}
