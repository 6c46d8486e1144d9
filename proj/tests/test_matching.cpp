#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "cornerforge/error.hpp"
#include "cornerforge/io.hpp"
#include "cornerforge/matching.hpp"
#include "support.hpp"

using namespace cornerforge;
using namespace testsupport;

namespace {

// Brute-force oracle: minimum total over all maximum matchings.
double brute_force_total(const std::vector<std::vector<double>>& cost) {
    const int n = static_cast<int>(cost.size());
    const int m = n == 0 ? 0 : static_cast<int>(cost[0].size());
    if (n == 0 || m == 0) return 0.0;
    if (n <= m) {
        std::vector<int> cols(m);
        std::iota(cols.begin(), cols.end(), 0);
        double best = std::numeric_limits<double>::infinity();
        do {
            double total = 0.0;
            for (int i = 0; i < n; ++i) total += cost[i][cols[i]];
            best = std::min(best, total);
        } while (std::next_permutation(cols.begin(), cols.end()));
        return best;
    }
    std::vector<int> rows(n);
    std::iota(rows.begin(), rows.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double total = 0.0;
        for (int j = 0; j < m; ++j) total += cost[rows[j]][j];
        best = std::min(best, total);
    } while (std::next_permutation(rows.begin(), rows.end()));
    return best;
}

double pair_total(const std::vector<std::vector<double>>& cost,
                  const std::set<std::pair<int, int>>& pairs) {
    double total = 0.0;
    for (const auto& [r, c] : pairs) total += cost[r][c];
    return total;
}

Annotation gt(const std::string& id, const std::string& label, double x, double y) {
    Annotation annotation;
    annotation.id = id;
    annotation.sample_id = "s0";
    annotation.label = label;
    annotation.center = {x, y, 0.8};
    annotation.size = {2.0, 4.5, 1.6};
    return annotation;
}

Detection det(const std::string& id, const std::string& label, double x, double y) {
    Detection detection;
    detection.id = id;
    detection.sample_id = "s0";
    detection.label = label;
    detection.center = {x, y, 0.8};
    detection.score = 0.9;
    return detection;
}

} // namespace

TEST_CASE("assignment frozen examples") {
    CHECK(solve_assignment({{0.0}}) == std::set<std::pair<int, int>>{{0, 0}});

    const std::vector<std::vector<double>> square = {{4, 1, 3}, {2, 0, 5}, {3, 2, 2}};
    const auto square_pairs = solve_assignment(square);
    CHECK(square_pairs == std::set<std::pair<int, int>>{{0, 1}, {1, 0}, {2, 2}});
    CHECK(pair_total(square, square_pairs) == 5.0);

    const std::vector<std::vector<double>> tall = {{1, 2}, {2, 1}, {3, 3}};
    const auto tall_pairs = solve_assignment(tall);
    CHECK(tall_pairs == std::set<std::pair<int, int>>{{0, 0}, {1, 1}});
    CHECK(pair_total(tall, tall_pairs) == 2.0);

    CHECK(solve_assignment({}).empty());
    CHECK(solve_assignment({{}}).empty());
}

TEST_CASE("assignment rejects invalid matrices") {
    CHECK_THROWS_WITH_AS(solve_assignment({{1.0, std::nan("")}, {1.0, 1.0}}),
                         doctest::Contains("NonFinite"), Error);
    CHECK_THROWS_WITH_AS(
        solve_assignment({{1.0, std::numeric_limits<double>::infinity()}, {1.0, 1.0}}),
        doctest::Contains("NonFinite"), Error);
    CHECK_THROWS_WITH_AS(solve_assignment({{1.0, -0.5}, {1.0, 1.0}}),
                         doctest::Contains("NegativeCost"), Error);
    CHECK_THROWS_AS(solve_assignment({{1.0, 2.0}, {1.0}}), Error);
}

TEST_CASE("assignment matches the brute-force oracle on random matrices") {
    std::mt19937 rng(555);
    std::uniform_real_distribution<double> real(0.0, 10.0);
    std::uniform_int_distribution<int> integer(0, 9);
    for (int n = 1; n <= 5; ++n) {
        for (int m = 1; m <= 5; ++m) {
            for (int round = 0; round < 30; ++round) {
                std::vector<std::vector<double>> cost(n, std::vector<double>(m));
                const bool integral = round % 2 == 0;
                for (auto& row : cost)
                    for (double& cell : row) cell = integral ? integer(rng) : real(rng);
                const auto pairs = solve_assignment(cost);
                CHECK(pairs.size() == static_cast<std::size_t>(std::min(n, m)));
                const double expected = brute_force_total(cost);
                CHECK(pair_total(cost, pairs) == doctest::Approx(expected).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("equal-cost ties resolve to the lexicographically lowest pairs") {
    CHECK(solve_assignment({{1, 1}, {1, 1}}) == std::set<std::pair<int, int>>{{0, 0}, {1, 1}});
    CHECK(solve_assignment({{0, 0, 0}, {0, 0, 0}, {0, 0, 0}}) ==
          std::set<std::pair<int, int>>{{0, 0}, {1, 1}, {2, 2}});
    CHECK(solve_assignment({{0, 0}}) == std::set<std::pair<int, int>>{{0, 0}});
    CHECK(solve_assignment({{0}, {0}}) == std::set<std::pair<int, int>>{{0, 0}});
    // Row 0 must take the worse local cell to keep the global optimum.
    CHECK(solve_assignment({{1, 2}, {1, 9}}) == std::set<std::pair<int, int>>{{0, 1}, {1, 0}});
}

TEST_CASE("match_sample frozen examples") {
    SUBCASE("gate pass") {
        const MatchOutcome outcome = match_sample({gt("g0", "car", 0, 0)},
                                                  {det("d0", "car", 0.3, 0)}, 0.5);
        REQUIRE(outcome.tp_pairs.size() == 1);
        CHECK(outcome.tp_pairs[0].annotation_id == "g0");
        CHECK(outcome.tp_pairs[0].detection_id == "d0");
        CHECK(outcome.tp_pairs[0].distance == doctest::Approx(0.3));
        CHECK(outcome.fn_annotations.empty());
        CHECK(outcome.fp_detections.empty());
    }
    SUBCASE("gate fail") {
        const MatchOutcome outcome = match_sample({gt("g0", "car", 0, 0)},
                                                  {det("d0", "car", 1.0, 0)}, 0.5);
        CHECK(outcome.tp_pairs.empty());
        CHECK(outcome.fn_annotations == std::set<std::string>{"g0"});
        CHECK(outcome.fp_detections == std::set<std::string>{"d0"});
    }
    SUBCASE("class mismatch") {
        const MatchOutcome outcome = match_sample({gt("g0", "car", 0, 0)},
                                                  {det("d0", "pedestrian", 0.1, 0)}, 0.5);
        CHECK(outcome.tp_pairs.empty());
        CHECK(outcome.fn_annotations == std::set<std::string>{"g0"});
        CHECK(outcome.fp_detections == std::set<std::string>{"d0"});
    }
    SUBCASE("nearest assignment") {
        const MatchOutcome outcome =
            match_sample({gt("g0", "car", 0, 0), gt("g1", "car", 0.6, 0)},
                         {det("d0", "car", 0.35, 0)}, 0.5);
        REQUIRE(outcome.tp_pairs.size() == 1);
        CHECK(outcome.tp_pairs[0].annotation_id == "g1"); // 0.25 m beats 0.35 m
        CHECK(outcome.fn_annotations == std::set<std::string>{"g0"});
        CHECK(outcome.fp_detections.empty());
    }
}

TEST_CASE("the gate is closed at exactly the threshold") {
    const MatchOutcome outcome = match_sample({gt("g0", "car", 0, 0)},
                                              {det("d0", "car", 0.5, 0)}, 0.5);
    REQUIRE(outcome.tp_pairs.size() == 1);
    CHECK(outcome.tp_pairs[0].distance == 0.5);
}

TEST_CASE("matching uses xy only and ignores z") {
    auto annotation = gt("g0", "car", 0, 0);
    annotation.center.z = 10.0;
    const MatchOutcome outcome = match_sample({annotation}, {det("d0", "car", 0.3, 0)}, 0.5);
    CHECK(outcome.tp_pairs.size() == 1);
}

TEST_CASE("match_sample validates the threshold") {
    CHECK_THROWS_AS(match_sample({}, {}, 0.0), Error);
    CHECK_THROWS_AS(match_sample({}, {}, -1.0), Error);
}

TEST_CASE("conservation and translation invariance on random samples") {
    std::mt19937 rng(808);
    std::uniform_real_distribution<double> coord(-20.0, 20.0);
    std::uniform_int_distribution<int> count(0, 6);
    std::uniform_int_distribution<int> label_pick(0, 2);
    const char* labels[] = {"car", "truck", "pedestrian"};

    for (int round = 0; round < 200; ++round) {
        std::vector<Annotation> gts;
        std::vector<Detection> dets;
        const int n_gt = count(rng);
        const int n_det = count(rng);
        for (int i = 0; i < n_gt; ++i)
            gts.push_back(gt("g" + std::to_string(i), labels[label_pick(rng)], coord(rng), coord(rng)));
        for (int i = 0; i < n_det; ++i)
            dets.push_back(det("d" + std::to_string(i), labels[label_pick(rng)], coord(rng), coord(rng)));

        const MatchOutcome outcome = match_sample(gts, dets, 0.5);
        CHECK(outcome.tp_pairs.size() + outcome.fn_annotations.size() == gts.size());
        CHECK(outcome.tp_pairs.size() + outcome.fp_detections.size() == dets.size());
        for (const TpPair& pair : outcome.tp_pairs) CHECK(pair.distance <= 0.5);

        // Rigid translation leaves the partition untouched.
        const double dx = coord(rng), dy = coord(rng);
        std::vector<Annotation> moved_gts = gts;
        std::vector<Detection> moved_dets = dets;
        for (Annotation& a : moved_gts) {
            a.center.x += dx;
            a.center.y += dy;
        }
        for (Detection& d : moved_dets) {
            d.center.x += dx;
            d.center.y += dy;
        }
        const MatchOutcome moved = match_sample(moved_gts, moved_dets, 0.5);
        CHECK(moved.fn_annotations == outcome.fn_annotations);
        CHECK(moved.fp_detections == outcome.fp_detections);
        REQUIRE(moved.tp_pairs.size() == outcome.tp_pairs.size());
        for (std::size_t i = 0; i < moved.tp_pairs.size(); ++i) {
            CHECK(moved.tp_pairs[i].annotation_id == outcome.tp_pairs[i].annotation_id);
            CHECK(moved.tp_pairs[i].detection_id == outcome.tp_pairs[i].detection_id);
        }
    }
}

TEST_CASE("enrich classifies every annotation and detection") {
    const DatasetIndex dataset = DatasetIndex::load(jdataset(
        {jscene("scene_a", "plain"), jscene("scene_b", "plain")},
        {jsample("s1", "scene_a", 1000, 3.0, 0.0), jsample("s2", "scene_b", 2000, 4.0, 0.0)},
        {jann("a1", "s1", "car", 0, 0), jann("a2", "s1", "truck", 10, 0),
         jann("a3", "s2", "car", 5, 5)}));

    SUBCASE("perfect detections") {
        const std::vector<Detection> detections = detections_from_json(
            jdetections({jdet("d1", "s1", "car", 0, 0), jdet("d2", "s1", "truck", 10, 0),
                         jdet("d3", "s2", "car", 5, 5)}),
            dataset);
        const EnrichmentResult result = enrich(dataset, detections, 0.5);
        CHECK(result.tp_count == 3);
        CHECK(result.fn_count == 0);
        CHECK(result.fp_count == 0);
        CHECK(result.detection_count == 3);
        for (const EnrichedAnnotation& entry : result.annotations) {
            CHECK(entry.detected);
            CHECK(entry.detection_id.has_value());
            CHECK(entry.distance.has_value());
            CHECK(!entry.scene_id.empty());
        }
    }
    SUBCASE("no detections at all") {
        const EnrichmentResult result = enrich(dataset, {}, 0.5);
        CHECK(result.tp_count == 0);
        CHECK(result.fn_count == 3);
        CHECK(result.fp_count == 0);
        for (const EnrichedAnnotation& entry : result.annotations) CHECK_FALSE(entry.detected);
    }
    SUBCASE("mixed outcomes with a spurious detection") {
        const std::vector<Detection> detections = detections_from_json(
            jdetections({jdet("d1", "s1", "car", 0.2, 0), jdet("d9", "s2", "bus", -5, -5)}),
            dataset);
        const EnrichmentResult result = enrich(dataset, detections, 0.5);
        CHECK(result.tp_count == 1);
        CHECK(result.fn_count == 2);
        CHECK(result.fp_count == 1);
        const auto outcome = std::find_if(result.outcomes.begin(), result.outcomes.end(),
                                          [](const MatchOutcome& o) { return o.sample_id == "s2"; });
        REQUIRE(outcome != result.outcomes.end());
        CHECK(outcome->fp_detections == std::set<std::string>{"d9"});
    }
}

TEST_CASE("detections must reference known samples") {
    const DatasetIndex dataset = DatasetIndex::load(
        jdataset({jscene("scene_a", "plain")}, {jsample("s1", "scene_a", 1000, 3.0, 0.0)},
                 {jann("a1", "s1", "car", 0, 0)}));
    CHECK_THROWS_WITH_AS(
        detections_from_json(jdetections({jdet("d1", "ghost", "car", 0, 0)}), dataset),
        doctest::Contains("UnknownSample"), Error);
    CHECK_THROWS_WITH_AS(
        detections_from_json(
            jdetections({jdet("d1", "s1", "car", 0, 0), jdet("d1", "s1", "car", 1, 1)}), dataset),
        doctest::Contains("DuplicateId"), Error);

    auto bad_score = jdetections({jdet("d1", "s1", "car", 0, 0, 1.5)});
    CHECK_THROWS_AS(detections_from_json(bad_score, dataset), Error);
}

TEST_CASE("detections JSON round-trips") {
    const DatasetIndex dataset = DatasetIndex::load(
        jdataset({jscene("scene_a", "plain")}, {jsample("s1", "scene_a", 1000, 3.0, 0.0)},
                 {jann("a1", "s1", "car", 0, 0)}));
    const auto detections = detections_from_json(
        jdetections({jdet("d1", "s1", "car", 0.1, 0.2, 0.75)}), dataset);
    const auto again = detections_from_json(detections_to_json(detections), dataset);
    CHECK(again == detections);
}

TEST_CASE("enrichment JSON round-trips") {
    const DatasetIndex dataset = DatasetIndex::load(jdataset(
        {jscene("scene_a", "plain")},
        {jsample("s1", "scene_a", 1000, 3.0, 0.0), jsample("s2", "scene_a", 2000, 4.0, 0.0)},
        {jann("a1", "s1", "car", 0, 0), jann("a2", "s2", "truck", 10, 0)}));
    const std::vector<Detection> detections = detections_from_json(
        jdetections({jdet("d1", "s1", "car", 0.2, 0), jdet("d9", "s2", "bus", -5, -5)}), dataset);
    const EnrichmentResult result = enrich(dataset, detections, 0.5);
    const EnrichmentResult again = enrichment_from_json(enrichment_to_json(result));
    CHECK(again == result);
    CHECK(io::dump_json(enrichment_to_json(again)) == io::dump_json(enrichment_to_json(result)));
}

TEST_CASE("parallel enrichment reproduces the single-threaded result") {
    nlohmann::json scenes = nlohmann::json::array();
    nlohmann::json samples = nlohmann::json::array();
    nlohmann::json annotations = nlohmann::json::array();
    nlohmann::json detections = nlohmann::json::array();
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> jitter(-0.4, 0.4);
    for (int i = 0; i < 10; ++i) {
        const std::string scene_id = "scene_" + std::to_string(i);
        scenes.push_back(jscene(scene_id, "plain"));
        const std::string sample_id = scene_id + "_s0";
        samples.push_back(jsample(sample_id, scene_id, 1000, 2.0, 0.0));
        for (int j = 0; j < 5; ++j) {
            const std::string base = sample_id + "_a" + std::to_string(j);
            annotations.push_back(jann(base, sample_id, j % 2 ? "car" : "truck", 4.0 * j, 0));
            if (j != 2) {
                detections.push_back(
                    jdet("det_" + base, sample_id, j % 2 ? "car" : "truck", 4.0 * j + jitter(rng),
                         jitter(rng)));
            }
        }
    }
    const DatasetIndex dataset = DatasetIndex::load(jdataset(scenes, samples, annotations));
    const auto dets = detections_from_json(jdetections(detections), dataset);
    const EnrichmentResult serial = enrich(dataset, dets, 0.5, 1);
    const EnrichmentResult parallel = enrich(dataset, dets, 0.5, 4);
    CHECK(serial == parallel);
    CHECK(io::dump_json(enrichment_to_json(serial)) == io::dump_json(enrichment_to_json(parallel)));
}
