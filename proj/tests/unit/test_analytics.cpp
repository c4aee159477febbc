#include "doctest.h"

#include "skge/analytics.hpp"
#include "skge/error.hpp"

#include "oracles.hpp"

#include "json.hpp"

#include <cmath>
#include <random>
#include <set>

using namespace skge;

namespace {

EmbeddingModel model_of(std::size_t n, std::size_t d) {
    ModelConfig c;
    c.dimension = d;
    return EmbeddingModel(c, n, 1);
}

Vocab vocab_of(std::size_t n, const std::string& prefix = "e") {
    Vocab v;
    for (std::size_t i = 0; i < n; ++i)
        v.intern(prefix + std::to_string(i));
    return v;
}

double dist(const Point2& a, const Point2& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }

Matrix gaussian_clusters(std::size_t per_cluster, std::size_t clusters, std::size_t d, std::uint64_t seed,
                         double spread = 10.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n01(0.0, 1.0);
    Matrix m{per_cluster * clusters, d, {}};
    std::vector<std::vector<double>> centers(clusters, std::vector<double>(d));
    for (auto& c : centers)
        for (auto& x : c)
            x = spread * n01(rng);
    for (std::size_t c = 0; c < clusters; ++c)
        for (std::size_t i = 0; i < per_cluster; ++i)
            for (std::size_t j = 0; j < d; ++j)
                m.values.push_back(centers[c][j] + n01(rng));
    return m;
}

}  // namespace

TEST_CASE("duplicate rows are nearest with cosine one") {
    auto m = model_of(5, 3);
    std::mt19937_64 rng(1);
    skge_test::fill_uniform(m.entity_data(), rng);
    for (std::size_t i = 0; i < 3; ++i)
        m.entity(3)[i] = m.entity(1)[i];
    auto nn = nearest_neighbors(m, 1, 2);
    REQUIRE(nn.size() == 2);
    CHECK(nn[0].id == 3);
    CHECK(nn[0].cosine == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("orthonormal basis ties break by id") {
    auto m = model_of(4, 4);
    for (EntityId e = 0; e < 4; ++e)
        m.entity(e)[e] = 1.0;
    auto nn = nearest_neighbors(m, 2, 3);
    REQUIRE(nn.size() == 3);
    CHECK(nn[0].id == 0);
    CHECK(nn[1].id == 1);
    CHECK(nn[2].id == 3);
    for (const auto& n : nn)
        CHECK(n.cosine == 0.0);
}

TEST_CASE("neighbor search matches the exhaustive oracle") {
    std::mt19937_64 rng(2);
    for (std::size_t n : {20u, 200u, 500u}) {
        auto m = model_of(n, 8);
        skge_test::fill_uniform(m.entity_data(), rng);
        // plant exact duplicates to exercise ties
        for (std::size_t i = 0; i < 8; ++i)
            m.entity(n - 1)[i] = m.entity(0)[i];
        for (EntityId q = 0; q < n; q += (n > 50 ? 7 : 1)) {
            for (std::size_t k : {1u, 5u, 19u}) {
                auto got = nearest_neighbors(m, q, k);
                auto want = skge_test::brute_neighbors(m, q, k);
                REQUIRE(got.size() == want.size());
                for (std::size_t i = 0; i < got.size(); ++i) {
                    CHECK(got[i].id == want[i].first);
                    CHECK(std::abs(got[i].cosine - want[i].second) < 1e-12);
                }
            }
        }
    }
}

TEST_CASE("neighbor preconditions") {
    auto m = model_of(3, 2);
    auto v = vocab_of(3);
    CHECK_THROWS_AS(nearest_neighbors(m, 0, 0), ParameterError);
    CHECK_THROWS_AS(nearest_neighbors(m, 0, 3), ParameterError);
    CHECK_THROWS_AS(nearest_neighbors(m, 5, 1), ParameterError);
    CHECK_THROWS_AS(nearest_neighbors(m, v, "zzz", 1), ValidationError);
    CHECK_NOTHROW(nearest_neighbors(m, v, "e1", 2));
}

TEST_CASE("scene pairs: hand-set vectors") {
    auto m = model_of(3, 2);
    auto v = vocab_of(3, "s");
    const double n = std::hypot(0.9, 0.1);
    m.entity(0)[0] = 1;
    m.entity(1)[0] = 0.9 / n;
    m.entity(1)[1] = 0.1 / n;
    m.entity(2)[1] = 1;
    auto r = most_similar_scene_pairs(m, v, {"s0", "s1", "s2"}, 10);
    REQUIRE(r.pairs.size() == 3);
    CHECK(r.pairs[0].a == "s0");
    CHECK(r.pairs[0].b == "s1");
    for (std::size_t i = 1; i < r.pairs.size(); ++i)
        CHECK(r.pairs[i - 1].score >= r.pairs[i].score);
    CHECK(most_similar_scene_pairs(m, v, {"s0", "s1", "s2"}, 1).pairs.size() == 1);
}

TEST_CASE("scene pairs: identical vectors rank first and scoring is symmetric") {
    std::mt19937_64 rng(6);
    auto m = model_of(6, 5);
    skge_test::fill_uniform(m.entity_data(), rng);
    for (std::size_t i = 0; i < 5; ++i)
        m.entity(4)[i] = m.entity(2)[i];
    auto v = vocab_of(6, "s");
    auto r = most_similar_scene_pairs(m, v, {"s5", "s4", "s3", "s2", "s1", "s0"}, 100);
    CHECK(r.pairs.size() == 15);
    CHECK(r.pairs[0].a == "s2");
    CHECK(r.pairs[0].b == "s4");
    CHECK(r.pairs[0].score == doctest::Approx(1.0).epsilon(1e-15));
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& p : r.pairs) {
        CHECK(p.a != p.b);
        CHECK(seen.insert({p.a, p.b}).second);
        CHECK(seen.count({p.b, p.a}) == 0);
    }
    CosineIndex idx(m);
    for (EntityId a = 0; a < 6; ++a)
        for (EntityId b = 0; b < 6; ++b)
            CHECK(idx.similarity(a, b) == idx.similarity(b, a));
}

TEST_CASE("scene pair preconditions") {
    auto m = model_of(3, 2);
    auto v = vocab_of(3, "s");
    CHECK_THROWS_AS(most_similar_scene_pairs(m, v, {"s0", "nope"}, 1), ValidationError);
    CHECK_THROWS_AS(most_similar_scene_pairs(m, v, {"s0", "s0"}, 1), ParameterError);
    CHECK_THROWS_AS(most_similar_scene_pairs(m, v, {"s0"}, 1), ParameterError);
}

TEST_CASE("similarity and neighbor renderers") {
    SimilarityResult r{{{"a", "b", 0.5}}};
    auto j = nlohmann::json::parse(similarity_to_json(r));
    CHECK(j["pairs"][0]["a"] == "a");
    CHECK(j["pairs"][0]["score"] == 0.5);
    CHECK(similarity_to_text(r).find("0.5") != std::string::npos);
    auto v = vocab_of(3);
    auto nj = nlohmann::json::parse(neighbors_to_json(v, "e0", {{2, 0.25}}));
    CHECK(nj["neighbors"][0]["entity"] == "e2");
    CHECK(neighbors_to_text(v, "e0", {{2, 0.25}}).find("e2") != std::string::npos);
}

TEST_CASE("pca on 2D input preserves pairwise distances") {
    std::mt19937_64 rng(10);
    std::normal_distribution<double> n01;
    Matrix m{40, 2, {}};
    for (std::size_t i = 0; i < 40; ++i) {
        m.values.push_back(3 * n01(rng) + 5);
        m.values.push_back(n01(rng) - 2);
    }
    auto p = pca_2d(m);
    REQUIRE(p.size() == 40);
    for (std::size_t i = 0; i < 40; ++i)
        for (std::size_t j = i + 1; j < 40; ++j) {
            const Point2 a{m.values[2 * i], m.values[2 * i + 1]};
            const Point2 b{m.values[2 * j], m.values[2 * j + 1]};
            CHECK(std::abs(dist(p[i], p[j]) - dist(a, b)) < 1e-9);
        }
    CHECK_THROWS_AS(pca_2d(Matrix{1, 2, {1, 2}}), ParameterError);
}

TEST_CASE("tsne separates gaussian clusters and is deterministic") {
    auto data = gaussian_clusters(30, 3, 100, 21);
    TsneParams params;
    params.perplexity = 10;
    params.seed = 5;
    auto y = tsne(data, params);
    REQUIRE(y.size() == 90);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        std::size_t best = i == 0 ? 1 : 0;
        for (std::size_t j = 0; j < y.size(); ++j)
            if (j != i && dist(y[i], y[j]) < dist(y[i], y[best]))
                best = j;
        correct += (best / 30) == (i / 30);
    }
    CHECK(double(correct) / 90.0 >= 0.9);
    auto again = tsne(data, params);
    CHECK(again == y);
}

TEST_CASE("tsne objective settles after exaggeration") {
    auto data = gaussian_clusters(25, 4, 20, 3, 4.0);
    TsneParams params;
    params.perplexity = 15;
    std::vector<double> kl;
    auto y = tsne(data, params, &kl);
    REQUIRE(kl.size() == params.iterations);
    for (std::size_t i = kl.size() - 100; i < kl.size(); ++i)
        CHECK(kl[i] <= kl[i - 1] + 1e-6);
    for (const auto& p : y)
        CHECK((std::isfinite(p[0]) && std::isfinite(p[1])));
}

TEST_CASE("tsne parameter checks") {
    auto data = gaussian_clusters(5, 2, 3, 1);
    TsneParams p;
    p.perplexity = 3.0;  // (10 - 1) / 3
    CHECK_THROWS_AS(tsne(data, p), ParameterError);
    p.perplexity = 2.9;
    CHECK_NOTHROW(tsne(data, p));
    CHECK_THROWS_AS(tsne(Matrix{2, 2, {0, 1, 1, 0}}, p), ParameterError);
}

TEST_CASE("project_2d attaches classes and renders") {
    auto kg = parse_triples("a\ttype\tCar\nb\ttype\tCar\nc\ttype\tPed\nd\ttype\tPed\nx,\"y\ttype\tPed\n");
    ModelConfig c;
    c.dimension = 4;
    EmbeddingModel m(c, kg.entity_count(), kg.relation_count());
    std::mt19937_64 rng(3);
    skge_test::fill_uniform(m.entity_data(), rng);
    auto p = project_2d(m, kg.entities(), {"a", "b", "c", "d", "x,\"y"}, ProjectionMethod::PCA, {}, &kg);
    REQUIRE(p.points.size() == 5);
    CHECK(p.points[0].class_label == "Car");
    CHECK(p.points[2].class_label == "Ped");
    auto csv = projection_to_csv(p);
    CHECK(csv.rfind("label,x,y,class\n", 0) == 0);
    CHECK(csv.find("\"x,\"\"y\"") != std::string::npos);
    auto svg = projection_to_svg(p);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("Car") != std::string::npos);

    auto all = project_2d(m, kg.entities(), {}, ProjectionMethod::PCA, {});
    CHECK(all.points.size() == kg.entity_count());
    CHECK(all.points[0].class_label.empty());
    CHECK_THROWS_AS(project_2d(m, kg.entities(), {"a", "missing"}, ProjectionMethod::PCA, {}), ValidationError);
    CHECK(parse_projection_method("TSNE") == ProjectionMethod::TSNE);
}
