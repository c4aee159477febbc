#include "doctest.h"

#include "skge/error.hpp"
#include "skge/models.hpp"

#include "oracles.hpp"

#include <cmath>
#include <random>

using namespace skge;
using skge_test::brute_correlation;

namespace {

EmbeddingModel tiny(Algorithm a, std::size_t d, std::size_t n = 2, std::size_t m = 1, Norm norm = Norm::L2) {
    ModelConfig c;
    c.algorithm = a;
    c.dimension = d;
    c.transe_norm = norm;
    return EmbeddingModel(c, n, m);
}

void set(std::span<double> dst, std::initializer_list<double> v) { std::copy(v.begin(), v.end(), dst.begin()); }

EmbeddingModel random_model(Algorithm a, std::size_t d, std::size_t n, std::size_t m, std::mt19937_64& rng,
                            Norm norm = Norm::L2) {
    auto model = tiny(a, d, n, m, norm);
    skge_test::fill_uniform(model.entity_data(), rng);
    skge_test::fill_uniform(model.relation_data(), rng);
    return model;
}

}  // namespace

TEST_CASE("algorithm and norm names") {
    CHECK(parse_algorithm("transe") == Algorithm::TransE);
    CHECK(parse_algorithm("RESCAL") == Algorithm::RESCAL);
    CHECK(parse_algorithm("HolE") == Algorithm::HolE);
    CHECK_THROWS_AS(parse_algorithm("distmult"), ParameterError);
    CHECK(parse_norm("l1") == Norm::L1);
    CHECK(to_string(Algorithm::HolE) == "HolE");
}

TEST_CASE("zero dimension is rejected") { CHECK_THROWS_AS(tiny(Algorithm::TransE, 0), ParameterError); }

TEST_CASE("TransE score examples") {
    auto m = tiny(Algorithm::TransE, 2, 2, 1);
    set(m.entity(0), {0, 0});
    set(m.relation(0), {1, 1});
    set(m.entity(1), {1, 1});
    CHECK(score(m, {0, 0, 1}) == 0.0);

    set(m.entity(0), {1, 0});
    set(m.relation(0), {0, 1});
    set(m.entity(1), {0, 0});
    CHECK(score(m, {0, 0, 1}) == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-15));

    auto l1 = tiny(Algorithm::TransE, 2, 2, 1, Norm::L1);
    set(l1.entity(0), {1, 0});
    set(l1.relation(0), {0, 1});
    CHECK(score(l1, {0, 0, 1}) == -2.0);
}

TEST_CASE("TransE score is monotone in the residual and never positive") {
    std::mt19937_64 rng(3);
    auto m = random_model(Algorithm::TransE, 6, 3, 1, rng);
    for (int i = 0; i < 50; ++i) {
        skge_test::fill_uniform(m.entity_data(), rng);
        CHECK(score(m, {0, 0, 1}) <= 0.0);
    }
    // moving t further along the residual lowers the score
    set(m.entity(0), {0, 0, 0, 0, 0, 0});
    set(m.relation(0), {0, 0, 0, 0, 0, 0});
    double prev = 1.0;
    for (double s = 0.0; s < 3.0; s += 0.5) {
        set(m.entity(1), {s, 0, 0, 0, 0, 0});
        const double sc = score(m, {0, 0, 1});
        CHECK(sc < prev);
        prev = sc;
    }
}

TEST_CASE("RESCAL score examples") {
    auto m = tiny(Algorithm::RESCAL, 2, 2, 1);
    set(m.entity(0), {1, 0});
    set(m.entity(1), {1, 0});
    set(m.relation(0), {1, 0, 0, 1});
    CHECK(score(m, {0, 0, 1}) == 1.0);

    set(m.entity(1), {0, 1});
    set(m.relation(0), {0, 1, 0, 0});
    CHECK(score(m, {0, 0, 1}) == 1.0);
}

TEST_CASE("HolE with the delta head scores r . t") {
    std::mt19937_64 rng(11);
    auto m = random_model(Algorithm::HolE, 2, 2, 1, rng);
    set(m.entity(0), {1, 0});
    const double expected = m.relation(0)[0] * m.entity(1)[0] + m.relation(0)[1] * m.entity(1)[1];
    CHECK(score(m, {0, 0, 1}) == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("circular correlation examples") {
    std::vector<double> a{1, 0}, b{3.5, -2};
    CHECK(circular_correlation(a, b) == b);
    std::vector<double> x{1, 2}, y{3, 4};
    auto c = circular_correlation(x, y);
    CHECK(c[0] == 11.0);
    CHECK(c[1] == 10.0);
    auto f = circular_correlation_fft(x, y);
    CHECK(f[0] == doctest::Approx(11.0).epsilon(1e-12));
    CHECK(f[1] == doctest::Approx(10.0).epsilon(1e-12));
    std::vector<double> bad{1, 2, 3};
    CHECK_THROWS_AS(circular_correlation(x, bad), ParameterError);
}

TEST_CASE("fast and direct correlation agree with the definition") {
    std::mt19937_64 rng(17);
    for (std::size_t d : {1u, 2u, 3u, 8u, 47u, 48u, 64u, 100u, 128u}) {
        for (int rep = 0; rep < 20; ++rep) {
            std::vector<double> a(d), b(d);
            skge_test::fill_uniform(a, rng);
            skge_test::fill_uniform(b, rng);
            const auto oracle = brute_correlation(a, b);
            const auto fast = circular_correlation_fft(a, b);
            const auto dispatched = circular_correlation(a, b);
            for (std::size_t k = 0; k < d; ++k) {
                CHECK(std::abs(fast[k] - oracle[k]) < 1e-9);
                CHECK(std::abs(dispatched[k] - oracle[k]) < 1e-9);
            }
        }
    }
}

TEST_CASE("circular convolution matches its definition") {
    std::mt19937_64 rng(23);
    for (std::size_t d : {3u, 16u, 64u}) {
        std::vector<double> a(d), b(d);
        skge_test::fill_uniform(a, rng);
        skge_test::fill_uniform(b, rng);
        auto conv = circular_convolution(a, b);
        for (std::size_t k = 0; k < d; ++k) {
            double s = 0;
            for (std::size_t i = 0; i < d; ++i)
                s += a[i] * b[(k + d - i) % d];
            CHECK(std::abs(conv[k] - s) < 1e-9);
        }
    }
}

TEST_CASE("out-of-range ids are rejected") {
    auto m = tiny(Algorithm::TransE, 2, 2, 1);
    CHECK_THROWS_AS(score(m, {2, 0, 1}), ParameterError);
    CHECK_THROWS_AS(score(m, {0, 1, 1}), ParameterError);
}

TEST_CASE("inactive hinge gives zero loss and no gradient") {
    auto m = tiny(Algorithm::TransE, 2, 3, 1);
    set(m.entity(0), {0, 0});
    set(m.relation(0), {1, 0});
    set(m.entity(1), {1, 0});
    set(m.entity(2), {-5, 0});
    auto lg = loss_and_grad(m, {0, 0, 1}, {0, 0, 2}, 1.0);
    CHECK(lg.loss == 0.0);
    CHECK(lg.gradient.empty());
}

TEST_CASE("loss_and_grad preconditions") {
    auto m = tiny(Algorithm::TransE, 2, 3, 2);
    CHECK_THROWS_AS(loss_and_grad(m, {0, 0, 1}, {0, 0, 2}, 0.0), ParameterError);
    CHECK_THROWS_AS(loss_and_grad(m, {0, 0, 1}, {0, 1, 2}, 1.0), ParameterError);
    CHECK_THROWS_AS(loss_and_grad(m, {0, 0, 1}, {2, 0, 2}, 1.0), ParameterError);
    CHECK_THROWS_AS(loss_and_grad(m, {0, 0, 1}, {0, 0, 1}, 1.0), ParameterError);
}

TEST_CASE("gradient matches central finite differences") {
    for (Algorithm a : {Algorithm::TransE, Algorithm::RESCAL, Algorithm::HolE}) {
        CAPTURE(to_string(a));
        std::mt19937_64 rng(1000 + static_cast<int>(a));
        int done = 0;
        double worst = 0.0;
        while (done < 100) {
            auto m = random_model(a, 4, 5, 2, rng);
            const Triple pos{static_cast<EntityId>(rng() % 5), static_cast<RelationId>(rng() % 2),
                             static_cast<EntityId>(rng() % 5)};
            Triple neg = pos;
            EntityId& slot = (rng() & 1) ? neg.head : neg.tail;
            slot = static_cast<EntityId>(rng() % 5);
            if (neg == pos)
                continue;
            const double margin = 1.0;
            // keep away from the hinge kink so differences stay smooth
            if (skge_test::hinge(m, pos, neg, margin) < 1e-3)
                continue;
            auto r = skge_test::finite_difference_check(m, pos, neg, margin);
            worst = std::max(worst, r.max_rel_error);
            ++done;
        }
        CHECK(worst < 1e-4);
    }
}

TEST_CASE("gradient only touches involved rows") {
    std::mt19937_64 rng(5);
    for (Algorithm a : {Algorithm::TransE, Algorithm::RESCAL, Algorithm::HolE}) {
        auto m = random_model(a, 4, 10, 3, rng);
        const Triple pos{1, 2, 3}, neg{1, 2, 7};
        auto lg = loss_and_grad(m, pos, neg, 100.0);
        REQUIRE(lg.loss > 0.0);
        CHECK(lg.gradient.entities.size() <= 4);
        CHECK(lg.gradient.relations.size() <= 2);
        for (const auto& row : lg.gradient.entities)
            CHECK((row.id == 1 || row.id == 3 || row.id == 7));
        for (const auto& row : lg.gradient.relations)
            CHECK(row.id == 2);
    }
}

TEST_CASE("parameter counts follow the complexity classes") {
    const std::size_t n = 7, m = 3;
    for (std::size_t d : {2u, 4u, 8u}) {
        CHECK(tiny(Algorithm::TransE, d, n, m).parameter_count() == n * d + m * d);
        CHECK(tiny(Algorithm::HolE, d, n, m).parameter_count() == n * d + m * d);
        CHECK(tiny(Algorithm::RESCAL, d, n, m).parameter_count() == n * d + m * d * d);
    }
}

TEST_CASE("non-finite parameters are detected") {
    auto m = tiny(Algorithm::HolE, 3, 2, 1);
    CHECK(m.all_finite());
    m.relation(0)[1] = std::nan("");
    CHECK_FALSE(m.all_finite());
}
