#include <cmath>
#include <numbers>
#include <numeric>

#include "doctest.h"
#include "prophet/distributions.hpp"
#include "prophet/errors.hpp"

using namespace prophet;

TEST_SUITE("distributions") {

TEST_CASE("sampling") {
    CounterStream s(1, 0);
    CHECK(sample_many(Uniform01{}, 0, s).empty());
    const Distribution point = DiscreteWeighted({5.0}, {1.0});
    CHECK(sample_many(point, 3, s) == std::vector<double>{5.0, 5.0, 5.0});

    CounterStream s42(42, 0);
    const auto draws = sample_many(Exponential{1.0}, 1'000'000, s42);
    const double m = std::accumulate(draws.begin(), draws.end(), 0.0) / static_cast<double>(draws.size());
    CHECK(std::abs(m - 1.0) < 3e-3);
    for (double x : draws) REQUIRE(x >= 0.0);
}

TEST_CASE("discrete sampling hits atoms with their masses") {
    const Distribution d = DiscreteWeighted({1.0, 2.0, 7.0}, {0.2, 0.5, 0.3});
    CounterStream s(9, 2);
    const auto draws = sample_many(d, 200000, s);
    const auto c7 = std::count(draws.begin(), draws.end(), 7.0);
    const auto c1 = std::count(draws.begin(), draws.end(), 1.0);
    CHECK(c1 + c7 + std::count(draws.begin(), draws.end(), 2.0) == 200000);
    // SE of a frequency near 0.3 at 2e5 draws is about 1e-3
    CHECK(std::abs(c7 / 200000.0 - 0.3) < 5e-3);
    CHECK(std::abs(c1 / 200000.0 - 0.2) < 5e-3);
}

TEST_CASE("cdf") {
    CHECK(cdf(Uniform01{}, 0.3) == doctest::Approx(0.3));
    CHECK(cdf(Uniform01{}, -1.0) == 0.0);
    CHECK(cdf(Uniform01{}, 2.0) == 1.0);
    CHECK(cdf(Exponential{1.0}, 0.0) == 0.0);
    CHECK(cdf(Exponential{2.0}, 1.0) == doctest::Approx(1.0 - std::exp(-2.0)));
    const Distribution d = DiscreteWeighted({1.0, 2.0}, {0.25, 0.75});
    CHECK(cdf(d, 1.5) == doctest::Approx(0.25));
    CHECK(cdf(d, 1.0) == doctest::Approx(0.25));
    CHECK(cdf_left(d, 1.0) == 0.0);
    CHECK(cdf_left(d, 2.0) == doctest::Approx(0.25));
    CHECK(cdf(d, 2.0) == 1.0);
}

TEST_CASE("quantile") {
    CHECK(quantile(Uniform01{}, 0.745) == doctest::Approx(0.745));
    CHECK(quantile(Exponential{1.0}, 1.0 - 1.0 / std::numbers::e) == doctest::Approx(1.0));
    const Distribution d = DiscreteWeighted({1.0, 2.0}, {0.25, 0.75});
    CHECK(quantile(d, 0.25) == 1.0);
    CHECK(quantile(d, 0.2500001) == 2.0);
    CHECK(quantile(d, 0.0) == 1.0);
    CHECK(quantile(d, 1.0) == 2.0);
    CHECK(quantile(Exponential{1.0}, 0.0) == 0.0);
    CHECK(std::isinf(quantile(Exponential{1.0}, 1.0)));
    CHECK_THROWS_AS(quantile(Uniform01{}, -0.1), DomainError);
    CHECK_THROWS_AS(quantile(Uniform01{}, 1.1), DomainError);
    CHECK_THROWS_AS(quantile(Uniform01{}, std::nan("")), DomainError);
}

TEST_CASE("upper_quantile agrees with quantile and keeps precision in the tail") {
    for (double tail : {0.9, 0.5, 0.1, 1e-3}) {
        CHECK(upper_quantile(Exponential{1.0}, tail) == doctest::Approx(quantile(Exponential{1.0}, 1.0 - tail)));
        CHECK(upper_quantile(Uniform01{}, tail) == doctest::Approx(1.0 - tail));
    }
    CHECK(upper_quantile(Exponential{1.0}, 1e-300) == doctest::Approx(300.0 * std::log(10.0)));
    CHECK_THROWS_AS(upper_quantile(Uniform01{}, 1.5), DomainError);
}

TEST_CASE("exact expected maximum") {
    CHECK(exact_expected_max(Exponential{1.0}, 1) == 1.0);
    double h = 0.0;
    for (int n = 1; n <= 50; ++n) {
        h += 1.0 / n;
        CHECK(exact_expected_max(Exponential{1.0}, n) == doctest::Approx(h).epsilon(1e-14));
    }
    CHECK(exact_expected_max(Exponential{2.0}, 3) == doctest::Approx((1.0 + 0.5 + 1.0 / 3) / 2));
    CHECK(exact_expected_max(DiscreteWeighted({0.0, 1.0}, {0.5, 0.5}), 2) == doctest::Approx(0.75));
    CHECK(exact_expected_max(Uniform01{}, 9) == doctest::Approx(0.9));
    // {1,2,3} each w.p. 1/3, n = 2: enumerate nine outcomes
    CHECK(exact_expected_max(DiscreteWeighted({1.0, 2.0, 3.0}, {1.0 / 3, 1.0 / 3, 1.0 / 3}), 2) ==
          doctest::Approx(22.0 / 9));
    CHECK_THROWS_AS(exact_expected_max(Uniform01{}, 0), DomainError);
}

TEST_CASE("expected_max_with_constant") {
    CHECK(expected_max_with_constant(Uniform01{}, 0.5) == doctest::Approx(0.625));
    CHECK(expected_max_with_constant(Uniform01{}, 0.0) == doctest::Approx(0.5));
    CHECK(expected_max_with_constant(Uniform01{}, 2.0) == doctest::Approx(2.0));
    CHECK(expected_max_with_constant(Exponential{1.0}, 0.0) == doctest::Approx(1.0));
    CHECK(expected_max_with_constant(Exponential{1.0}, 1.0) == doctest::Approx(1.0 + std::exp(-1.0)));
    CHECK(expected_max_with_constant(DiscreteWeighted({0.0, 1.0}, {0.5, 0.5}), 0.5) == doctest::Approx(0.75));
}

TEST_CASE("mean and top atom") {
    CHECK(mean(Uniform01{}) == 0.5);
    CHECK(mean(Exponential{4.0}) == 0.25);
    CHECK(mean(DiscreteWeighted({1.0, 3.0}, {0.5, 0.5})) == doctest::Approx(2.0));
    CHECK(!top_atom(Uniform01{}).has_value());
    CHECK(top_atom(DiscreteWeighted({1.0, 3.0}, {0.5, 0.5})) == 3.0);
}

TEST_CASE("discrete validation") {
    CHECK_THROWS_AS(DiscreteWeighted({}, {}), DomainError);
    CHECK_THROWS_AS(DiscreteWeighted({1.0, 2.0}, {1.0}), DomainError);
    CHECK_THROWS_AS(DiscreteWeighted({2.0, 1.0}, {0.5, 0.5}), DomainError);
    CHECK_THROWS_AS(DiscreteWeighted({1.0, 1.0}, {0.5, 0.5}), DomainError);
    CHECK_THROWS_AS(DiscreteWeighted({1.0, 2.0}, {0.5, 0.6}), DomainError);
    CHECK_THROWS_AS(DiscreteWeighted({1.0, 2.0}, {1.5, -0.5}), DomainError);
    CHECK_NOTHROW(DiscreteWeighted({1.0, 2.0}, {0.5, 0.5 + 5e-13}));
    CHECK_THROWS_AS(make_exponential(0.0), DomainError);
    CHECK_THROWS_AS(make_exponential(-1.0), DomainError);
    CHECK(kind_name(make_exponential(2.0)) == "exponential");
}

TEST_CASE("adversarial instances") {
    SUBCASE("three_point") {
        const auto d = adversarial_instance(AdversarialKind::ThreePoint, 4);
        REQUIRE(d.values().size() == 3);
        CHECK(d.values()[0] == 0.0);
        CHECK(d.values()[1] == 1.0);
        CHECK(d.values()[2] == doctest::Approx(2.0 / (std::numbers::e - 2.0)));
        CHECK(d.probs()[0] == doctest::Approx(1.0 - 0.5 - 0.125));
        CHECK(d.probs()[1] == doctest::Approx(0.5));
        CHECK(d.probs()[2] == doctest::Approx(0.125));
        CHECK_THROWS_AS(adversarial_instance(AdversarialKind::ThreePoint, 2), DomainError);
    }
    SUBCASE("rare_bernoulli") {
        const auto d = adversarial_instance(AdversarialKind::RareBernoulli, 10, 1.0);
        CHECK(d.values() == std::vector<double>{0.0, 1.0});
        CHECK(d.probs()[0] == doctest::Approx(0.9));
        CHECK(d.probs()[1] == doctest::Approx(0.1));
        CHECK_THROWS_AS(adversarial_instance(AdversarialKind::RareBernoulli, 10), DomainError);
        CHECK_THROWS_AS(adversarial_instance(AdversarialKind::RareBernoulli, 10, 0.0), DomainError);
    }
    SUBCASE("secretary_like") {
        const auto d = adversarial_instance(AdversarialKind::SecretaryLike, 2);
        REQUIRE(d.values().size() == 9);
        for (std::size_t i = 0; i < 8; ++i) CHECK(d.probs()[i] == doctest::Approx(0.125 * 0.75));
        CHECK(d.probs()[8] == doctest::Approx(0.25));
        CHECK(d.values()[8] > d.values()[7]);
    }
    CHECK_THROWS_AS(adversarial_instance(AdversarialKind::SecretaryLike, 1), DomainError);
}

}
