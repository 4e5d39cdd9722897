// Copyright 2026 the hnmfk authors.
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <vector>

#include "hnmfk/rng.hpp"
#include "hnmfk/wilcoxon.hpp"

using namespace hnmfk;

namespace {

// independent enumeration oracle: recursive subset walk over rank positions
double enumerate_two_sided_p(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> pooled(a);
    pooled.insert(pooled.end(), b.begin(), b.end());
    std::vector<double> sorted = pooled;
    std::sort(sorted.begin(), sorted.end());
    double observed = 0.0;
    for (double v : a) {
        const auto at = std::lower_bound(sorted.begin(), sorted.end(), v) - sorted.begin();
        observed += static_cast<double>(at) + 1.0;
    }
    const std::size_t n = pooled.size();
    const std::size_t na = a.size();
    std::size_t total = 0, le = 0, ge = 0;
    std::vector<std::size_t> pick;
    auto walk = [&](auto&& self, std::size_t from) -> void {
        if (pick.size() == na) {
            double sum = 0.0;
            for (std::size_t r : pick) sum += static_cast<double>(r) + 1.0;
            ++total;
            if (sum <= observed + 1e-9) ++le;
            if (sum >= observed - 1e-9) ++ge;
            return;
        }
        for (std::size_t r = from; r < n; ++r) {
            pick.push_back(r);
            self(self, r + 1);
            pick.pop_back();
        }
    };
    walk(walk, 0);
    const double p = 2.0 * static_cast<double>(std::min(le, ge)) / static_cast<double>(total);
    return std::min(1.0, p);
}

std::vector<double> random_tie_free(std::size_t n, UniformRng& rng) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.next();
    return v;
}

}  // namespace

TEST_CASE("identical samples give p = 1", "[wilcoxon]") {
    const std::vector<double> a{1.0, 2.0, 3.0};
    REQUIRE(wilcoxon_ranksum(a, a) == Catch::Approx(1.0));
    // degenerate constants as well
    const std::vector<double> c{5.0, 5.0, 5.0, 5.0};
    REQUIRE(wilcoxon_ranksum(c, c) == Catch::Approx(1.0));
}

TEST_CASE("fully separated small samples", "[wilcoxon]") {
    const std::vector<double> a{1, 2, 3};
    const std::vector<double> b{4, 5, 6};
    REQUIRE(wilcoxon_ranksum(a, b) == Catch::Approx(0.1));
}

TEST_CASE("test is symmetric in its arguments", "[wilcoxon]") {
    UniformRng rng(44);
    for (int c = 0; c < 20; ++c) {
        const auto a = random_tie_free(2 + rng.next_index(8), rng);
        const auto b = random_tie_free(2 + rng.next_index(8), rng);
        REQUIRE(wilcoxon_ranksum(a, b) == Catch::Approx(wilcoxon_ranksum(b, a)));
    }
}

TEST_CASE("exact branch matches the enumeration oracle", "[wilcoxon]") {
    UniformRng rng(7);
    for (std::size_t na = 1; na <= 7; ++na) {
        for (std::size_t nb = 1; nb + na <= 12; ++nb) {
            const auto a = random_tie_free(na, rng);
            const auto b = random_tie_free(nb, rng);
            REQUIRE(wilcoxon_ranksum(a, b) ==
                    Catch::Approx(enumerate_two_sided_p(a, b)).margin(1e-12));
        }
    }
}

TEST_CASE("approximation near the exact boundary", "[wilcoxon]") {
    UniformRng rng(8);
    for (int c = 0; c < 10; ++c) {
        // 17 pooled values force the normal branch; enumeration still feasible
        const auto a = random_tie_free(8, rng);
        const auto b = random_tie_free(9, rng);
        const double approx = wilcoxon_ranksum(a, b);
        const double exact = enumerate_two_sided_p(a, b);
        REQUIRE(std::abs(approx - exact) <= 0.02);
    }
}

TEST_CASE("tied data uses the corrected approximation", "[wilcoxon]") {
    const std::vector<double> a{1, 1, 2, 2, 3};
    const std::vector<double> b{2, 2, 3, 3, 4};
    const double p = wilcoxon_ranksum(a, b);
    REQUIRE(p > 0.0);
    REQUIRE(p <= 1.0);
    // constant-vs-constant distinct values: maximal separation, small p
    const std::vector<double> lo(20, 0.0);
    const std::vector<double> hi(20, 1.0);
    REQUIRE(wilcoxon_ranksum(lo, hi) < 0.01);
}

TEST_CASE("empty samples are rejected", "[wilcoxon]") {
    REQUIRE_THROWS_AS(wilcoxon_ranksum({}, {1.0}), DataError);
    REQUIRE_THROWS_AS(wilcoxon_ranksum({1.0}, {}), DataError);
}
