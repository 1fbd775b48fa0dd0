// SPDX-License-Identifier: Apache-2.0
//
// waveformlab: multicarrier waveform and iterative detector simulation
// Copyright (C) 2026 The waveformlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "test_support.hpp"

#include "catch_amalgamated.hpp"

#include <thread>

using namespace wfl;
using wfl::test::max_diff;

TEST_CASE("unitary fft of an impulse is flat", "[numerics][fft]") {
    cvec e = cvec::Zero(8);
    e[0] = 1.0;
    const cvec f = unitary_fft(e, false);
    for (const auto& v : f) {
        CHECK(std::abs(v - cplx(1.0 / std::sqrt(8.0), 0.0)) < 1e-15);
    }
}

TEST_CASE("unitary fft round trip", "[numerics][fft]") {
    Rng rng(11);
    for (std::size_t n : {1, 2, 3, 8, 12, 64, 100, 512}) {
        const cvec v = test::random_vector(rng, n);
        CHECK(max_diff(unitary_fft(unitary_fft(v, false), true), v) < 1e-12);
    }
}

TEST_CASE("unitary fft matches the dense DFT", "[numerics][fft]") {
    const cvec v = (cvec(4) << 1.0, wfl::j1, -1.0, -wfl::j1).finished();
    const cvec got = unitary_fft(v, false);
    CHECK(max_diff(got, test::dft_oracle(4) * v) < 1e-14);
    // e^{j pi n / 2} sits entirely in bin 1
    CHECK(std::abs(got[1] - cplx(2.0, 0.0)) < 1e-14);

    Rng rng(3);
    for (std::size_t n : {5, 16, 24, 37}) {
        const cvec w = test::random_vector(rng, n);
        INFO("n = " << n);
        CHECK(max_diff(unitary_fft(w, false), test::dft_oracle(n) * w) < 1e-12);
        CHECK(max_diff(unitary_fft(w, true), test::dft_oracle(n, true) * w) < 1e-12);
    }
}

TEST_CASE("Parseval holds for the unitary fft", "[numerics][fft][property]") {
    Rng rng(5);
    for (std::size_t n : {4, 64, 512}) {
        for (int rep = 0; rep < 20; ++rep) {
            const cvec v = test::random_vector(rng, n);
            CHECK(std::abs(unitary_fft(v, false).norm() - v.norm()) < 1e-12 * v.norm());
        }
    }
}

TEST_CASE("fft rejects a length mismatch", "[numerics][fft]") {
    const FftPlan plan(8);
    CHECK_THROWS_AS(plan.apply(cvec::Zero(4), false), std::invalid_argument);
}

TEST_CASE("PRNG stream matches the reference implementation", "[numerics][rng]") {
    // tests/reference/prng_reference.py
    Rng rng(42);
    CHECK(rng.next_u64() == 0x15780b2e0c2ec716ULL);
    CHECK(rng.next_u64() == 0x6104d9866d113a7eULL);
    CHECK(rng.next_u64() == 0xae17533239e499a1ULL);
    CHECK(rng.next_u64() == 0xecb8ad4703b360a1ULL);
}

TEST_CASE("random permutation golden values", "[numerics][permutation]") {
    // tests/reference/prng_reference.py
    CHECK(random_permutation(8, 42).forward() == std::vector<std::size_t>{7, 2, 4, 0, 3, 5, 1, 6});
    CHECK(random_permutation(16, 7).forward() ==
          std::vector<std::size_t>{3, 11, 12, 4, 15, 9, 5, 0, 7, 6, 1, 13, 2, 8, 14, 10});
}

TEST_CASE("random permutation basics", "[numerics][permutation]") {
    SECTION("n = 1 is the identity") {
        for (std::uint64_t seed : {0ULL, 1ULL, 99ULL}) CHECK(random_permutation(1, seed).forward() == std::vector<std::size_t>{0});
    }
    SECTION("n = 0 is rejected") { CHECK_THROWS_AS(random_permutation(0, 1), std::invalid_argument); }
    SECTION("forward then inverse is the identity") {
        Rng rng(8);
        for (std::size_t n : {2, 7, 64, 513}) {
            const auto p = random_permutation(n, n * 31);
            const cvec v = test::random_vector(rng, n);
            CHECK(p.apply_inverse(p.apply(v)) == v);
            CHECK(p.apply(p.apply_inverse(v)) == v);
            for (std::size_t i = 0; i < n; ++i) CHECK(p.inverse()[p.forward()[i]] == i);
        }
    }
    SECTION("same seed, same map, on any thread") {
        const auto here = random_permutation(1024, 2024);
        PermutationMap there;
        std::thread worker([&] { there = random_permutation(1024, 2024); });
        worker.join();
        CHECK(here == there);
        CHECK_FALSE(here == random_permutation(1024, 2025));
    }
}

TEST_CASE("IF transform", "[numerics][if]") {
    Rng rng(21);
    SECTION("identity permutation is the plain IFFT") {
        const cvec s = test::random_vector(rng, 32);
        CHECK(max_diff(if_transform(s, PermutationMap::identity(32), false), unitary_fft(s, true)) < 1e-15);
    }
    SECTION("N = 4, seed 7 matches the dense P F^H") {
        const auto perm = random_permutation(4, 7);
        const cvec s = test::random_vector(rng, 4);
        const cmat u = test::permutation_oracle(perm.forward()) * test::dft_oracle(4, true);
        CHECK(max_diff(if_transform(s, perm, false), u * s) < 1e-14);
        CHECK(max_diff(if_transform(s, perm, true), u.adjoint() * s) < 1e-14);
    }
    SECTION("energy preserved and inverse recovers the input") {
        for (std::size_t n : {4, 9, 64, 256}) {
            const auto perm = random_permutation(n, 5 + n);
            for (int rep = 0; rep < 10; ++rep) {
                const cvec s = test::random_vector(rng, n);
                const cvec x = if_transform(s, perm, false);
                CHECK(std::abs(x.norm() - s.norm()) < 1e-12 * s.norm());
                CHECK(max_diff(if_transform(x, perm, true), s) < 1e-10);
            }
        }
    }
    SECTION("size mismatch") { CHECK_THROWS_AS(if_transform(cvec::Zero(8), random_permutation(4, 1), false), std::invalid_argument); }
}

TEST_CASE("spectral bounds", "[numerics][spectral]") {
    SECTION("identity") {
        const auto b = spectral_bounds(DenseOperator(cmat::Identity(8, 8)));
        CHECK(b.lambda_min <= 1.0);
        CHECK(std::abs(b.lambda_max - 1.0) < 1e-6);
    }
    SECTION("2 I") {
        const auto b = spectral_bounds(DenseOperator(2.0 * cmat::Identity(8, 8)));
        CHECK(std::abs(b.lambda_max - 4.0) < 1e-5);
    }
    SECTION("zero operator") {
        const auto b = spectral_bounds(DenseOperator(cmat::Zero(8, 8)));
        CHECK(b.lambda_min == 0.0);
        CHECK(b.lambda_max == 0.0);
    }
    SECTION("random 8x8 against a dense eigensolver") {
        Rng rng(4);
        for (int rep = 0; rep < 10; ++rep) {
            const cmat h = test::random_matrix(rng, 8, 8, 1.0 / 8.0);
            const double want = Eigen::SelfAdjointEigenSolver<cmat>(h * h.adjoint()).eigenvalues().maxCoeff();
            const auto b = spectral_bounds(DenseOperator(h), 2000, 1e-12);
            CHECK(std::abs(b.lambda_max - want) < 1e-4 * want);
            CHECK(b.lambda_min >= 0.0);
            CHECK(b.lambda_min <= b.lambda_max);
        }
    }
    SECTION("lambda_max bounds every Rayleigh quotient") {
        Rng rng(6);
        const cmat h = test::random_matrix(rng, 16, 16, 1.0 / 16.0);
        const auto b = spectral_bounds(DenseOperator(h));
        for (int rep = 0; rep < 100; ++rep) {
            const cvec x = test::random_vector(rng, 16);
            CHECK((h * x).squaredNorm() / x.squaredNorm() <= b.lambda_max * (1.0 + 1e-6));
        }
    }
}

TEST_CASE("Wilson interval", "[numerics][stats]") {
    SECTION("contains the point estimate") {
        for (std::uint64_t k : {0ULL, 1ULL, 17ULL, 500ULL, 1000ULL}) {
            const auto [lo, hi] = wilson_interval(k, 1000);
            const double p = static_cast<double>(k) / 1000.0;
            CHECK(lo <= p);
            CHECK(p <= hi);
        }
    }
    SECTION("width shrinks as one over root n at fixed rate") {
        double prev = 0.0;
        for (std::uint64_t n : {10000ULL, 40000ULL, 160000ULL, 640000ULL}) {
            const auto [lo, hi] = wilson_interval(n / 100, n);
            const double width = hi - lo;
            if (prev > 0.0) CHECK(std::abs(prev / width - 2.0) < 0.02);
            prev = width;
        }
    }
    SECTION("textbook value") {
        // 10 of 100 at 95%: [0.0552, 0.1744]
        const auto [lo, hi] = wilson_interval(10, 100);
        CHECK(std::abs(lo - 0.05522) < 1e-4);
        CHECK(std::abs(hi - 0.17437) < 1e-4);
    }
}

TEST_CASE("normal helpers", "[numerics][stats]") {
    for (double p : {1e-6, 0.01, 0.2, 0.5, 0.9, 0.999}) CHECK(std::abs(normal_cdf(normal_quantile(p)) - p) < 1e-12);
    CHECK(std::abs(q_function(1.0) - 0.15865525393145707) < 1e-15);

    Rng rng(12);
    std::vector<double> samples;
    for (int i = 0; i < 20000; ++i) samples.push_back(rng.normal_pair()[0]);
    CHECK(ks_statistic(samples) < 1.36 / std::sqrt(20000.0));
    std::vector<double> shifted = samples;
    for (auto& s : shifted) s += 0.5;
    CHECK(ks_statistic(shifted) > 0.15);
}
