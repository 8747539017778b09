#include "doctest.h"

#include "sarith/measure.hpp"

using namespace sarith;

namespace {

Poly univar(std::initializer_list<std::pair<int, Rat>> coeffs) {
    Poly f(1);
    for (const auto& [e, c] : coeffs) f.set_coeff({e}, c);
    return f;
}

// Independent oracle: count residues a mod p^{M+1} with f(a) == 0 mod p^{M+1}.
Rat brute_sublevel(const Poly& f, long long p, long M, int d) {
    Int mod = int_pow(Int(p), static_cast<unsigned long>(M + 1));
    Int total = int_pow(mod, static_cast<unsigned long>(d));
    Int count = 0;
    std::vector<Rat> x(static_cast<std::size_t>(d));
    for (Int it = 0; it < total; ++it) {
        Int rest = it;
        for (int i = 0; i < d; ++i) {
            x[static_cast<std::size_t>(i)] = Rat(mod_floor(rest, mod));
            rest = floor_div(rest, mod);
        }
        Rat v = f.eval(x);
        if (v == 0 || vp_rat(v, Int(p)) >= M + 1) ++count;
    }
    return Rat(count, total);
}

Poly random_poly(CounterRng& rng, int nvars, int maxdeg) {
    Poly f(nvars);
    std::vector<int> cur(static_cast<std::size_t>(nvars), 0);
    auto gen = [&](auto&& self, int pos, int rem) -> void {
        if (pos == nvars - 1) {
            cur[static_cast<std::size_t>(pos)] = rem;
            f.set_coeff(cur, Rat(rng.next_symmetric(20)));
            return;
        }
        for (int v = 0; v <= rem; ++v) {
            cur[static_cast<std::size_t>(pos)] = v;
            self(self, pos + 1, rem - v);
        }
    };
    for (int dd = 0; dd <= maxdeg; ++dd) gen(gen, 0, dd);
    return f;
}

}  // namespace

TEST_CASE("sublevel: linear map on Z_3") {
    // {|x| < 3^-2} = 27 Z_3, measure 3^-3
    PAdicBall B{3, {Rat(0)}, 0};
    auto m = sublevel_measure_exact(univar({{1, Rat(1)}}), B, 2);
    CHECK(m.resolved);
    CHECK(m.exact() == Rat(1, 27));
}

TEST_CASE("sublevel: x^2 on Z_3 at eps = 3^{-2k}") {
    PAdicBall B{3, {Rat(0)}, 0};
    for (long k = 1; k <= 4; ++k) {
        auto m = sublevel_measure_exact(univar({{2, Rat(1)}}), B, 2 * k);
        CHECK(m.exact() == rat_pow(Rat(3), -(k + 1)));
    }
}

TEST_CASE("sublevel: constant with |c| >= eps is empty") {
    PAdicBall B{3, {Rat(0)}, 0};
    auto m = sublevel_measure_exact(univar({{0, Rat(9)}}), B, 2);
    CHECK(m.exact() == 0);
}

TEST_CASE("sublevel equals brute-force residue counting") {
    CounterRng rng(101, 0);
    for (int trial = 0; trial < 24; ++trial) {
        long long p = (trial % 2 == 0) ? 3 : 5;
        int d = (trial % 4 < 2) ? 1 : 2;
        long M = 1 + static_cast<long>(rng.next_below(d == 1 ? 4 : 2));
        Poly f = random_poly(rng, d, d == 1 ? 4 : 3);
        if (f.is_zero()) continue;
        PAdicBall B{p, std::vector<Rat>(static_cast<std::size_t>(d), Rat(0)), 0};
        auto m = sublevel_measure_exact(f, B, M);
        REQUIRE(m.resolved);
        CHECK(m.exact() == brute_sublevel(f, p, M, d));
    }
}

TEST_CASE("sublevel monotone in eps and additive over disjoint balls") {
    Poly f = univar({{2, Rat(1)}, {1, Rat(3)}, {0, Rat(-2)}});
    PAdicBall B{3, {Rat(0)}, 0};
    Rat prev(1);
    for (long M = 1; M <= 6; ++M) {
        Rat cur = sublevel_measure_exact(f, B, M).exact();
        CHECK(cur <= prev);
        prev = cur;
    }
    // additivity: Z_3 = union of 3 residue balls
    for (long M = 1; M <= 4; ++M) {
        Rat whole = sublevel_measure_exact(f, B, M).exact();
        Rat parts(0);
        for (int r = 0; r < 3; ++r)
            parts += sublevel_measure_exact(f, PAdicBall{3, {Rat(r)}, 1}, M).exact();
        CHECK(whole == parts);
    }
}

TEST_CASE("sup_abs_exact") {
    PAdicBall B{3, {Rat(0)}, 0};
    auto s = sup_abs_exact(univar({{1, Rat(1)}}), B);
    CHECK(s.resolved);
    CHECK(s.lower == 1);

    // x^3 - x vanishes mod 3 everywhere on Z_3: sup is 1/3
    auto s2 = sup_abs_exact(univar({{3, Rat(1)}, {1, Rat(-1)}}), B);
    CHECK(s2.resolved);
    CHECK(s2.lower == Rat(1, 3));

    auto s3 = sup_abs_exact(univar({{0, Rat(1, 9)}}), B);
    CHECK(s3.lower == Rat(9));
}

TEST_CASE("good_certify: x^k passes (k^{3-1/k}, 1/k) on Z_p") {
    for (long long p : {3LL, 5LL}) {
        for (int k = 1; k <= 4; ++k) {
            Poly f = univar({{k, Rat(1)}});
            PAdicBall B{p, {Rat(0)}, 0};
            PowerProduct C(Rat(k), Rat(3 * k - 1, k));  // k^{3 - 1/k}
            auto rep = good_certify(f, B, C, Rat(1, k), 10);
            CHECK(rep.all_pass());
        }
    }
}

TEST_CASE("good_certify: nonzero constants are vacuously good for C >= 1") {
    PAdicBall B{5, {Rat(0)}, 0};
    auto rep = good_certify(univar({{0, Rat(7)}}), B, PowerProduct(Rat(1)), Rat(1), 8);
    CHECK(rep.all_pass());
}

TEST_CASE("good_certify: x(x-1) on Z_5 with (2*2^{3-1/2}, 1/2)") {
    Poly f = univar({{2, Rat(1)}, {1, Rat(-1)}});
    PAdicBall B{5, {Rat(0)}, 0};
    PowerProduct C = PowerProduct(Rat(2)) * PowerProduct(Rat(2), Rat(5, 2));
    auto rep = good_certify(f, B, C, Rat(1, 2), 8);
    CHECK(rep.all_pass());
}

TEST_CASE("good_certify flags violations for absurd constants") {
    // x on Z_3 with C tiny and alpha = 1: mu{|x|<eps} = eps/3 > C*eps for C < 1/3
    Poly f = univar({{1, Rat(1)}});
    PAdicBall B{3, {Rat(0)}, 0};
    auto rep = good_certify(f, B, PowerProduct(Rat(1, 100)), Rat(1), 6);
    CHECK(rep.any_violation());
}

TEST_CASE("G1: scaling preserves the verdict") {
    Poly f = univar({{3, Rat(1)}, {1, Rat(2)}});
    PAdicBall B{3, {Rat(0)}, 0};
    PowerProduct C(Rat(3), Rat(8, 3));
    Rat alpha(1, 3);
    auto r1 = good_certify(f, B, C, alpha, 8);
    for (Rat lambda : {Rat(9), Rat(1, 27), Rat(-5)}) {
        auto r2 = good_certify(f.scaled(lambda), B, C, alpha, 8);
        CHECK(r1.all_pass() == r2.all_pass());
    }
}

TEST_CASE("G2: sup of certified family is certified with the same constants") {
    Poly f1 = univar({{2, Rat(1)}});
    Poly f2 = univar({{2, Rat(1)}, {0, Rat(-1)}});
    PAdicBall B{3, {Rat(0)}, 0};
    PowerProduct C(Rat(2), Rat(5, 2));
    Rat alpha(1, 2);
    CHECK(good_certify(f1, B, C, alpha, 8).all_pass());
    CHECK(good_certify(f2, B, C, alpha, 8).all_pass());
    // sup family: mu{max(|f1|,|f2|) < eps} <= C (eps/sup)^alpha |B| with
    // sup = max of the two sups.
    auto s1 = sup_abs_exact(f1, B);
    auto s2 = sup_abs_exact(f2, B);
    Rat sup = std::max(s1.lower, s2.lower);
    REQUIRE((s1.resolved && s2.resolved));
    for (long M = 1; M <= 8; ++M) {
        Rat mu = sublevel_measure_joint({f1, f2}, B, M).exact();
        if (mu == 0) continue;
        PowerProduct rhs = C * PowerProduct(rat_pow(Rat(3), -M) / sup).pow(alpha);
        CHECK(PowerProduct(mu).compare(rhs) <= 0);
    }
}

TEST_CASE("G3: norm-equivalent functions certified with C (c2/c1)^alpha") {
    Poly f = univar({{2, Rat(1)}, {1, Rat(3)}});
    PAdicBall B{3, {Rat(0)}, 0};
    PowerProduct C(Rat(2), Rat(5, 2));
    Rat alpha(1, 2);
    REQUIRE(good_certify(f, B, C, alpha, 8).all_pass());
    // g = f/9: constant norm ratio, same verdict with C unchanged
    auto rep = good_certify(f.scaled(Rat(1, 9)), B, C, alpha, 8);
    CHECK(rep.all_pass());
}

TEST_CASE("product_good_check: xy on Z_3^2 passes (2C, alpha/2) form") {
    Poly f(2);
    f.set_coeff({1, 1}, Rat(1));
    PAdicBall B{3, {Rat(0), Rat(0)}, 0};
    // slices are linear, (1,1)-good; product: (2, 1/2)
    auto rep = product_good_check(f, B, PowerProduct(Rat(1)), Rat(1), 6);
    CHECK(rep.pass);
    CHECK(rep.product_report.all_pass());
}

TEST_CASE("product_good_check: f(x,y) = x is handled by the C' >= 1 relaxation") {
    Poly f(2);
    f.set_coeff({1, 0}, Rat(1));
    PAdicBall B{3, {Rat(0), Rat(0)}, 0};
    auto rep = product_good_check(f, B, PowerProduct(Rat(1)), Rat(1), 5);
    CHECK(rep.pass);  // constant-in-y slices pass vacuously with C >= 1
}

TEST_CASE("product_good_check reduces to good_certify for d = 1") {
    Poly f = univar({{2, Rat(1)}});
    PAdicBall B{3, {Rat(0)}, 0};
    PowerProduct C(Rat(2), Rat(5, 2));
    auto rep = product_good_check(f, B, C, Rat(1, 2), 6);
    CHECK(rep.pass == good_certify(f, B, C, Rat(1, 2), 6).all_pass());
}

TEST_CASE("measure_mc: trivial predicate and digit frequency") {
    PAdicBall B{3, {Rat(0)}, 0};
    auto all = measure_mc([](const std::vector<Rat>&) { return true; }, B, 500, 42);
    CHECK(all.estimate() == 1.0);
    CHECK(all.indeterminate == 0);

    auto third = measure_mc(
        [](const std::vector<Rat>& x) { return x[0] == 0 || vp_rat(x[0], Int(3)) >= 1; }, B, 10000,
        42);
    CHECK(std::abs(third.estimate() - 1.0 / 3.0) <= 3 * third.sigma());
}

TEST_CASE("measure_mc converges at the binomial rate on exact events") {
    PAdicBall B{5, {Rat(0)}, 0};
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        for (long k : {1L, 2L}) {
            auto mc = measure_mc(
                [&](const std::vector<Rat>& x) { return x[0] == 0 || vp_rat(x[0], Int(5)) >= k; },
                B, 20000, seed);
            double exact = std::pow(5.0, -double(k));
            CHECK(std::abs(mc.estimate() - exact) <= 3 * std::max(mc.sigma(), 1e-4));
        }
    }
}

TEST_CASE("measure_mc counts indeterminate evaluations separately") {
    PAdicBall B{3, {Rat(0)}, 0};
    auto mc = measure_mc(
        [](const std::vector<Rat>& x) -> bool {
            if (vp_rat(x[0] + 1, Int(3)) >= 1) throw precision_error("synthetic");
            return true;
        },
        B, 3000, 7);
    CHECK(mc.indeterminate > 0);
    CHECK(mc.hits + mc.misses + mc.indeterminate == mc.samples);
}

TEST_CASE("sampling is deterministic for a fixed seed") {
    PAdicBall B{3, {Rat(0), Rat(0)}, 1};
    auto a = sample_ball(B, 9, 4);
    auto b = sample_ball(B, 9, 4);
    CHECK(a == b);
    CHECK(B.contains(a));
}
