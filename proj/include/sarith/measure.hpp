#pragma once

#include "sarith/polynomial.hpp"

#include <functional>
#include <optional>

namespace sarith {

// Exact bracketing of a Haar measure. lower == upper means fully resolved;
// otherwise the gap is unresolved mass left behind by the depth/node caps.
struct MeasureBounds {
    Rat lower{0};
    Rat upper{0};
    int resolved_depth = 0;
    bool resolved = true;

    Rat exact() const {
        if (!resolved) throw precision_error("measure not fully resolved");
        return lower;
    }
};

struct MeasureOptions {
    int depth_cap = 12;
    long node_budget = 200000;
};

// mu({x in B : |f(x)|_p < p^{-M}}), exact recursion over residue digits.
// Strict inequality as in the goodness definition; epsilon restricted to
// powers of p keeps every sublevel set a finite union of balls.
MeasureBounds sublevel_measure_exact(const Poly& f, const PAdicBall& B, long M,
                                     const MeasureOptions& opts = {});

// mu({x in B : max_i |f_i(x)|_p < p^{-M}}) — the sublevel set of the sup of a
// family, used by the G2 property checks.
MeasureBounds sublevel_measure_joint(const std::vector<Poly>& fs, const PAdicBall& B, long M,
                                     const MeasureOptions& opts = {});

// sup_B |f|_p as an exact bracket [lower, upper]; lower is always attained by
// a sampled point, upper is a coefficient bound, equal when resolved.
struct SupBounds {
    Rat lower{0};
    Rat upper{0};
    bool resolved = true;
};
SupBounds sup_abs_exact(const Poly& f, const PAdicBall& B, const MeasureOptions& opts = {});

enum class GoodVerdict { pass, violation, inconclusive };

struct GoodPair {
    long M = 0;              // epsilon = p^{-M}
    MeasureBounds measure;   // left side
    double rhs_approx = 0;   // C (eps/sup)^alpha |B|, for display only
    GoodVerdict verdict = GoodVerdict::inconclusive;
};

struct GoodReport {
    PowerProduct C;
    Rat alpha{0};
    SupBounds sup;
    std::vector<GoodPair> pairs;
    bool sup_vacuous = false;  // f == 0 on B; inequality vacuous

    bool all_pass() const {
        for (const auto& p : pairs)
            if (p.verdict != GoodVerdict::pass) return false;
        return true;
    }
    bool any_violation() const {
        for (const auto& p : pairs)
            if (p.verdict == GoodVerdict::violation) return true;
        return false;
    }
};

// Check the (C, alpha)-good inequality for every epsilon = p^{-M}, M in
// [1, M_max]. Exact comparisons; an unresolved measure yields
// "inconclusive", never a false "violation".
GoodReport good_certify(const Poly& f, const PAdicBall& B, const PowerProduct& C, const Rat& alpha,
                        long M_max = 10, const MeasureOptions& opts = {});

// Slice-wise certification plus the product-ball check with (dC, alpha/d) of
// the product corollary. Slices constant in their variable fall under the
// C' >= max{C,1} relaxation automatically.
struct ProductGoodReport {
    std::vector<GoodReport> slice_reports;  // sampled fibers, variable-major
    GoodReport product_report;
    bool pass = false;
};
ProductGoodReport product_good_check(const Poly& f, const PAdicBall& B, const PowerProduct& C,
                                     const Rat& alpha, long M_max = 8, int fibers_per_var = 3,
                                     const MeasureOptions& opts = {});

// Monte Carlo estimate of mu{x in B : pred(x)} / mu(B). Deterministic for a
// fixed seed; indeterminate predicate evaluations (precision_error) are
// counted separately, never folded into either side.
struct McEstimate {
    std::uint64_t samples = 0;
    std::uint64_t hits = 0;
    std::uint64_t misses = 0;
    std::uint64_t indeterminate = 0;

    double estimate() const { return samples ? double(hits) / double(samples) : 0.0; }
    double sigma() const {
        if (!samples) return 0.0;
        double e = estimate();
        return std::sqrt(e * (1 - e) / double(samples));
    }
};
McEstimate measure_mc(const std::function<bool(const std::vector<Rat>&)>& pred, const PAdicBall& B,
                      std::uint64_t samples, std::uint64_t seed, int digits = kDefaultPrecision);

// Uniform Haar sample from B, keyed by (seed, index).
std::vector<Rat> sample_ball(const PAdicBall& B, std::uint64_t seed, std::uint64_t index,
                             int digits = kDefaultPrecision);

}  // namespace sarith
