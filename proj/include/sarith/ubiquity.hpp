#pragma once

#include "sarith/approx.hpp"

namespace sarith {

// A stage of the resonant pipeline failed; by the underlying theorem this is
// either a precondition violation or an implementation bug, so the failure
// names its stage.
struct stage_error : error {
    std::string stage;
    stage_error(std::string stg, const std::string& msg)
        : error(stg + ": " + msg), stage(std::move(stg)) {}
};

struct UbiquityConfig {
    long long p = 3;
    int n = 2;
    int m = 1;
    Int Q{16};
    Rat delta{1, 3};
    Rat w{1, 2};  // niceness weight, reporting only
    int max_q_doublings = 6;

    Rat lambda_threshold() const { return Rat(1) - Rat(2, p); }
    Rat kappa0() const { return delta * rat_pow(Rat(p), -(n + 2)) / Rat(3 * p * (n + 1)); }
    Rat kappa1() const { return Rat(p, p - 1) * delta; }
    Rat rho(const Int& q) const { return kappa1() * rat_pow(Rat(q), -(n + 1)); }
    int working_precision(const Int& q) const;
    void validate() const;
};

// Strong approximation: a rational r with |r - xi_inf| <= eps_inf,
// |r - xi_p|_p <= eps_p and |r|_q <= 1 at every other prime, under the
// hypothesis eps_inf >= (1/2) eps_p^{-1} p. Construction: the p-adic
// truncation of xi_p shifted along its p^M-spaced progression into the
// archimedean window (no shift when the truncation already lands inside).
Rat strong_approx(const Rat& xi_inf, const Rat& xi_p, long long p, const Rat& eps_inf,
                  const Rat& eps_p);
Rat strong_approx(const Rat& xi_inf, const PAdicNumber& xi_p, const Rat& eps_inf,
                  const Rat& eps_p);

struct HenselResult {
    PAdicNumber root;
    std::vector<long> residual_valuations;  // v(g(xi_k)) per iteration; last >= precision
    long root_valuation = 0;
};

// Newton iteration over Z_p at `precision` digits. Requires the Hensel
// condition |g(0)| < |g'(0)|^2; the returned root satisfies
// |root| <= |g(0)|/|g'(0)| and g(root) == 0 mod p^precision.
HenselResult hensel_root(const Poly& g, long long p, int precision = kDefaultPrecision);

struct ResonantCandidate {
    std::vector<Int> a;  // integer coefficients (a_0, ..., a_n)
    Rat beta{0};         // kappa_0 |a|
    Int q_used{0};
    int j = 0;  // p^{-j} = largest p-power below delta Q^{-(n+1)}

    Rat value_norm{0};    // |(F+Theta)(x)|_p
    Rat partial_norm{0};  // |d_1(F+Theta)(x)|_p
    Int a_inf_norm{0};    // max_i |a_i|

    Rat zero_coord{0};  // x_1 + xi_0 (representative to working precision)
    Rat distance{0};    // |x - x_zero|_p
    std::vector<long> hensel_valuations;

    bool integrality_ok = false;
    bool condition1_ok = false;  // |(F+Theta)(x)|_p <= delta Q^{-(n+1)}
    bool partial_ok = false;     // 1 - 1/p <= |d_1(F+Theta)(x)|_p <= 1
    bool a_infty_ok = false;     // |a_i| <= 3p(n+1) Q p^{n+2}/delta
    bool beta_ok = false;        // kappa_0 p Q < beta <= Q
    bool distance_ok = false;    // distance <= rho(Q)
    bool exact_resonance = false;

    bool all_certificates() const {
        return integrality_ok && condition1_ok && partial_ok && a_infty_ok && beta_ok &&
               distance_ok;
    }
};

// The constructive core of the ubiquity theorem: given x with lambda_1 > 1
// for Gamma_x, produce an integer form F with certified bounds and a nearby
// zero of F + Theta. Throws stage_error on any stage failure.
ResonantCandidate resonant_construct(const std::vector<Rat>& x, const UbiquityConfig& cfg,
                                     const AnalyticMap& f, const AnalyticMap& theta);

// Retry wrapper: doubles Q on the retryable stage failures ("sufficiently
// large Q"), up to cfg.max_q_doublings; reports the Q actually used.
ResonantCandidate resonant_construct_with_retries(const std::vector<Rat>& x,
                                                  const UbiquityConfig& cfg, const AnalyticMap& f,
                                                  const AnalyticMap& theta);

// One-sided membership in Delta(R, r) given the certified zeros of the
// resonant set: membership is certified, non-membership only relative to the
// known zeros.
struct DeltaResult {
    bool certified_member = false;
    Rat known_distance{0};  // distance to the nearest known zero
};
DeltaResult delta_neighborhood(const std::vector<Rat>& x, const std::vector<std::vector<Rat>>& zeros,
                               long long p, const Rat& r);

struct CoverRow {
    int t = 0;
    std::uint64_t samples = 0;
    std::uint64_t constructed = 0;       // resonant candidate with all certificates
    std::uint64_t lattice_members = 0;   // lambda_1 <= 1 (certified in Phi^f)
    std::uint64_t failures = 0;          // pipeline failures off the lattice route
    double frequency = 0;                // constructed / samples
    double member_frequency = 0;         // lattice_members / samples
    double floor_estimate = 0;           // 1 - member_frequency - failure rate
    double sigma = 0;
};

// Monte Carlo estimate of |union of Delta(R_F, rho(2^t)) over beta_F <= 2^t|
// relative to |B|: the construction succeeds off the lattice-certified part
// of Phi^f(2^t, delta), so the frequency is floored by 1 - member frequency.
CoverRow covering_check(const PAdicBall& B, int t, const UbiquityConfig& cfg, const AnalyticMap& f,
                        const AnalyticMap& theta, std::uint64_t samples, std::uint64_t seed);

}  // namespace sarith
