#pragma once

#include "sarith/padic.hpp"

#include <optional>

namespace sarith {

// The lattice Gamma of the covolume lemma: integer vectors (q_0,...,q_n) with
// |q_0 + q_1 y_1 + ... + q_n y_n|_p <= p^{-j} and p | q_i for i >= 1.
// Basis columns: (p^j, 0, ..., 0) and (q_i, 0, ..., -p, ..., 0) with
// q_i == p y_i mod p^j, taken in [0, p^j). |det| = p^{j+n}.
struct GammaLattice {
    long long p = 0;
    int j = 0;
    int n = 0;
    std::vector<Rat> y;                   // exact representatives, |y_i|_p <= 1
    std::vector<Int> q;                   // canonical representatives in [0, p^j)
    std::vector<std::vector<Int>> basis;  // (n+1) columns of length n+1
    Int covolume;                         // p^{j+n}

    Int det_abs() const;  // |det(basis)|, computed, for the exactness check
};

GammaLattice build_gamma(const std::vector<PAdicNumber>& y, int j);
GammaLattice build_gamma(long long p, const std::vector<Rat>& y, int j);

struct MembershipResult {
    bool member = false;
    std::vector<Int> coeffs;  // basis * coeffs == q when member
};

// Decide membership by the defining congruences and return the coefficient
// witness from the inverse formula of the covolume lemma's proof.
MembershipResult lattice_membership(const GammaLattice& L, const std::vector<Int>& v);

struct MinimaResult {
    std::vector<Rat> lambda;                  // lambda_1 <= ... <= lambda_{n+1}
    std::vector<std::vector<Int>> witnesses;  // independent vectors, k-th in lambda_k K
    bool complete = true;                     // false when the budget truncated the search
    long tails_processed = 0;
};

struct MinimaOptions {
    long tail_budget = 30000000;  // tails examined before flagging a partial result
};

// Successive minima of L w.r.t. K = [-Q, Q]^{n+1} by exhaustive coefficient
// enumeration over tail shells with radius pruning. Exact rationals with
// denominator Q.
MinimaResult successive_minima(const GammaLattice& L, const Int& Q,
                               const MinimaOptions& opts = {});

// General integer-basis variant (columns), used for scaled lattices and as a
// second route in cross-checks.
MinimaResult successive_minima_general(const std::vector<std::vector<Int>>& basis, const Int& Q,
                                       const MinimaOptions& opts = {});

// True iff some nonzero lattice vector lies in [-Q, Q]^{n+1} (lambda_1 <= 1).
bool has_nonzero_point_in_box(const GammaLattice& L, const Int& Q);

struct MinkowskiReport {
    Rat lambda_product{0};
    Rat product_bound{0};  // covol / Q^{n+1}
    bool product_ok = false;
    bool first_minimum_ok = false;
    bool lambda1_gt_1 = false;
    // With delta supplied: covol <= Q^{n+1} p^{n+2}/delta and the paper's
    // lambda_{n+1} <= p^{n+2}/delta deduction.
    std::optional<bool> covol_bound_ok;
    std::optional<bool> lambda_last_ok;
    Rat slack{0};  // product_bound - lambda_product
};

MinkowskiReport minkowski_audit(const GammaLattice& L, const Int& Q, const MinimaResult& minima,
                                const std::optional<Rat>& delta = std::nullopt);

// Exact rank of a set of integer vectors.
int integer_rank(const std::vector<std::vector<Int>>& rows);

}  // namespace sarith
