#pragma once

#include "sarith/polynomial.hpp"

#include <map>
#include <optional>

namespace sarith {

// Domain U as a product of per-place pieces: a real box at the infinite place
// and a p-adic ball per finite place.
struct DomainSpec {
    std::optional<std::vector<std::pair<Rat, Rat>>> inf_box;
    std::map<long long, PAdicBall> p_balls;

    bool contains_inf(std::span<const Rat> x) const;
    bool contains_p(long long p, const std::vector<Rat>& x) const;
};

// Polynomial map U -> Q^n with exact rational coefficients, evaluated place
// by place (the same coefficients define f_nu at every place).
struct AnalyticMap {
    int m = 1;
    int n = 1;
    std::vector<Poly> comps;
    DomainSpec domain;
    std::string name;

    static AnalyticMap veronese(int n);
    static AnalyticMap scalar(Poly f);
    static AnalyticMap zero_map(int m);  // Theta = 0

    void validate() const;
    bool is_zero() const;

    std::vector<Rat> eval(std::span<const Rat> x) const;
    std::vector<PAdicNumber> eval_padic(const std::vector<PAdicNumber>& x,
                                        bool check_domain = true) const;

    // a0 + a . f + theta as a single polynomial (theta may be null).
    Poly linear_form(const Int& a0, std::span<const Int> a, const AnalyticMap* theta) const;
};

// ||grad g (x)||_p = max_i |d_i g(x)|_p, exact.
Rat gradient_norm_p(const Poly& g, std::span<const Rat> x, long long p);
// Archimedean counterpart (sup norm of the gradient).
Rat gradient_norm_inf(const Poly& g, std::span<const Rat> x);
std::vector<Rat> gradient(const Poly& g, std::span<const Rat> x);

// Smallest l <= lmax such that the partial derivatives of F at x up to order
// l span Q^n (rank computed by exact elimination); nullopt if degenerate up
// to lmax.
std::optional<int> nondegeneracy_order(const AnalyticMap& F, std::span<const Rat> x, int lmax);

// Coordinate change of eq-style lin_sys1: A in GL_d(O) with every pure k-th
// partial of F o A nonzero at A^{-1} x0. Columns are sampled
// deterministically (lexicographic digits, depth digits base p) from the
// residue classes {1+pO} x {pO} x ... Throws if the search depth is
// exhausted.
struct CoordinateChange {
    std::vector<std::vector<Int>> columns;  // d columns of length d
    std::vector<Rat> pure_partials;         // d_i^k (F o A)(A^{-1} x0)
    bool identity = false;
};
CoordinateChange normalize_coordinates(const Poly& F, std::span<const Rat> x0, int k, long long p,
                                       int depth = 3);

// (I3)/(I5) normalization report on a sampled grid: ||f|| <= 1,
// ||grad f|| <= 1, |Phi_beta| <= 1/2 for second difference quotients.
struct NormalizationReport {
    bool sup_ok = false;
    bool grad_ok = false;
    bool second_dq_ok = false;
    Rat sup_bound{0};
    Rat grad_bound{0};
    Rat second_dq_bound{0};
    bool ok() const { return sup_ok && grad_ok && second_dq_ok; }
};
NormalizationReport i3_report(const AnalyticMap& f, long long p, const PAdicBall& U, int grid_depth = 2);

// Rescaling helper: smallest power p^e such that p^e * f passes i3 bounds on
// Z_p^m by coefficient estimates. Returns the scaled map and e; e = 0 means
// the map already conformed.
std::pair<AnalyticMap, int> rescale_to_i3(const AnalyticMap& f, long long p);

}  // namespace sarith
