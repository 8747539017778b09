#pragma once

#include "sarith/analytic.hpp"
#include "sarith/lattice.hpp"

#include <functional>
#include <optional>
#include <string>

namespace sarith {

// ---------------------------------------------------------------------------
// Approximating functions.
// ---------------------------------------------------------------------------

// One-variable family psi(k) = c k^{-e} (ln(k+shift))^{-g}. g = 0 gives the
// plain power family, which is exactly rational; g > 0 values are certified
// brackets.
struct PsiFamily {
    Rat c{1};
    long e = 0;
    long g = 0;
    long shift = 1;

    bool exact() const { return g == 0; }
    RatInterval value(const Rat& k, int ln_terms = 24) const;
    // sign of psi(k) - target; refines the ln bracket until decided.
    int compare(const Rat& k, const Rat& target) const;
};

struct ApproxFunction {
    enum class Kind { single, psi0, quasinorm };
    Kind kind = Kind::single;
    PsiFamily psi;        // single and quasinorm
    std::vector<Rat> v;   // quasinorm weights, positive, summing to n

    // sign of Psi(a) - target, exact (adaptive brackets for the log family).
    int compare(const std::vector<Int>& a, const Places& S, const Rat& target) const;
    // Exact value where the function is rational-valued; throws otherwise.
    Rat value_exact(const std::vector<Int>& a, const Places& S) const;
    // Display value.
    double value_approx(const std::vector<Int>& a, const Places& S) const;
};

// Psi_0(a) = prod over nonzero coordinates of |a_i|_S^{-1}.
Rat psi0_value(const std::vector<Int>& a, const Places& S);

// ---------------------------------------------------------------------------
// Points of Q_S^m with exact rational coordinates at every place.
// ---------------------------------------------------------------------------
struct SPoint {
    std::vector<Rat> inf;
    std::map<long long, std::vector<Rat>> fin;

    const std::vector<Rat>& at(long long p) const;  // p = 0 means infinity
};

enum class NonzeroConvention { a_nonzero, pair_nonzero };

// Evaluation context: the places, the map f, the inhomogeneous part Theta,
// and which nonzero convention the solution sets use.
struct ApproxContext {
    Places S;
    AnalyticMap f;
    AnalyticMap theta;
    NonzeroConvention convention = NonzeroConvention::a_nonzero;

    void validate() const;
};

// |a0 + a.f(x) + Theta(x)|_S and the per-place values (exact rationals).
struct FormValue {
    std::vector<std::pair<long long, Rat>> per_place;  // place (0 = inf) -> value
    Rat norm_S{0};
};
FormValue form_value(const ApproxContext& ctx, const SPoint& x, const Int& a0,
                     const std::vector<Int>& a, bool include_theta = true);

// |a0 + a.f(x) + Theta(x)|_S^l <= Psi(a-tilde or a), the convention chosen by
// whether S contains the infinite place.
bool is_approximable(const ApproxContext& ctx, const SPoint& x, const std::vector<Int>& a,
                     const Int& a0, const ApproxFunction& Psi);

struct Witness {
    Int a0;
    std::vector<Int> a;
    Rat value_norm;  // |a0 + a.f(x) + Theta(x)|_S
};

struct SearchResult {
    std::vector<Witness> witnesses;
    bool complete = true;
    long pairs_examined = 0;
};

// Complete list of witnesses with heights <= T (sup norm of a, or of
// a-tilde when S omits the infinite place).
SearchResult solution_search(const ApproxContext& ctx, const SPoint& x, const ApproxFunction& Psi,
                             const Int& T, long budget = 50000000);

// Witnesses whose height lies in [lo, hi); single-finite-place fast path.
SearchResult solution_search_window(const ApproxContext& ctx, const SPoint& x,
                                    const ApproxFunction& Psi, const Int& lo, const Int& hi,
                                    long budget = 50000000);

// ---------------------------------------------------------------------------
// Phi^f(Q, delta) of the divergence section (single finite prime).
// ---------------------------------------------------------------------------
struct PhiResult {
    bool member = false;
    std::optional<Witness> witness;      // a witness when member
    bool exact_zero_witness = false;     // witness value exactly 0
    bool lambda1_gt_1 = false;           // from the Gamma_x lattice route
    int j = 0;                           // p^{-j} = largest p-power below delta Q^{-(n+1)}
};

// Membership by exhaustive search over heights <= Q; the Gamma_x route is run
// alongside, and the two provable implications (lattice point in the box =>
// member; non-member => lambda_1 > 1) are enforced as hard invariants.
PhiResult phi_membership(long long p, const AnalyticMap& f, const std::vector<Rat>& x, const Int& Q,
                         const Rat& delta);

// Largest j with p^{-j} < bound (the floor identity bridging strict and
// non-strict inequalities).
int j_from_bound(long long p, const Rat& bound);

// ---------------------------------------------------------------------------
// Large/small derivative split (phi(inf) = 1-eps, phi(finite) = -eps).
// ---------------------------------------------------------------------------
struct PlaceSplit {
    long long place = 0;  // 0 = infinity
    Rat grad_norm{0};
    bool large = false;       // grad > ||a||_S^{phi(place)}
    bool borderline = false;  // equality, resolved as small
};
struct SplitReport {
    std::vector<PlaceSplit> places;
    bool overall_large = false;             // large at every place
    std::vector<long long> small_places;    // places in the small set
};
SplitReport derivative_split(const ApproxContext& ctx, const SPoint& x, const std::vector<Int>& a,
                             const Rat& eps);

// ---------------------------------------------------------------------------
// Transference sets I_t^nu, H_t^nu and the intersection property.
// ---------------------------------------------------------------------------
struct TransferenceParams {
    Rat eps;     // 0 < eps < 1/(4(n+1) l^2)
    Rat delta;   // 0 < delta <= eps/2
    int l = 0;   // |S|
    int n = 0;
    std::vector<int> t;  // multi-index in Z_{>=0}^n
    Rat alpha1{1};       // exponent imported from the flow-theoretic bound; opaque input

    void validate(bool strict_eps_cap = true) const;
    int t_order() const;
    PowerProduct phi_delta() const;                 // 2^{delta |t|}
    PowerProduct r_nu(long long place) const;       // eq-style r function
    Rat psi0_of_2t() const;                         // Psi_0(2^t) = 2^{-|t|}
};

enum class SetKind { I, H };

bool it_ht_membership(const ApproxContext& ctx, const TransferenceParams& params, const SPoint& x,
                      const Int& a0, const std::vector<Int>& a, const PowerProduct& lambda,
                      long long nu, SetKind which);

struct IntersectionWitness {
    Int a0;
    std::vector<Int> a;
    bool ok = false;
    std::vector<std::string> failed;  // which H-inequality failed, if any
};
// alpha'' = alpha - alpha' with verification of the three H-inequalities and
// a'' != 0. Preconditions (distinct alphas, |t| large, both I-memberships)
// are enforced.
IntersectionWitness intersection_witness(const ApproxContext& ctx, const TransferenceParams& params,
                                         const SPoint& x, const Int& a0, const std::vector<Int>& a,
                                         const Int& b0, const std::vector<Int>& b, long long nu);

// ---------------------------------------------------------------------------
// Series audits.
// ---------------------------------------------------------------------------
struct SeriesAudit {
    Rat gamma_case1{0};  // (eps - 2 delta) / (l(n+1)) * alpha1
    Rat gamma_case2{0};  // (eps - 2 delta + 1) / (l(n+1)) * alpha1
    bool gamma1_positive = false;
    bool gamma2_positive = false;
    RatInterval partial;     // sum over |t| <= horizon of 2^{-gamma |t|}
    RatInterval total;       // closed form (1 - 2^{-gamma})^{-n}
    RatInterval tail_bound;  // certified geometric tail bound
    bool summable = false;
    bool bracket_ok = false;  // partial <= total <= partial + tail bound
    std::string epsilon1_exponent_note;
};
SeriesAudit series_audit(const TransferenceParams& params, bool nu_is_infinite, int horizon);

enum class SeriesClass { convergent, divergent, undecided };

struct BorelCantelliReport {
    SeriesClass cls = SeriesClass::undecided;
    RatInterval partial;
    std::optional<RatInterval> tail_upper;  // integral-test bound for convergent tails
    int horizon = 0;
};
// Convergence classification of sum k^{n} psi(k) (inf not in S) or
// sum k^{n-1} psi(k) (inf in S), with exact partial sums and integral-test
// tail bracketing.
BorelCantelliReport borel_cantelli_sum(const PsiFamily& psi, int n, bool inf_in_S, long horizon);

struct LowerOrderReport {
    std::vector<std::pair<double, double>> grid;  // (t, -log psi(t)/log t)
    double estimate = 0;                          // inf over the top quarter of the grid
};
LowerOrderReport lower_order(const PsiFamily& psi, int log2_horizon);
// General form: caller supplies t -> ln psi(t).
LowerOrderReport lower_order(const std::function<double(double)>& ln_psi, int log2_horizon);

}  // namespace sarith
