#include "sarith/approx.hpp"

#include <algorithm>
#include <cmath>

namespace sarith {

// ---------------------------------------------------------------------------
// Psi families
// ---------------------------------------------------------------------------

RatInterval PsiFamily::value(const Rat& k, int ln_terms) const {
    if (c < 0) throw domain_error("psi: c >= 0 required");
    if (e < 0 || g < 0) throw domain_error("psi: non-increasing family requires e, g >= 0");
    if (k <= 0) throw domain_error("psi: argument must be positive");
    if (c == 0) return RatInterval(Rat(0));  // the degenerate Psi == 0
    Rat power = c * rat_pow(k, -e);
    if (g == 0) return RatInterval(power);
    RatInterval ln = ln_bracket(k + shift, ln_terms);
    if (ln.lo <= 0) throw domain_error("psi: ln(k+shift) must be positive");
    RatInterval lg = ln.pow_int(g).reciprocal();
    return RatInterval(power * lg.lo, power * lg.hi);
}

int PsiFamily::compare(const Rat& k, const Rat& target) const {
    for (int terms = 24; terms <= 3072; terms *= 2) {
        RatInterval v = value(k, terms);
        int c0 = v.compare(target);
        if (c0 != 0) return c0;
        if (v.is_point()) return 0;
    }
    throw precision_error("psi: comparison undecided at maximal refinement");
}

Rat psi0_value(const std::vector<Int>& a, const Places& S) {
    Rat prod(1);
    bool any = false;
    for (const Int& ai : a) {
        if (ai == 0) continue;
        any = true;
        prod /= sadic_abs_int(ai, S);
    }
    if (!any) throw domain_error("psi0: zero vector");
    return prod;
}

namespace {

Int sup_norm(const std::vector<Int>& a) {
    Int h = 0;
    for (const Int& x : a) h = std::max(h, int_abs(x));
    return h;
}

}  // namespace

int ApproxFunction::compare(const std::vector<Int>& a, const Places& S, const Rat& target) const {
    switch (kind) {
        case Kind::single: {
            Int h = sup_norm(a);
            if (h == 0) throw domain_error("psi: zero vector has no height");
            return psi.compare(Rat(h), target);
        }
        case Kind::psi0: {
            Rat v = psi0_value(a, S);
            return v == target ? 0 : (v < target ? -1 : 1);
        }
        case Kind::quasinorm: {
            if (!psi.exact())
                throw domain_error("quasinorm kind requires the plain power family");
            if (target <= 0) return 1;  // Psi is positive
            // Psi(a) = c ||a||_v^{-e}; compare via exact power products.
            PowerProduct norm = quasinorm_v_exact(a, v);
            PowerProduct lhs = PowerProduct(psi.c) * norm.pow(Rat(-psi.e));
            return lhs.compare(target);
        }
    }
    throw domain_error("psi: unknown kind");
}

Rat ApproxFunction::value_exact(const std::vector<Int>& a, const Places& S) const {
    switch (kind) {
        case Kind::single: {
            Int h = sup_norm(a);
            if (h == 0) throw domain_error("psi: zero vector has no height");
            if (!psi.exact()) throw domain_error("psi: log family value is not rational");
            return psi.c * rat_pow(Rat(h), -psi.e);
        }
        case Kind::psi0:
            return psi0_value(a, S);
        case Kind::quasinorm: {
            PowerProduct norm = quasinorm_v_exact(a, v);
            PowerProduct val = PowerProduct(psi.c) * norm.pow(Rat(-psi.e));
            return val.exact_rational();  // throws when irrational
        }
    }
    throw domain_error("psi: unknown kind");
}

double ApproxFunction::value_approx(const std::vector<Int>& a, const Places& S) const {
    switch (kind) {
        case Kind::single: {
            Int h = sup_norm(a);
            if (h == 0) throw domain_error("psi: zero vector has no height");
            RatInterval val = psi.value(Rat(h));
            return (to_double(val.lo) + to_double(val.hi)) / 2;
        }
        case Kind::psi0:
            return to_double(psi0_value(a, S));
        case Kind::quasinorm: {
            PowerProduct norm = quasinorm_v_exact(a, v);
            return (PowerProduct(psi.c) * norm.pow(Rat(-psi.e))).to_double();
        }
    }
    return 0;
}

// ---------------------------------------------------------------------------
// Points and the evaluation context
// ---------------------------------------------------------------------------

const std::vector<Rat>& SPoint::at(long long p) const {
    if (p == 0) return inf;
    auto it = fin.find(p);
    if (it == fin.end()) throw domain_error("SPoint: no coordinates at the requested place");
    return it->second;
}

void ApproxContext::validate() const {
    S.validate();
    f.validate();
    if (!theta.is_zero()) {
        theta.validate();
        if (theta.m != f.m || theta.n != 1) throw domain_error("context: Theta shape mismatch");
    }
}

namespace {

// Per-(context, point) evaluation cache: f, Theta and all their first
// partials at every place, so that the per-pair work in searches is a plain
// rational dot product.
struct PlaceEval {
    long long place = 0;  // 0 = infinity
    std::vector<Rat> y;          // f_i(x)
    Rat theta{0};                // Theta(x)
    std::vector<std::vector<Rat>> dy;  // dy[var][i] = d_var f_i (x)
    std::vector<Rat> dtheta;           // d_var Theta (x)
};

struct EvalCache {
    std::vector<PlaceEval> places;

    // a0 + a.f(x) (+ theta) at one place.
    static Rat form_at(const PlaceEval& pe, const Int& a0, const std::vector<Int>& a,
                       bool include_theta) {
        Rat acc(a0);
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i] != 0) acc += Rat(a[i]) * pe.y[i];
        if (include_theta) acc += pe.theta;
        return acc;
    }
    static Rat place_norm(const PlaceEval& pe, const Rat& v) {
        if (v == 0) return Rat(0);
        return pe.place == 0 ? rat_abs(v) : padic_abs(v, Int(pe.place));
    }
    // || grad (a.f (+ theta)) ||  at one place.
    static Rat grad_norm_at(const PlaceEval& pe, const std::vector<Int>& a, bool include_theta) {
        Rat best(0);
        for (std::size_t var = 0; var < pe.dy.size(); ++var) {
            Rat acc = include_theta ? pe.dtheta[var] : Rat(0);
            for (std::size_t i = 0; i < a.size(); ++i)
                if (a[i] != 0) acc += Rat(a[i]) * pe.dy[var][i];
            best = std::max(best, place_norm(pe, acc));
        }
        return best;
    }
};

EvalCache make_cache(const ApproxContext& ctx, const SPoint& x) {
    EvalCache cache;
    auto add_place = [&](long long place) {
        const std::vector<Rat>& pt = x.at(place);
        PlaceEval pe;
        pe.place = place;
        pe.y = ctx.f.eval(pt);
        pe.theta = ctx.theta.is_zero() ? Rat(0) : ctx.theta.comps.front().eval(pt);
        pe.dy.resize(static_cast<std::size_t>(ctx.f.m));
        pe.dtheta.assign(static_cast<std::size_t>(ctx.f.m), Rat(0));
        for (int var = 0; var < ctx.f.m; ++var) {
            for (const Poly& c : ctx.f.comps)
                pe.dy[static_cast<std::size_t>(var)].push_back(c.partial(var).eval(pt));
            if (!ctx.theta.is_zero())
                pe.dtheta[static_cast<std::size_t>(var)] =
                    ctx.theta.comps.front().partial(var).eval(pt);
        }
        cache.places.push_back(std::move(pe));
    };
    if (ctx.S.has_inf) add_place(0);
    for (long long p : ctx.S.primes) add_place(p);
    return cache;
}

FormValue form_value_cached(const EvalCache& cache, const Int& a0, const std::vector<Int>& a,
                            bool include_theta) {
    FormValue out;
    for (const PlaceEval& pe : cache.places) {
        Rat v = EvalCache::form_at(pe, a0, a, include_theta);
        out.per_place.emplace_back(pe.place, v);
        out.norm_S = std::max(out.norm_S, EvalCache::place_norm(pe, v));
    }
    return out;
}

}  // namespace

FormValue form_value(const ApproxContext& ctx, const SPoint& x, const Int& a0,
                     const std::vector<Int>& a, bool include_theta) {
    return form_value_cached(make_cache(ctx, x), a0, a, include_theta);
}

bool is_approximable(const ApproxContext& ctx, const SPoint& x, const std::vector<Int>& a,
                     const Int& a0, const ApproxFunction& Psi) {
    ctx.validate();
    FormValue fv = form_value(ctx, x, a0, a);
    Rat lhs = rat_pow(fv.norm_S, ctx.S.l());
    std::vector<Int> arg;
    if (ctx.S.has_inf) {
        arg = a;
    } else {
        arg.reserve(a.size() + 1);
        arg.push_back(a0);
        arg.insert(arg.end(), a.begin(), a.end());
    }
    // |a0 + a.f(x) + Theta(x)|_S^l <= Psi(arg)
    return Psi.compare(arg, ctx.S, lhs) >= 0;
}

// ---------------------------------------------------------------------------
// Witness searches
// ---------------------------------------------------------------------------

namespace {

void for_each_a(int n, const Int& T, const std::function<void(const std::vector<Int>&)>& fn) {
    std::vector<Int> a(static_cast<std::size_t>(n), 0);
    auto rec = [&](auto&& self, int pos) -> void {
        if (pos == n) {
            fn(a);
            return;
        }
        for (Int v = -T; v <= T; ++v) {
            a[static_cast<std::size_t>(pos)] = v;
            self(self, pos + 1);
        }
    };
    rec(rec, 0);
}

bool is_zero_vec(const std::vector<Int>& a) {
    for (const Int& x : a)
        if (x != 0) return false;
    return true;
}

}  // namespace

SearchResult solution_search(const ApproxContext& ctx, const SPoint& x, const ApproxFunction& Psi,
                             const Int& T, long budget) {
    if (T < 1) throw domain_error("solution_search: T >= 1 required");
    ctx.validate();
    EvalCache cache = make_cache(ctx, x);
    const PlaceEval* inf_pe = nullptr;
    for (const auto& pe : cache.places)
        if (pe.place == 0) inf_pe = &pe;
    SearchResult out;
    for_each_a(ctx.f.n, T, [&](const std::vector<Int>& a) {
        if (!out.complete) return;
        bool a_zero = is_zero_vec(a);
        if (a_zero && ctx.convention == NonzeroConvention::a_nonzero) return;
        Int lo, hi;
        if (ctx.S.has_inf) {
            if (a_zero) return;  // Psi(a) undefined at 0 for height-based kinds
            // |a0| <= |a.f(x) + Theta(x)| + Psi(a)^{1/l}, and Psi^{1/l} <= max(1, Psi).
            Rat w = rat_abs(EvalCache::form_at(*inf_pe, Int(0), a, true));
            Rat psi_hi(1);  // Psi_0 <= 1 on integer vectors when inf is a place
            if (Psi.kind == ApproxFunction::Kind::single)
                psi_hi = std::max(Rat(1), Psi.psi.value(Rat(sup_norm(a))).hi);
            else if (Psi.kind == ApproxFunction::Kind::quasinorm)
                psi_hi = std::max(Rat(1), Psi.psi.c);
            Rat wb = w + psi_hi + 1;
            Int w_ceil = -floor_div(-num(wb), den(wb));
            lo = -w_ceil;
            hi = w_ceil;
        } else {
            lo = -T;
            hi = T;
        }
        for (Int a0 = lo; a0 <= hi; ++a0) {
            if (a_zero && a0 == 0) continue;
            if (++out.pairs_examined > budget) {
                out.complete = false;
                return;
            }
            FormValue fv = form_value_cached(cache, a0, a, true);
            Rat lhs = rat_pow(fv.norm_S, ctx.S.l());
            std::vector<Int> arg;
            if (ctx.S.has_inf)
                arg = a;
            else {
                arg.push_back(a0);
                arg.insert(arg.end(), a.begin(), a.end());
            }
            if (Psi.compare(arg, ctx.S, lhs) >= 0)
                out.witnesses.push_back({a0, a, fv.norm_S});
        }
    });
    return out;
}

SearchResult solution_search_window(const ApproxContext& ctx, const SPoint& x,
                                    const ApproxFunction& Psi, const Int& lo, const Int& hi,
                                    long budget) {
    ctx.validate();
    if (lo < 1 || hi <= lo) throw domain_error("solution_search_window: need 1 <= lo < hi");
    if (ctx.S.has_inf || ctx.S.primes.size() != 1 ||
        Psi.kind == ApproxFunction::Kind::quasinorm ||
        (Psi.kind == ApproxFunction::Kind::single && Psi.psi.c == 0)) {
        // Generic fallback: search to hi-1 and filter by height.
        SearchResult all = solution_search(ctx, x, Psi, hi - 1, budget);
        SearchResult out;
        out.complete = all.complete;
        out.pairs_examined = all.pairs_examined;
        for (auto& w : all.witnesses) {
            Int h = std::max(int_abs(w.a0), sup_norm(w.a));
            if (h >= lo && h < hi) out.witnesses.push_back(std::move(w));
        }
        return out;
    }
    // Single finite place: a0 is pinned to a residue class mod p^K, where
    // p^{-K} <= psi(lo) is the weakest threshold across the window.
    long long p = ctx.S.primes.front();
    const std::vector<Rat>& xp = x.at(p);
    std::vector<Rat> y = ctx.f.eval(xp);
    Rat th = ctx.theta.is_zero() ? Rat(0) : ctx.theta.comps.front().eval(xp);
    RatInterval psi_lo = Psi.kind == ApproxFunction::Kind::single
                             ? Psi.psi.value(Rat(lo))
                             : RatInterval(Rat(1));  // psi0 <= 1 on integer vectors
    long K = 0;
    while (rat_pow(Rat(p), -(K + 1)) >= psi_lo.hi) ++K;
    SearchResult out;
    Int pK = int_pow(Int(p), static_cast<unsigned long>(K));
    for_each_a(ctx.f.n, hi - 1, [&](const std::vector<Int>& a) {
        if (!out.complete) return;
        if (is_zero_vec(a) && ctx.convention == NonzeroConvention::a_nonzero) return;
        Rat t = th;
        for (int i = 0; i < ctx.f.n; ++i)
            t += Rat(a[static_cast<std::size_t>(i)]) * y[static_cast<std::size_t>(i)];
        if (t != 0 && vp_rat(t, Int(p)) < 0) return;  // no integer a0 can make this small
        Int cls = t == 0 ? Int(0) : mod_floor(num(t) * mod_inverse(den(t), pK), pK);
        Int base = mod_floor(-cls, pK);
        // a0 in base + p^K Z intersected with (-hi, hi)
        Int start = base - pK * floor_div(base + hi - 1, pK);
        for (Int a0 = start; a0 < hi; a0 += pK) {
            if (int_abs(a0) >= hi) continue;
            if (is_zero_vec(a) && a0 == 0) continue;
            if (++out.pairs_examined > budget) {
                out.complete = false;
                return;
            }
            Int h = std::max(int_abs(a0), sup_norm(a));
            if (h < lo || h >= hi) continue;
            Rat val = Rat(a0) + t;
            Rat nrm = val == 0 ? Rat(0) : padic_abs(val, Int(p));
            std::vector<Int> arg;
            arg.push_back(a0);
            arg.insert(arg.end(), a.begin(), a.end());
            if (Psi.compare(arg, ctx.S, nrm) >= 0) out.witnesses.push_back({a0, a, nrm});
        }
    });
    return out;
}

// ---------------------------------------------------------------------------
// Phi^f(Q, delta)
// ---------------------------------------------------------------------------

int j_from_bound(long long p, const Rat& bound) {
    if (bound <= 0 || bound > 1) throw domain_error("j_from_bound: bound in (0,1] required");
    int j = 0;
    while (rat_pow(Rat(p), -j) >= bound) ++j;
    return j;
}

PhiResult phi_membership(long long p, const AnalyticMap& f, const std::vector<Rat>& x, const Int& Q,
                         const Rat& delta) {
    f.validate();
    if (Q <= 1) throw domain_error("phi_membership: Q > 1 required");
    if (delta <= 0 || delta >= 1) throw domain_error("phi_membership: delta in (0,1) required");
    std::vector<Rat> y = f.eval(x);
    for (const Rat& yi : y)
        if (yi != 0 && vp_rat(yi, Int(p)) < 0)
            throw domain_error("phi_membership: |f_i(x)|_p > 1 (map not normalized)");
    PhiResult out;
    Rat bound = delta * rat_pow(Rat(Q), -(f.n + 1));
    out.j = j_from_bound(p, bound);
    Int pj = int_pow(Int(p), static_cast<unsigned long>(out.j));

    // Exhaustive route: for each a, a0 is pinned to a residue class mod p^j.
    for_each_a(f.n, Q, [&](const std::vector<Int>& a) {
        if (out.member) return;
        Rat t(0);
        for (int i = 0; i < f.n; ++i)
            t += Rat(a[static_cast<std::size_t>(i)]) * y[static_cast<std::size_t>(i)];
        if (t != 0 && vp_rat(t, Int(p)) < 0) return;
        Int cls = t == 0 ? Int(0) : mod_floor(num(t) * mod_inverse(den(t), pj), pj);
        Int base = mod_floor(-cls, pj);
        Int start = base - pj * floor_div(base + Q, pj);
        for (Int a0 = start; a0 <= Q; a0 += pj) {
            if (int_abs(a0) > Q) continue;
            if (a0 == 0 && is_zero_vec(a)) continue;
            Rat val = Rat(a0) + t;
            bool small = val == 0 || vp_rat(val, Int(p)) >= out.j;
            if (!small) throw internal_error("phi_membership: residue-class candidate not small");
            out.member = true;
            out.witness = Witness{a0, a, val == 0 ? Rat(0) : padic_abs(val, Int(p))};
            out.exact_zero_witness = val == 0;
            return;
        }
    });

    // Lattice route plus the two provable implications: a lattice point in
    // the box is a witness, and a non-member forces lambda_1 > 1.
    auto L = build_gamma(p, y, out.j);
    out.lambda1_gt_1 = !has_nonzero_point_in_box(L, Q);
    if (!out.member && !out.lambda1_gt_1)
        throw internal_error("phi_membership: lattice point in the box but no witness found");
    return out;
}

// ---------------------------------------------------------------------------
// Derivative split
// ---------------------------------------------------------------------------

SplitReport derivative_split(const ApproxContext& ctx, const SPoint& x, const std::vector<Int>& a,
                             const Rat& eps) {
    ctx.validate();
    if (eps <= 0 || eps >= 1) throw domain_error("derivative_split: eps in (0,1) required");
    Rat anorm(0);
    for (const Int& ai : a)
        if (ai != 0) anorm = std::max(anorm, sadic_abs_int(ai, ctx.S));
    if (anorm == 0) throw domain_error("derivative_split: a must be nonzero");
    EvalCache cache = make_cache(ctx, x);
    SplitReport rep;
    for (const PlaceEval& pe : cache.places) {
        PlaceSplit ps;
        ps.place = pe.place;
        ps.grad_norm = EvalCache::grad_norm_at(pe, a, /*include_theta=*/true);
        Rat phi = pe.place == 0 ? Rat(1) - eps : Rat(-eps);
        PowerProduct thresh(anorm, phi);
        int cmp = ps.grad_norm == 0 ? -1 : PowerProduct(ps.grad_norm).compare(thresh);
        ps.large = cmp > 0;
        ps.borderline = cmp == 0;  // the <= branch: classified small, recorded
        rep.places.push_back(ps);
        if (!ps.large) rep.small_places.push_back(pe.place);
    }
    rep.overall_large = rep.small_places.empty();
    return rep;
}

// ---------------------------------------------------------------------------
// Transference sets
// ---------------------------------------------------------------------------

void TransferenceParams::validate(bool strict_eps_cap) const {
    if (l < 1 || n < 1) throw domain_error("params: l, n >= 1 required");
    if (static_cast<int>(t.size()) != n) throw domain_error("params: t must have n entries");
    for (int ti : t)
        if (ti < 0) throw domain_error("params: t >= 0 required");
    if (eps <= 0) throw domain_error("params: eps > 0 required");
    if (strict_eps_cap) {
        Rat cap = Rat(1, 4 * (n + 1) * l * l);
        if (eps >= cap) throw domain_error("params: eps outside (0, 1/(4(n+1)l^2))");
    }
    if (delta <= 0 || delta > eps / 2) throw domain_error("params: delta outside (0, eps/2]");
    if (alpha1 <= 0) throw domain_error("params: alpha1 > 0 required");
}

int TransferenceParams::t_order() const {
    int s = 0;
    for (int ti : t) s += ti;
    return s;
}

PowerProduct TransferenceParams::phi_delta() const {
    return PowerProduct(Rat(2), delta * t_order());
}

PowerProduct TransferenceParams::r_nu(long long place) const {
    Rat m(t_order() + 1);
    if (place == 0) return PowerProduct(Rat(2), m * (Rat(1) - eps));
    return PowerProduct(Rat(2), -m * eps);
}

Rat TransferenceParams::psi0_of_2t() const { return rat_pow(Rat(2), -t_order()); }

namespace {

bool it_ht_membership_cached(const ApproxContext& ctx, const EvalCache& cache,
                             const TransferenceParams& params, const Int& a0,
                             const std::vector<Int>& a, const PowerProduct& lambda, long long nu,
                             SetKind which) {
    const bool is_I = which == SetKind::I;
    // Dyadic window first (cheapest).
    for (int i = 0; i < params.n; ++i) {
        Rat ai = sadic_abs_int(a[static_cast<std::size_t>(i)], ctx.S);
        Rat lo = rat_pow(Rat(2), params.t[static_cast<std::size_t>(i)]);
        if (is_I) {
            Rat mx = std::max(Rat(1), ai);
            if (mx < lo || mx > 2 * lo) return false;
        } else {
            if (ai > 4 * lo) return false;
        }
    }
    // Value inequality: with Theta for I, without for H; extra 2^l for H.
    FormValue fv = form_value_cached(cache, a0, a, /*include_theta=*/is_I);
    Rat lhs = rat_pow(fv.norm_S, ctx.S.l());
    PowerProduct rhs = lambda * PowerProduct(params.psi0_of_2t());
    if (!is_I) rhs *= PowerProduct(rat_pow(Rat(2), ctx.S.l()));
    if (lhs != 0 && PowerProduct(lhs).compare(rhs) >= 0) return false;

    // Gradient inequality at the place nu.
    const PlaceEval* pe = nullptr;
    for (const auto& cand : cache.places)
        if (cand.place == nu) pe = &cand;
    if (!pe) throw domain_error("it_ht: nu is not a place of S");
    Rat grad = EvalCache::grad_norm_at(*pe, a, /*include_theta=*/is_I);
    PowerProduct grhs = lambda * params.r_nu(nu);
    if (!is_I) grhs *= PowerProduct(Rat(2));
    if (grad != 0 && PowerProduct(grad).compare(grhs) >= 0) return false;
    return true;
}

}  // namespace

bool it_ht_membership(const ApproxContext& ctx, const TransferenceParams& params, const SPoint& x,
                      const Int& a0, const std::vector<Int>& a, const PowerProduct& lambda,
                      long long nu, SetKind which) {
    ctx.validate();
    params.validate();
    return it_ht_membership_cached(ctx, make_cache(ctx, x), params, a0, a, lambda, nu, which);
}

IntersectionWitness intersection_witness(const ApproxContext& ctx,
                                         const TransferenceParams& params, const SPoint& x,
                                         const Int& a0, const std::vector<Int>& a, const Int& b0,
                                         const std::vector<Int>& b, long long nu) {
    ctx.validate();
    params.validate();
    if (a0 == b0 && a == b) throw domain_error("intersection: alpha and alpha' must differ");
    // |t| > l / (1 - eps/2)
    if (Rat(params.t_order()) * (Rat(1) - params.eps / 2) <= Rat(params.l))
        throw domain_error("intersection: |t| too small");
    PowerProduct lam = params.phi_delta();
    EvalCache cache = make_cache(ctx, x);
    if (!it_ht_membership_cached(ctx, cache, params, a0, a, lam, nu, SetKind::I) ||
        !it_ht_membership_cached(ctx, cache, params, b0, b, lam, nu, SetKind::I))
        throw domain_error("intersection: x must lie in both I-sets");

    IntersectionWitness out;
    out.a0 = a0 - b0;
    out.a.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out.a.push_back(a[i] - b[i]);

    if (is_zero_vec(out.a)) {
        out.failed.push_back("a'' = 0 (excluded by the |t| bound)");
        return out;
    }
    // The three H-inequalities, with lambda = phi_delta itself.
    FormValue fv = form_value_cached(cache, out.a0, out.a, /*include_theta=*/false);
    Rat lhs = rat_pow(fv.norm_S, ctx.S.l());
    PowerProduct rhs =
        lam * PowerProduct(params.psi0_of_2t()) * PowerProduct(rat_pow(Rat(2), ctx.S.l()));
    if (lhs != 0 && PowerProduct(lhs).compare(rhs) >= 0)
        out.failed.push_back("|a0'' + a''.f(x)|_S^l < 2^l phi_delta Psi_0(2^t)");
    const PlaceEval* pe = nullptr;
    for (const auto& cand : cache.places)
        if (cand.place == nu) pe = &cand;
    if (!pe) throw domain_error("intersection: nu is not a place of S");
    Rat grad = EvalCache::grad_norm_at(*pe, out.a, /*include_theta=*/false);
    PowerProduct grhs = lam * params.r_nu(nu) * PowerProduct(Rat(2));
    if (grad != 0 && PowerProduct(grad).compare(grhs) >= 0)
        out.failed.push_back("||grad(a''.f_nu)||_nu < 2 phi_delta r_nu(t)");
    for (int i = 0; i < params.n; ++i) {
        Rat ai = sadic_abs_int(out.a[static_cast<std::size_t>(i)], ctx.S);
        if (ai > rat_pow(Rat(2), params.t[static_cast<std::size_t>(i)] + 2)) {
            out.failed.push_back("|a_i''|_S <= 2^{t_i+2}");
            break;
        }
    }
    out.ok = out.failed.empty();
    return out;
}

// ---------------------------------------------------------------------------
// Series audits
// ---------------------------------------------------------------------------

namespace {

RatInterval coarsen(const RatInterval& x, long bits = 96) {
    Int D = Int(1) << bits;
    Rat lo = Rat(floor_div(num(x.lo) * D, den(x.lo)), D);
    Rat hi = Rat(floor_div(num(x.hi) * D, den(x.hi)) + 1, D);
    return {lo, hi};
}

}  // namespace

SeriesAudit series_audit(const TransferenceParams& params, bool nu_is_infinite, int horizon) {
    // The audit runs on the gamma formulas over any positive parameters; the
    // strict eps cap is enforced only where the transference sets need it.
    params.validate(/*strict_eps_cap=*/false);
    if (horizon < 1) throw domain_error("series_audit: horizon >= 1 required");
    SeriesAudit out;
    Rat denom = Rat(params.l * (params.n + 1));
    out.gamma_case1 = (params.eps - 2 * params.delta) / denom * params.alpha1;
    out.gamma_case2 = (params.eps - 2 * params.delta + 1) / denom * params.alpha1;
    out.gamma1_positive = out.gamma_case1 > 0;
    out.gamma2_positive = out.gamma_case2 > 0;
    out.epsilon1_exponent_note =
        "epsilon_1 exponent read as 1/(l(n+1)); the source prints a stray \\l";
    Rat gamma = nu_is_infinite ? out.gamma_case1 : out.gamma_case2;
    out.summable = gamma > 0;
    if (!out.summable) return out;

    // x = 2^{-gamma}, bracketed tightly enough that 1 - x stays positive.
    RatInterval x = pow2_neg_bracket(gamma);
    for (int terms = 32; x.hi >= 1 && terms <= 512; terms *= 2) x = pow2_neg_bracket(gamma, terms);
    if (x.hi >= 1) throw precision_error("series_audit: 2^{-gamma} bracket too wide");
    // partial = sum_{s<=H} C(s+n-1, n-1) x^s, counting the t with |t| = s.
    RatInterval partial(Rat(0));
    RatInterval xs(Rat(1));
    for (int s = 0; s <= horizon; ++s) {
        Rat cnt(binomial(Int(s + params.n - 1), params.n - 1));
        partial = coarsen(partial + RatInterval(cnt) * xs);
        xs = coarsen(xs * x);
    }
    out.partial = partial;
    RatInterval one(Rat(1));
    RatInterval inv_gap = (one - x).reciprocal();
    out.total = inv_gap.pow_int(params.n);
    // Exact closed-form tail T_n(H) = [C(H+n-1, n-1) x^{H+1} + T_{n-1}(H)]/(1-x),
    // T_1(H) = x^{H+1}/(1-x)  (hockey-stick identity on the counts).
    RatInterval tail = xs * inv_gap;  // xs holds x^{H+1} here
    for (int k = 2; k <= params.n; ++k) {
        RatInterval cnt(Rat(binomial(Int(horizon + k - 1), k - 1)));
        tail = (cnt * xs + tail) * inv_gap;
        tail = coarsen(tail);
    }
    out.tail_bound = tail;
    // partial + tail = total must be consistent with the three brackets.
    out.bracket_ok = out.partial.lo + out.tail_bound.lo <= out.total.hi &&
                     out.total.lo <= out.partial.hi + out.tail_bound.hi;
    return out;
}

BorelCantelliReport borel_cantelli_sum(const PsiFamily& psi, int n, bool inf_in_S, long horizon) {
    if (n < 1) throw domain_error("borel_cantelli: n >= 1 required");
    if (horizon < 2) throw domain_error("borel_cantelli: horizon >= 2 required");
    BorelCantelliReport out;
    out.horizon = static_cast<int>(horizon);
    long e = inf_in_S ? n - 1 : n;  // sum k^e psi(k)
    long s = psi.e - e;             // net decay exponent
    // Integral-test classification on the family.
    if (s > 1)
        out.cls = SeriesClass::convergent;
    else if (s < 1)
        out.cls = SeriesClass::divergent;
    else
        out.cls = psi.g > 1 ? SeriesClass::convergent : SeriesClass::divergent;

    RatInterval sum(Rat(0));
    for (long k = 1; k <= horizon; ++k) {
        RatInterval term = psi.value(Rat(k));
        Rat ke = rat_pow(Rat(k), e);
        sum = coarsen(sum + RatInterval(term.lo * ke, term.hi * ke));
    }
    out.partial = sum;
    if (out.cls == SeriesClass::convergent) {
        // Integral-test tail bound from the horizon onward.
        Rat H(horizon);
        if (s > 1) {
            Rat power_part = psi.c * rat_pow(H, 1 - s) / Rat(s - 1);
            if (psi.g == 0) {
                out.tail_upper = RatInterval(power_part);
            } else {
                RatInterval lg = ln_bracket(H + psi.shift).pow_int(psi.g).reciprocal();
                out.tail_upper = RatInterval(power_part) * lg;
            }
        } else {  // s == 1, g > 1
            RatInterval lg = ln_bracket(H + psi.shift).pow_int(psi.g - 1).reciprocal();
            Rat factor = psi.c * (1 + Rat(psi.shift) / H) / Rat(psi.g - 1);
            out.tail_upper = RatInterval(factor) * lg;
        }
    }
    return out;
}

LowerOrderReport lower_order(const std::function<double(double)>& ln_psi, int log2_horizon) {
    if (log2_horizon < 2) throw domain_error("lower_order: horizon >= 2^2 required");
    LowerOrderReport out;
    for (int k = 1; k <= log2_horizon; ++k) {
        double t = std::ldexp(1.0, k);
        double ln_t = k * std::log(2.0);
        out.grid.emplace_back(t, -ln_psi(t) / ln_t);
    }
    // liminf proxy: infimum over the top quarter of the geometric grid.
    std::size_t start = out.grid.size() - std::max<std::size_t>(1, out.grid.size() / 4);
    double best = out.grid[start].second;
    for (std::size_t i = start; i < out.grid.size(); ++i) best = std::min(best, out.grid[i].second);
    out.estimate = best;
    return out;
}

LowerOrderReport lower_order(const PsiFamily& psi, int log2_horizon) {
    double lc = std::log(to_double(psi.c));
    return lower_order(
        [&](double t) {
            return lc - double(psi.e) * std::log(t) -
                   double(psi.g) * std::log(std::log(t + double(psi.shift)));
        },
        log2_horizon);
}

}  // namespace sarith
