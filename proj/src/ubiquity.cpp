#include "sarith/ubiquity.hpp"

#include <algorithm>

namespace sarith {

int UbiquityConfig::working_precision(const Int& q) const {
    // Norms down to delta Q^{-(n+1)} must be visible: 2(n+2) + ceil(log_p(Q^{n+1}/delta)).
    Rat scale = rat_pow(Rat(q), n + 1) / delta;
    int digits = 0;
    Rat pw(1);
    while (pw < scale) {
        pw *= p;
        ++digits;
    }
    return 2 * (n + 2) + digits;
}

void UbiquityConfig::validate() const {
    if (p < 3) throw domain_error("ubiquity: p >= 3 required (lambda threshold 1 - 2/p)");
    for (long long d = 2; d * d <= p; ++d)
        if (p % d == 0) throw domain_error("ubiquity: p must be prime");
    if (n < 1 || m < 1) throw domain_error("ubiquity: n, m >= 1 required");
    if (Q <= 1) throw domain_error("ubiquity: Q > 1 required");
    if (delta <= 0 || delta >= 1) throw domain_error("ubiquity: delta in (0,1) required");
    if (w <= 0 || w >= 1) throw domain_error("ubiquity: w in (0,1) required");
    // rho(2^{t+1}) < lambda rho(2^t): 2^{-(n+1)} < 1 - 2/p.
    if (rat_pow(Rat(2), -(n + 1)) >= lambda_threshold())
        throw domain_error("ubiquity: rho contraction fails against the lambda threshold");
}

// ---------------------------------------------------------------------------
// Strong approximation
// ---------------------------------------------------------------------------

Rat strong_approx(const Rat& xi_inf, const Rat& xi_p, long long p, const Rat& eps_inf,
                  const Rat& eps_p) {
    if (eps_p <= 0) throw domain_error("strong_approx: eps_p > 0 required");
    Int P(p);
    // eps_p must be a power of p: eps_p = p^{-M}.
    long M;
    {
        Int nn = num(eps_p), dd = den(eps_p);
        if (nn == 1 && dd == 1)
            M = 0;
        else if (nn == 1)
            M = vp_int(dd, P);
        else if (dd == 1)
            M = -vp_int(nn, P);
        else
            throw domain_error("strong_approx: eps_p must be a power of p");
        if (rat_pow(Rat(p), -M) != eps_p)
            throw domain_error("strong_approx: eps_p must be a power of p");
    }
    if (eps_inf < Rat(p) / (2 * eps_p))
        throw domain_error("strong_approx: hypothesis eps_inf >= (1/2) eps_p^{-1} p fails");

    // c0: the truncation of xi_p below level M (an element of Z[1/p]).
    Rat c0(0);
    if (xi_p != 0) {
        long v = vp_rat(xi_p, P);
        if (v < M) {
            Int pk = int_pow(P, static_cast<unsigned long>(M - v));
            Int u = num(xi_p);
            Int dd = den(xi_p);
            if (v > 0)
                u /= int_pow(P, static_cast<unsigned long>(v));
            else if (v < 0)
                dd /= int_pow(P, static_cast<unsigned long>(-v));
            Int unit = mod_floor(u * mod_inverse(dd, pk), pk);
            c0 = Rat(unit) * rat_pow(Rat(p), v);
        }
    }
    Rat spacing = rat_pow(Rat(p), M);
    Rat r = c0;
    if (rat_abs(r - xi_inf) > eps_inf) {
        Int t = rat_round((xi_inf - c0) / spacing);
        r = c0 + Rat(t) * spacing;
    }
    // Exact verification of all three conclusions.
    if (rat_abs(r - xi_inf) > eps_inf)
        throw internal_error("strong_approx: archimedean window missed");
    Rat diff = r - xi_p;
    if (diff != 0 && padic_abs(diff, P) > eps_p)
        throw internal_error("strong_approx: p-adic window missed");
    Int d = den(r);
    while (d % P == 0) d /= P;
    if (d != 1) throw internal_error("strong_approx: denominator has a prime other than p");
    return r;
}

Rat strong_approx(const Rat& xi_inf, const PAdicNumber& xi_p, const Rat& eps_inf,
                  const Rat& eps_p) {
    Int P(xi_p.prime());
    if (!xi_p.is_zero()) {
        // The representative must pin xi_p down to level M.
        long M = 0;
        if (eps_p < 1) M = vp_int(den(eps_p), P);
        if (eps_p > 1) M = -vp_int(num(eps_p), P);
        if (xi_p.valuation() + xi_p.precision() < M)
            throw precision_error("strong_approx: xi_p carries too few digits for eps_p");
    }
    return strong_approx(xi_inf, xi_p.representative(), xi_p.prime(), eps_inf, eps_p);
}

// ---------------------------------------------------------------------------
// Hensel / Newton lifting
// ---------------------------------------------------------------------------

HenselResult hensel_root(const Poly& g, long long p, int precision) {
    if (g.nvars() != 1) throw domain_error("hensel_root: univariate polynomial required");
    if (precision < 2) throw domain_error("hensel_root: precision >= 2 required");
    Int P(p);
    for (const auto& [mono, c] : g.terms())
        if (vp_rat(c, P) < 0) throw domain_error("hensel_root: coefficients must lie in Z_p");
    Poly dg = g.partial(0);
    std::vector<Rat> origin{Rat(0)};
    Rat g0 = g.eval(origin);
    Rat d0 = dg.eval(origin);
    if (d0 == 0) throw domain_error("hensel_root: g'(0) = 0");
    long vd = vp_rat(d0, P);
    HenselResult out;
    if (g0 == 0) {
        out.root = PAdicNumber::zero(p, precision);
        out.residual_valuations.push_back(precision);
        out.root_valuation = precision;  // certified zero at working precision
        return out;
    }
    long v0 = vp_rat(g0, P);
    if (v0 <= 2 * vd) throw domain_error("hensel_root: |g(0)| < |g'(0)|^2 fails");

    // Work in Z/p^W.
    Int pw = int_pow(P, static_cast<unsigned long>(precision));
    auto to_mod = [&](const Rat& q) { return mod_floor(num(q) * mod_inverse(den(q), pw), pw); };
    int deg = g.degree();
    std::vector<Int> coef(static_cast<std::size_t>(deg) + 1, 0);
    std::vector<Int> dcoef(static_cast<std::size_t>(deg) + 1, 0);
    for (const auto& [mono, c] : g.terms()) coef[static_cast<std::size_t>(mono[0])] = to_mod(c);
    for (const auto& [mono, c] : dg.terms()) dcoef[static_cast<std::size_t>(mono[0])] = to_mod(c);
    auto horner = [&](const std::vector<Int>& cs, const Int& x) {
        Int acc = 0;
        for (std::size_t i = cs.size(); i-- > 0;) acc = mod_floor(acc * x + cs[i], pw);
        return acc;
    };

    Int xi = 0;
    for (int iter = 0; iter < 4 * precision; ++iter) {
        Int gv = horner(coef, xi);
        if (gv == 0) {
            out.residual_valuations.push_back(precision);
            break;
        }
        long v = vp_int(gv, P);
        if (v >= precision) {
            out.residual_valuations.push_back(precision);
            break;
        }
        out.residual_valuations.push_back(v);
        Int dv = horner(dcoef, xi);
        if (dv == 0) throw precision_error("hensel_root: derivative vanished at working precision");
        long vdc = vp_int(dv, P);
        Int pvd = int_pow(P, static_cast<unsigned long>(vdc));
        Int step = mod_floor((gv / pvd) * mod_inverse(dv / pvd, pw), pw);
        xi = mod_floor(xi - step, pw);
    }
    if (out.residual_valuations.empty() || out.residual_valuations.back() < precision)
        throw precision_error("hensel_root: no convergence within the iteration budget");

    if (xi == 0) {
        out.root = PAdicNumber::zero(p, precision);
        out.root_valuation = precision;
    } else {
        long rv = vp_int(xi, P);
        out.root_valuation = rv;
        int digits = precision - static_cast<int>(rv);
        if (digits < 1) {
            out.root = PAdicNumber::zero(p, precision);
            out.root_valuation = precision;
        } else {
            out.root = PAdicNumber::from_parts(
                p, rv, xi / int_pow(P, static_cast<unsigned long>(rv)), digits);
        }
    }
    // |root| <= |g(0)| / |g'(0)|.
    if (out.root_valuation < v0 - vd)
        throw internal_error("hensel_root: root larger than |g(0)|/|g'(0)|");
    return out;
}

// ---------------------------------------------------------------------------
// The resonant construction
// ---------------------------------------------------------------------------

namespace {

// (F + Theta) as a polynomial for integer coefficients (a_0, ..., a_n).
Poly assemble_form(const AnalyticMap& f, const AnalyticMap& theta, const std::vector<Int>& a) {
    std::vector<Int> tail(a.begin() + 1, a.end());
    return f.linear_form(a[0], tail, &theta);
}

std::vector<Rat> solve_linear(std::vector<std::vector<Rat>> mat, std::vector<Rat> rhs) {
    const std::size_t nn = mat.size();
    for (std::size_t c = 0; c < nn; ++c) {
        std::size_t piv = c;
        while (piv < nn && mat[piv][c] == 0) ++piv;
        if (piv == nn) throw stage_error("linear-system", "singular system");
        std::swap(mat[piv], mat[c]);
        std::swap(rhs[piv], rhs[c]);
        for (std::size_t r = 0; r < nn; ++r) {
            if (r == c || mat[r][c] == 0) continue;
            Rat fqt = mat[r][c] / mat[c][c];
            for (std::size_t cc = c; cc < nn; ++cc) mat[r][cc] -= fqt * mat[c][cc];
            rhs[r] -= fqt * rhs[c];
        }
    }
    std::vector<Rat> out;
    out.reserve(nn);
    for (std::size_t i = 0; i < nn; ++i) out.push_back(rhs[i] / mat[i][i]);
    return out;
}

}  // namespace

ResonantCandidate resonant_construct(const std::vector<Rat>& x, const UbiquityConfig& cfg,
                                     const AnalyticMap& f, const AnalyticMap& theta) {
    cfg.validate();
    f.validate();
    if (f.m != cfg.m || static_cast<int>(x.size()) != cfg.m)
        throw domain_error("resonant_construct: dimension mismatch");
    if (f.n != cfg.n) throw domain_error("resonant_construct: codomain mismatch");
    const long long p = cfg.p;
    Int P(p);

    // Stage: normalization. The proof needs f_1(x) = x_1, |f_i(x)|_p <= 1,
    // |d_1 f_i(x)|_p <= 1 and the same for Theta.
    if (!(f.comps.front().terms() == Poly::variable(f.m, 0).terms()))
        throw stage_error("normalization", "the convention f_1(x) = x_1 is required");
    std::vector<Rat> y = f.eval(x);
    for (const Rat& yi : y)
        if (yi != 0 && vp_rat(yi, P) < 0) throw stage_error("normalization", "|f_i(x)|_p > 1");
    Rat theta_val(0), theta_d1(0);
    if (!theta.is_zero()) {
        theta.validate();
        if (theta.m != f.m || theta.n != 1) throw stage_error("normalization", "Theta shape");
        const Poly& tp = theta.comps.front();
        theta_val = tp.eval(x);
        theta_d1 = tp.partial(0).eval(x);
        if (theta_val != 0 && vp_rat(theta_val, P) < 0)
            throw stage_error("normalization", "|Theta(x)|_p > 1");
        if (theta_d1 != 0 && vp_rat(theta_d1, P) < 0)
            throw stage_error("normalization", "|d_1 Theta(x)|_p > 1");
    }
    for (const Poly& c : f.comps) {
        Rat d1 = c.partial(0).eval(x);
        if (d1 != 0 && vp_rat(d1, P) < 0) throw stage_error("normalization", "|d_1 f_i(x)|_p > 1");
    }

    ResonantCandidate cand;
    cand.q_used = cfg.Q;
    Rat bound = cfg.delta * rat_pow(Rat(cfg.Q), -(cfg.n + 1));
    cand.j = j_from_bound(p, bound);
    Rat ainf_bound = Rat(3 * p * (cfg.n + 1)) * Rat(cfg.Q) * rat_pow(Rat(p), cfg.n + 2) / cfg.delta;

    // Stage: membership. An exact resonance short-circuits; a member without
    // one violates the precondition.
    auto phi = phi_membership(p, f, x, cfg.Q, cfg.delta);
    if (phi.member) {
        if (!phi.exact_zero_witness)
            throw stage_error("precondition", "x lies in Phi^f(Q, delta)");
        cand.exact_resonance = true;
        cand.a.push_back(phi.witness->a0);
        for (const Int& ai : phi.witness->a) cand.a.push_back(ai);
        Poly form = assemble_form(f, theta, cand.a);
        Rat val = form.eval(x);
        cand.value_norm = val == 0 ? Rat(0) : padic_abs(val, P);
        Rat d1 = form.partial(0).eval(x);
        cand.partial_norm = d1 == 0 ? Rat(0) : padic_abs(d1, P);
        for (const Int& ai : cand.a) cand.a_inf_norm = std::max(cand.a_inf_norm, int_abs(ai));
        cand.beta = cfg.kappa0() * Rat(cand.a_inf_norm);
        cand.zero_coord = x[0];
        cand.distance = 0;
        cand.integrality_ok = true;
        cand.condition1_ok = cand.value_norm <= bound;
        cand.partial_ok = Rat(1) - Rat(1, p) <= cand.partial_norm && cand.partial_norm <= 1;
        cand.a_infty_ok = Rat(cand.a_inf_norm) <= ainf_bound;
        cand.beta_ok = cfg.kappa0() * Rat(p) * Rat(cfg.Q) < cand.beta && cand.beta <= Rat(cfg.Q);
        cand.distance_ok = true;
        return cand;
    }
    if (!phi.lambda1_gt_1)
        throw internal_error("resonant_construct: non-member with lambda_1 <= 1");

    // Stage: minima. n+1 independent lattice vectors with the bounds of the
    // successive-minima step.
    auto L = build_gamma(p, y, cand.j);
    auto minima = successive_minima(L, cfg.Q);
    if (!minima.complete) throw stage_error("minima", "enumeration budget exceeded");
    Rat lambda_cap = rat_pow(Rat(p), cfg.n + 2) / cfg.delta;
    if (minima.lambda.back() > lambda_cap)
        throw stage_error("minima", "lambda_{n+1} exceeds p^{n+2}/delta");
    std::vector<std::vector<Int>> witness = minima.witnesses;
    Rat height_cap = Rat(cfg.Q) * lambda_cap;
    for (const auto& wv : witness) {
        Poly Fj = f.linear_form(wv[0], std::vector<Int>(wv.begin() + 1, wv.end()), nullptr);
        Rat val = Fj.eval(x);
        if (!(val == 0 || padic_abs(val, P) < bound))
            throw internal_error("resonant_construct: |F_j(x)|_p >= delta Q^{-(n+1)}");
        for (std::size_t i = 0; i < wv.size(); ++i) {
            if (Rat(int_abs(wv[i])) > height_cap)
                throw internal_error("resonant_construct: |a_{j,i}| > Q p^{n+2}/delta");
            if (i >= 1 && mod_floor(wv[i], P) != 0)
                throw internal_error("resonant_construct: p does not divide a_{j,i}");
            if (i == 0 && wv[0] != 0 && vp_int(wv[0], P) < 1)
                throw internal_error("resonant_construct: |a_{j,0}|_p > 1/p");
        }
    }
    // Some witness must have |a_{j,0}| > Q; move it to the front (the proof's
    // relabeling).
    std::size_t lead = witness.size();
    for (std::size_t jj = 0; jj < witness.size(); ++jj)
        if (int_abs(witness[jj][0]) > cfg.Q) {
            lead = jj;
            break;
        }
    if (lead == witness.size())
        throw stage_error("first-coordinate", "no minima witness with |a_{j,0}| > Q");
    std::swap(witness[0], witness[lead]);

    // Stage: linear system. Unknowns eta with
    //   sum eta_j F_j(x) = -Theta(x),
    //   sum eta_j d_1 F_j(x) = 1 - d_1 Theta(x),
    //   sum eta_j a_{j,i} = 0 for i = 2..n.
    const int dim = cfg.n + 1;
    std::vector<std::vector<Rat>> mat(static_cast<std::size_t>(dim),
                                      std::vector<Rat>(static_cast<std::size_t>(dim)));
    std::vector<Rat> rhs(static_cast<std::size_t>(dim));
    for (int jj = 0; jj < dim; ++jj) {
        const auto& wv = witness[static_cast<std::size_t>(jj)];
        Poly Fj = f.linear_form(wv[0], std::vector<Int>(wv.begin() + 1, wv.end()), nullptr);
        mat[0][static_cast<std::size_t>(jj)] = Fj.eval(x);
        mat[1][static_cast<std::size_t>(jj)] = Fj.partial(0).eval(x);
        for (int i = 2; i <= cfg.n; ++i)
            mat[static_cast<std::size_t>(i)][static_cast<std::size_t>(jj)] =
                Rat(wv[static_cast<std::size_t>(i)]);
    }
    rhs[0] = -theta_val;
    rhs[1] = Rat(1) - theta_d1;
    // det(a_{j,i}) != 0 is equivalent to the witnesses' independence, already
    // certified by the minima step; assert it anyway.
    if (integer_rank(witness) != dim)
        throw internal_error("resonant_construct: witness matrix is singular");
    auto eta = solve_linear(mat, rhs);

    // Stage: rationalization with the sign-split archimedean targets.
    std::vector<Rat> r(static_cast<std::size_t>(dim));
    for (int jj = 0; jj < dim; ++jj) {
        const Int& lead_coord = witness[static_cast<std::size_t>(jj)][0];
        Rat target = lead_coord >= 0 ? Rat(2 * p) : Rat(-2 * p);  // ties take +2p
        r[static_cast<std::size_t>(jj)] =
            strong_approx(target, eta[static_cast<std::size_t>(jj)], p, Rat(p), Rat(1));
        if (rat_abs(r[static_cast<std::size_t>(jj)] - target) > Rat(p))
            throw internal_error("resonant_construct: r_i window missed");
    }

    // Stage: assembly. a_i = sum_j r_j a_{j,i} must be integers.
    cand.a.assign(static_cast<std::size_t>(dim), Int(0));
    {
        std::vector<Rat> acc(static_cast<std::size_t>(dim), Rat(0));
        for (int jj = 0; jj < dim; ++jj)
            for (int i = 0; i < dim; ++i)
                acc[static_cast<std::size_t>(i)] +=
                    r[static_cast<std::size_t>(jj)] *
                    Rat(witness[static_cast<std::size_t>(jj)][static_cast<std::size_t>(i)]);
        for (int i = 0; i < dim; ++i) {
            if (den(acc[static_cast<std::size_t>(i)]) != 1)
                throw stage_error("assembly", "a_i is not an integer");
            cand.a[static_cast<std::size_t>(i)] = num(acc[static_cast<std::size_t>(i)]);
        }
        cand.integrality_ok = true;
    }
    for (const Int& ai : cand.a) cand.a_inf_norm = std::max(cand.a_inf_norm, int_abs(ai));

    // Certificates.
    Poly form = assemble_form(f, theta, cand.a);
    Rat val = form.eval(x);
    cand.value_norm = val == 0 ? Rat(0) : padic_abs(val, P);
    cand.condition1_ok = cand.value_norm <= bound;
    Rat d1 = form.partial(0).eval(x);
    cand.partial_norm = d1 == 0 ? Rat(0) : padic_abs(d1, P);
    cand.partial_ok = Rat(1) - Rat(1, p) <= cand.partial_norm && cand.partial_norm <= 1;
    cand.a_infty_ok = Rat(cand.a_inf_norm) <= ainf_bound;
    cand.beta = cfg.kappa0() * Rat(cand.a_inf_norm);
    cand.beta_ok = cfg.kappa0() * Rat(p) * Rat(cfg.Q) < cand.beta && cand.beta <= Rat(cfg.Q);
    if (!cand.condition1_ok) throw stage_error("certificates", "condition1 failed");
    if (!cand.partial_ok) throw stage_error("certificates", "partial_condition failed");
    if (!cand.a_infty_ok) throw stage_error("certificates", "a_infty failed");
    if (!cand.beta_ok) throw stage_error("beta-window", "beta outside (kappa0 p Q, Q]");

    // Stage: zero. g(xi) = (F + Theta)(x_1 + xi, x_2, ..., x_m), lifted by
    // Newton from xi = 0.
    Poly g(1);
    {
        // Taylor coefficients in the first coordinate: g_k = d_1^k (F+Theta)(x) / k!.
        Poly shifted = form;
        Rat fact(1);
        int k = 0;
        while (!shifted.is_zero()) {
            g.set_coeff({k}, shifted.eval(x) / fact);
            shifted = shifted.partial(0);
            ++k;
            fact *= k;
        }
    }
    int W = cfg.working_precision(cfg.Q);
    auto hensel = hensel_root(g, p, W);
    cand.hensel_valuations = hensel.residual_valuations;
    Rat xi0 = hensel.root.representative();
    cand.zero_coord = x[0] + xi0;
    cand.distance = xi0 == 0 ? Rat(0) : padic_abs(xi0, P);
    cand.distance_ok = cand.distance <= cfg.rho(cfg.Q);
    if (!cand.distance_ok) throw stage_error("zero", "|x - x_zero| > rho(Q)");
    return cand;
}

ResonantCandidate resonant_construct_with_retries(const std::vector<Rat>& x,
                                                  const UbiquityConfig& cfg, const AnalyticMap& f,
                                                  const AnalyticMap& theta) {
    UbiquityConfig local = cfg;
    for (int attempt = 0;; ++attempt) {
        try {
            return resonant_construct(x, local, f, theta);
        } catch (const stage_error& e) {
            bool retryable = e.stage == "first-coordinate" || e.stage == "beta-window" ||
                             e.stage == "zero" || e.stage == "minima";
            if (!retryable || attempt >= cfg.max_q_doublings) throw;
            local.Q *= 2;
        }
    }
}

DeltaResult delta_neighborhood(const std::vector<Rat>& x,
                               const std::vector<std::vector<Rat>>& zeros, long long p,
                               const Rat& r) {
    if (r <= 0) throw domain_error("delta_neighborhood: r > 0 required");
    DeltaResult out;
    bool first = true;
    for (const auto& z : zeros) {
        if (z.size() != x.size()) throw domain_error("delta_neighborhood: dimension mismatch");
        Rat d(0);
        for (std::size_t i = 0; i < x.size(); ++i) {
            Rat diff = x[i] - z[i];
            if (diff != 0) d = std::max(d, padic_abs(diff, Int(p)));
        }
        if (first || d < out.known_distance) out.known_distance = d;
        first = false;
    }
    if (!first && out.known_distance < r) out.certified_member = true;
    return out;
}

CoverRow covering_check(const PAdicBall& B, int t, const UbiquityConfig& cfg, const AnalyticMap& f,
                        const AnalyticMap& theta, std::uint64_t samples, std::uint64_t seed) {
    CoverRow row;
    row.t = t;
    row.samples = samples;
    UbiquityConfig local = cfg;
    local.Q = Int(1) << t;
    Rat bound = local.delta * rat_pow(Rat(local.Q), -(local.n + 1));
    int j = j_from_bound(local.p, bound);
    for (std::uint64_t i = 0; i < samples; ++i) {
        std::vector<Rat> x = sample_ball(B, seed, i, local.working_precision(local.Q));
        std::vector<Rat> y = f.eval(x);
        auto L = build_gamma(local.p, y, j);
        if (has_nonzero_point_in_box(L, local.Q)) {
            ++row.lattice_members;  // certified member of Phi^f(2^t, delta)
            continue;
        }
        try {
            auto cand = resonant_construct(x, local, f, theta);
            if (cand.all_certificates())
                ++row.constructed;
            else
                ++row.failures;
        } catch (const error&) {
            ++row.failures;
        }
    }
    row.frequency = samples ? double(row.constructed) / double(samples) : 0;
    row.member_frequency = samples ? double(row.lattice_members) / double(samples) : 0;
    row.floor_estimate =
        1.0 - row.member_frequency - (samples ? double(row.failures) / double(samples) : 0);
    double e = row.frequency;
    row.sigma = samples ? std::sqrt(e * (1 - e) / double(samples)) : 0;
    return row;
}

}  // namespace sarith
