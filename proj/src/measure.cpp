#include "sarith/measure.hpp"

#include <algorithm>
#include <deque>
#include <queue>

namespace sarith {

namespace {

// Valuation split of a polynomial's coefficients on Z_p^d: valuation of the
// constant term (nullopt if zero) and the minimum over non-constant terms.
struct CoeffVals {
    std::optional<long> constant;
    std::optional<long> nonconstant;
};

CoeffVals coeff_valuations(const Poly& g, const Int& p) {
    CoeffVals cv;
    for (const auto& [m, c] : g.terms()) {
        bool is_const = true;
        for (int e : m)
            if (e != 0) is_const = false;
        long v = vp_rat(c, p);
        if (is_const)
            cv.constant = v;
        else
            cv.nonconstant = cv.nonconstant ? std::min(*cv.nonconstant, v) : v;
    }
    return cv;
}

std::vector<std::vector<Rat>> residue_shifts(long long p, int d) {
    std::vector<std::vector<Rat>> out;
    std::vector<int> cur(static_cast<std::size_t>(d), 0);
    for (;;) {
        std::vector<Rat> r(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) r[static_cast<std::size_t>(i)] = cur[static_cast<std::size_t>(i)];
        out.push_back(std::move(r));
        int i = 0;
        for (; i < d; ++i) {
            if (++cur[static_cast<std::size_t>(i)] < p) break;
            cur[static_cast<std::size_t>(i)] = 0;
        }
        if (i == d) break;
    }
    return out;
}

}  // namespace

MeasureBounds sublevel_measure_joint(const std::vector<Poly>& fs, const PAdicBall& B, long M,
                                     const MeasureOptions& opts) {
    if (fs.empty()) throw domain_error("sublevel: empty family");
    for (const Poly& f : fs)
        if (f.nvars() != B.dim()) throw domain_error("sublevel: dimension mismatch");
    const Int p(B.p);
    const int d = B.dim();
    // Reduce to Z_p^d: x = c + p^k z. Branch weights are relative to |B|.
    std::vector<Poly> g0;
    g0.reserve(fs.size());
    for (const Poly& f : fs) g0.push_back(f.compose_affine(B.center, rat_pow(Rat(B.p), B.level)));

    struct Node {
        std::vector<Poly> gs;  // members still undecided on this branch
        int depth;
    };
    std::deque<Node> work;
    work.push_back({std::move(g0), 0});
    MeasureBounds out;
    out.lower = 0;
    out.upper = 0;
    out.resolved = true;
    out.resolved_depth = 0;
    Rat unresolved(0);
    long nodes = 0;
    const auto shifts = residue_shifts(B.p, d);
    const Rat child_weight = rat_pow(Rat(B.p), -d);

    while (!work.empty()) {
        Node node = std::move(work.front());
        work.pop_front();
        ++nodes;
        out.resolved_depth = std::max(out.resolved_depth, node.depth);
        Rat weight = rat_pow(child_weight, node.depth);  // relative branch mass
        bool excluded = false;
        std::vector<Poly> undecided;
        for (Poly& g : node.gs) {
            CoeffVals cv = coeff_valuations(g, p);
            // The value is constant mod p^{M+1} on the branch.
            if (!cv.nonconstant || *cv.nonconstant >= M + 1) {
                bool in = !cv.constant || *cv.constant >= M + 1;
                if (!in) {
                    excluded = true;
                    break;
                }
                continue;  // this member holds on the whole branch; drop it
            }
            // The constant term dominates: |g| == |c| >= eps on the branch.
            if (cv.constant && *cv.constant < *cv.nonconstant && *cv.constant <= M) {
                excluded = true;
                break;
            }
            undecided.push_back(std::move(g));
        }
        if (excluded) continue;
        if (undecided.empty()) {
            out.lower += weight;
            continue;
        }
        if (node.depth >= opts.depth_cap || nodes > opts.node_budget) {
            unresolved += weight;
            out.resolved = false;
            continue;
        }
        for (const auto& r : shifts) {
            std::vector<Poly> child;
            child.reserve(undecided.size());
            for (const Poly& g : undecided) child.push_back(g.compose_affine(r, Rat(B.p)));
            work.push_back({std::move(child), node.depth + 1});
        }
    }
    out.upper = out.lower + unresolved;
    // Scale from relative mass to absolute Haar measure.
    out.lower *= B.measure();
    out.upper *= B.measure();
    return out;
}

MeasureBounds sublevel_measure_exact(const Poly& f, const PAdicBall& B, long M,
                                     const MeasureOptions& opts) {
    return sublevel_measure_joint({f}, B, M, opts);
}

SupBounds sup_abs_exact(const Poly& f, const PAdicBall& B, const MeasureOptions& opts) {
    if (f.nvars() != B.dim()) throw domain_error("sup: dimension mismatch");
    const Int p(B.p);
    const int d = B.dim();
    Poly g0 = f.compose_affine(B.center, rat_pow(Rat(B.p), B.level));
    if (g0.is_zero()) return SupBounds{Rat(0), Rat(0), true};

    struct Node {
        Poly g;
        Rat ubound;  // coefficient (Gauss) bound on the branch
    };
    auto coeff_bound = [&](const Poly& g) {
        Rat u(0);
        for (const auto& [m, c] : g.terms()) u = std::max(u, padic_abs(c, p));
        return u;
    };
    auto cmp = [](const std::pair<Rat, std::size_t>& a, const std::pair<Rat, std::size_t>& b) {
        return a.first < b.first;
    };
    std::vector<Node> nodes;
    std::priority_queue<std::pair<Rat, std::size_t>, std::vector<std::pair<Rat, std::size_t>>,
                        decltype(cmp)>
        queue(cmp);
    auto push = [&](Poly g) {
        Rat u = coeff_bound(g);
        nodes.push_back({std::move(g), u});
        queue.emplace(nodes.back().ubound, nodes.size() - 1);
    };
    push(std::move(g0));
    std::vector<Rat> origin(static_cast<std::size_t>(d), Rat(0));
    Rat best_lo = padic_abs(nodes.front().g.eval(origin), p);
    const auto shifts = residue_shifts(B.p, d);
    long processed = 0;
    Rat top_unresolved(0);
    bool resolved = true;

    while (!queue.empty()) {
        auto [u, idx] = queue.top();
        if (u <= best_lo) break;  // every remaining branch is dominated
        queue.pop();
        if (++processed > opts.node_budget) {
            top_unresolved = u;
            resolved = false;
            break;
        }
        Poly g = std::move(nodes[idx].g);
        for (const auto& r : shifts) {
            Poly child = g.compose_affine(r, Rat(B.p));
            best_lo = std::max(best_lo, padic_abs(child.constant_term(), p));
            Rat cu = coeff_bound(child);
            if (cu > best_lo) push(std::move(child));
        }
    }
    SupBounds out;
    out.lower = best_lo;
    out.upper = resolved ? best_lo : std::max(best_lo, top_unresolved);
    out.resolved = resolved;
    return out;
}

namespace {

GoodVerdict check_pair(const MeasureBounds& meas, const PowerProduct& C, const Rat& alpha, long M,
                       const SupBounds& sup, const Rat& ball_measure, long long p,
                       bool sup_vacuous) {
    if (sup_vacuous) return GoodVerdict::pass;  // |f| == 0: nothing to bound
    if (sup.lower == 0) return GoodVerdict::inconclusive;
    // rhs = C * (p^{-M} / sup_lo)^alpha * |B|; the sup enters as a certified
    // lower bound only, which over-estimates the rhs: a violation against it
    // is a true violation.
    PowerProduct rhs = C;
    rhs *= PowerProduct(rat_pow(Rat(p), -M) / sup.lower).pow(alpha);
    rhs *= PowerProduct(ball_measure);
    bool upper_ok = meas.upper == 0 || PowerProduct(meas.upper).compare(rhs) <= 0;
    bool lower_bad = meas.lower != 0 && PowerProduct(meas.lower).compare(rhs) > 0;
    if (upper_ok) return GoodVerdict::pass;
    if (lower_bad) return GoodVerdict::violation;
    return GoodVerdict::inconclusive;
}

}  // namespace

GoodReport good_certify(const Poly& f, const PAdicBall& B, const PowerProduct& C, const Rat& alpha,
                        long M_max, const MeasureOptions& opts) {
    if (alpha <= 0 || alpha > 1) throw domain_error("good_certify: alpha in (0,1] required");
    GoodReport rep;
    rep.C = C;
    rep.alpha = alpha;
    rep.sup = sup_abs_exact(f, B, opts);
    rep.sup_vacuous = rep.sup.resolved && rep.sup.upper == 0;
    for (long M = 1; M <= M_max; ++M) {
        GoodPair pair;
        pair.M = M;
        pair.measure = sublevel_measure_exact(f, B, M, opts);
        pair.verdict =
            check_pair(pair.measure, C, alpha, M, rep.sup, B.measure(), B.p, rep.sup_vacuous);
        if (!rep.sup_vacuous && rep.sup.lower != 0) {
            PowerProduct rhs = C;
            rhs *= PowerProduct(rat_pow(Rat(B.p), -M) / rep.sup.lower).pow(alpha);
            rhs *= PowerProduct(B.measure());
            pair.rhs_approx = rhs.to_double();
        }
        rep.pairs.push_back(std::move(pair));
    }
    return rep;
}

ProductGoodReport product_good_check(const Poly& f, const PAdicBall& B, const PowerProduct& C,
                                     const Rat& alpha, long M_max, int fibers_per_var,
                                     const MeasureOptions& opts) {
    const int d = B.dim();
    if (d < 1) throw domain_error("product_good_check: empty ball");
    ProductGoodReport out;
    if (d == 1) {
        out.product_report = good_certify(f, B, C, alpha, M_max, opts);
        out.pass = out.product_report.all_pass();
        return out;
    }
    // Slice certification on sampled fibers.
    for (int var = 0; var < d; ++var) {
        for (int fiber = 0; fiber < fibers_per_var; ++fiber) {
            std::vector<Rat> fixed =
                sample_ball(B, 0x5eed, static_cast<std::uint64_t>(var * 97 + fiber), 8);
            Poly slice(1);
            for (const auto& [m, c] : f.terms()) {
                Rat coef = c;
                for (int i = 0; i < d; ++i) {
                    if (i == var) continue;
                    coef *=
                        rat_pow(fixed[static_cast<std::size_t>(i)], m[static_cast<std::size_t>(i)]);
                }
                std::vector<int> mono{m[static_cast<std::size_t>(var)]};
                slice.set_coeff(mono, slice.coeff(mono) + coef);
            }
            PAdicBall line{B.p, {B.center[static_cast<std::size_t>(var)]}, B.level};
            out.slice_reports.push_back(good_certify(slice, line, C, alpha, M_max, opts));
        }
    }
    // Product inequality with (dC, alpha/d).
    PowerProduct dC = C * PowerProduct(Rat(d));
    out.product_report = good_certify(f, B, dC, alpha / d, M_max, opts);
    out.pass = out.product_report.all_pass();
    for (const auto& r : out.slice_reports)
        if (r.any_violation()) out.pass = false;
    return out;
}

std::vector<Rat> sample_ball(const PAdicBall& B, std::uint64_t seed, std::uint64_t index,
                             int digits) {
    CounterRng rng(seed, index);
    std::vector<Rat> x(static_cast<std::size_t>(B.dim()));
    Rat scale = rat_pow(Rat(B.p), B.level);
    for (int i = 0; i < B.dim(); ++i)
        x[static_cast<std::size_t>(i)] =
            B.center[static_cast<std::size_t>(i)] + scale * Rat(rng.next_padic_digits(B.p, digits));
    return x;
}

McEstimate measure_mc(const std::function<bool(const std::vector<Rat>&)>& pred, const PAdicBall& B,
                      std::uint64_t samples, std::uint64_t seed, int digits) {
    McEstimate est;
    est.samples = samples;
    for (std::uint64_t i = 0; i < samples; ++i) {
        std::vector<Rat> x = sample_ball(B, seed, i, digits);
        try {
            if (pred(x))
                ++est.hits;
            else
                ++est.misses;
        } catch (const precision_error&) {
            ++est.indeterminate;
        }
    }
    return est;
}

}  // namespace sarith
