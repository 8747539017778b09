#include "sarith/analytic.hpp"

#include <algorithm>

namespace sarith {

bool DomainSpec::contains_inf(std::span<const Rat> x) const {
    if (!inf_box) return true;
    if (x.size() != inf_box->size()) throw domain_error("domain: dimension mismatch");
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] < (*inf_box)[i].first || x[i] > (*inf_box)[i].second) return false;
    return true;
}

bool DomainSpec::contains_p(long long p, const std::vector<Rat>& x) const {
    auto it = p_balls.find(p);
    if (it == p_balls.end()) return true;
    return it->second.contains(x);
}

AnalyticMap AnalyticMap::veronese(int n) {
    if (n < 1) throw domain_error("veronese: n >= 1 required");
    AnalyticMap f;
    f.m = 1;
    f.n = n;
    f.name = "veronese" + std::to_string(n);
    for (int i = 1; i <= n; ++i) {
        Poly c(1);
        c.set_coeff({i}, Rat(1));
        f.comps.push_back(std::move(c));
    }
    return f;
}

AnalyticMap AnalyticMap::scalar(Poly f) {
    AnalyticMap g;
    g.m = f.nvars();
    g.n = 1;
    g.comps.push_back(std::move(f));
    return g;
}

AnalyticMap AnalyticMap::zero_map(int m) {
    AnalyticMap g;
    g.m = m;
    g.n = 1;
    g.comps.push_back(Poly(m));
    return g;
}

void AnalyticMap::validate() const {
    if (m < 1 || n < 1) throw domain_error("map: dimensions must be positive");
    if (static_cast<int>(comps.size()) != n) throw domain_error("map: component count mismatch");
    for (const Poly& c : comps)
        if (c.nvars() != m) throw domain_error("map: component arity mismatch");
}

bool AnalyticMap::is_zero() const {
    for (const Poly& c : comps)
        if (!c.is_zero()) return false;
    return true;
}

std::vector<Rat> AnalyticMap::eval(std::span<const Rat> x) const {
    std::vector<Rat> out;
    out.reserve(comps.size());
    for (const Poly& c : comps) out.push_back(c.eval(x));
    return out;
}

std::vector<PAdicNumber> AnalyticMap::eval_padic(const std::vector<PAdicNumber>& x,
                                                 bool check_domain) const {
    if (static_cast<int>(x.size()) != m) throw domain_error("eval: arity mismatch");
    if (check_domain && !x.empty()) {
        std::vector<Rat> reps;
        reps.reserve(x.size());
        for (const auto& xi : x) reps.push_back(xi.representative());
        if (!domain.contains_p(x.front().prime(), reps))
            throw domain_error("eval: point outside the domain U");
    }
    std::vector<PAdicNumber> out;
    out.reserve(comps.size());
    for (const Poly& c : comps) out.push_back(c.eval_padic(x));
    return out;
}

Poly AnalyticMap::linear_form(const Int& a0, std::span<const Int> a, const AnalyticMap* theta) const {
    validate();
    if (static_cast<int>(a.size()) != n) throw domain_error("linear_form: coefficient arity");
    Poly g = Poly::constant(m, Rat(a0));
    for (int i = 0; i < n; ++i)
        g = g + comps[static_cast<std::size_t>(i)].scaled(Rat(a[static_cast<std::size_t>(i)]));
    if (theta && !theta->is_zero()) {
        theta->validate();
        if (theta->m != m || theta->n != 1) throw domain_error("linear_form: theta shape");
        g = g + theta->comps.front();
    }
    return g;
}

std::vector<Rat> gradient(const Poly& g, std::span<const Rat> x) {
    std::vector<Rat> out;
    out.reserve(static_cast<std::size_t>(g.nvars()));
    for (int i = 0; i < g.nvars(); ++i) out.push_back(g.partial(i).eval(x));
    return out;
}

Rat gradient_norm_p(const Poly& g, std::span<const Rat> x, long long p) {
    Rat best(0);
    for (const Rat& d : gradient(g, x)) best = std::max(best, padic_abs(d, Int(p)));
    return best;
}

Rat gradient_norm_inf(const Poly& g, std::span<const Rat> x) {
    Rat best(0);
    for (const Rat& d : gradient(g, x)) best = std::max(best, rat_abs(d));
    return best;
}

std::optional<int> nondegeneracy_order(const AnalyticMap& F, std::span<const Rat> x, int lmax) {
    F.validate();
    if (lmax < 1) throw domain_error("nondegeneracy_order: lmax >= 1 required");
    // Rows: partial_beta F(x) for 1 <= |beta| <= l. Rank over Q equals rank
    // over Q_p, so exact rational elimination decides.
    std::vector<std::vector<Rat>> rows;
    auto rank_of = [&]() {
        std::vector<std::vector<Rat>> a = rows;
        int rank = 0;
        int cols = F.n;
        for (int c = 0; c < cols && rank < static_cast<int>(a.size()); ++c) {
            int piv = -1;
            for (int r = rank; r < static_cast<int>(a.size()); ++r)
                if (a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] != 0) {
                    piv = r;
                    break;
                }
            if (piv < 0) continue;
            std::swap(a[static_cast<std::size_t>(rank)], a[static_cast<std::size_t>(piv)]);
            for (int r = rank + 1; r < static_cast<int>(a.size()); ++r) {
                Rat f = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] /
                        a[static_cast<std::size_t>(rank)][static_cast<std::size_t>(c)];
                for (int cc = c; cc < cols; ++cc)
                    a[static_cast<std::size_t>(r)][static_cast<std::size_t>(cc)] -=
                        f * a[static_cast<std::size_t>(rank)][static_cast<std::size_t>(cc)];
            }
            ++rank;
        }
        return rank;
    };
    // Enumerate multiindices by total order.
    std::vector<std::vector<int>> betas;
    std::vector<int> cur(static_cast<std::size_t>(F.m), 0);
    auto gen = [&](auto&& self, int pos, int remaining) -> void {
        if (pos == F.m - 1) {
            cur[static_cast<std::size_t>(pos)] = remaining;
            betas.push_back(cur);
            return;
        }
        for (int v = 0; v <= remaining; ++v) {
            cur[static_cast<std::size_t>(pos)] = v;
            self(self, pos + 1, remaining - v);
        }
    };
    for (int l = 1; l <= lmax; ++l) {
        betas.clear();
        gen(gen, 0, l);
        for (const auto& b : betas) {
            std::vector<Rat> row;
            row.reserve(static_cast<std::size_t>(F.n));
            for (const Poly& c : F.comps) row.push_back(c.partial_multi(MultiIndex{b}).eval(x));
            rows.push_back(std::move(row));
        }
        if (rank_of() == F.n) return l;
    }
    return std::nullopt;
}

CoordinateChange normalize_coordinates(const Poly& F, std::span<const Rat> x0, int k, long long p,
                                       int depth) {
    const int d = F.nvars();
    if (k < 1) throw domain_error("normalize_coordinates: k >= 1 required");
    if (depth < 1) throw domain_error("normalize_coordinates: depth >= 1 required");
    // g(u) = sum_{|beta|=k} multinomial(k,beta) u^beta partial_beta F(x0).
    std::vector<std::pair<MultiIndex, Rat>> form;
    std::vector<int> cur(static_cast<std::size_t>(d), 0);
    bool any_nonzero = false;
    auto gen = [&](auto&& self, int pos, int remaining) -> void {
        if (pos == d - 1) {
            cur[static_cast<std::size_t>(pos)] = remaining;
            MultiIndex beta{cur};
            Rat val = F.partial_multi(beta).eval(x0);
            if (val != 0) {
                form.emplace_back(beta, Rat(multinomial(k, beta)) * val);
                any_nonzero = true;
            }
            return;
        }
        for (int v = 0; v <= remaining; ++v) {
            cur[static_cast<std::size_t>(pos)] = v;
            self(self, pos + 1, remaining - v);
        }
    };
    gen(gen, 0, k);
    if (!any_nonzero)
        throw domain_error("normalize_coordinates: all order-k partials vanish at x0");

    auto eval_form = [&](const std::vector<Int>& u) {
        Rat acc(0);
        for (const auto& [beta, c] : form) {
            Rat t = c;
            for (int i = 0; i < d; ++i)
                t *= rat_pow(Rat(u[static_cast<std::size_t>(i)]), beta.idx[static_cast<std::size_t>(i)]);
            acc += t;
        }
        return acc;
    };

    Int span = int_pow(Int(p), static_cast<unsigned long>(depth));
    CoordinateChange out;
    out.columns.resize(static_cast<std::size_t>(d));
    out.pure_partials.resize(static_cast<std::size_t>(d));
    for (int col = 0; col < d; ++col) {
        bool found = false;
        // Digits (c_1,...,c_d) in lexicographic order, c_1 most significant.
        Int total = 1;
        for (int i = 0; i < d; ++i) total *= span;
        for (Int idx = 0; idx < total && !found; ++idx) {
            Int rest = idx;
            std::vector<Int> cdig(static_cast<std::size_t>(d));
            for (int i = d - 1; i >= 0; --i) {
                cdig[static_cast<std::size_t>(i)] = mod_floor(rest, span);
                rest = floor_div(rest, span);
            }
            std::vector<Int> u(static_cast<std::size_t>(d));
            for (int i = 0; i < d; ++i) {
                u[static_cast<std::size_t>(i)] = Int(p) * cdig[static_cast<std::size_t>(i)];
                if (i == col) u[static_cast<std::size_t>(i)] += 1;
            }
            Rat val = eval_form(u);
            if (val != 0) {
                out.columns[static_cast<std::size_t>(col)] = u;
                out.pure_partials[static_cast<std::size_t>(col)] = val;
                found = true;
            }
        }
        if (!found)
            throw domain_error(
                "normalize_coordinates: no witness within search depth; raise depth");
    }
    // Determinant must be a p-adic unit (A == I mod p by construction).
    std::vector<std::vector<Rat>> A(static_cast<std::size_t>(d),
                                    std::vector<Rat>(static_cast<std::size_t>(d)));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                Rat(out.columns[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]);
    Rat det(1);
    {
        auto a = A;
        for (int c = 0; c < d; ++c) {
            int piv = -1;
            for (int r = c; r < d; ++r)
                if (a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] != 0) {
                    piv = r;
                    break;
                }
            if (piv < 0) {
                det = 0;
                break;
            }
            if (piv != c) {
                std::swap(a[static_cast<std::size_t>(piv)], a[static_cast<std::size_t>(c)]);
                det = -det;
            }
            det *= a[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)];
            for (int r = c + 1; r < d; ++r) {
                Rat f = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] /
                        a[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)];
                for (int cc = c; cc < d; ++cc)
                    a[static_cast<std::size_t>(r)][static_cast<std::size_t>(cc)] -=
                        f * a[static_cast<std::size_t>(c)][static_cast<std::size_t>(cc)];
            }
        }
    }
    if (det == 0 || vp_rat(det, Int(p)) != 0)
        throw internal_error("normalize_coordinates: determinant is not a unit");
    out.identity = true;
    for (int i = 0; i < d && out.identity; ++i)
        for (int j = 0; j < d; ++j)
            if (out.columns[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] !=
                (i == j ? 1 : 0)) {
                out.identity = false;
                break;
            }
    return out;
}

NormalizationReport i3_report(const AnalyticMap& f, long long p, const PAdicBall& U, int grid_depth) {
    f.validate();
    if (U.dim() != f.m) throw domain_error("i3_report: ball dimension mismatch");
    NormalizationReport rep;
    Int P(p);
    Int step = int_pow(P, static_cast<unsigned long>(grid_depth));
    // Grid: center + p^level * (digits below p^grid_depth), all coordinates.
    std::vector<std::vector<Rat>> grid;
    std::vector<Int> cnt(static_cast<std::size_t>(f.m), 0);
    for (;;) {
        std::vector<Rat> x(static_cast<std::size_t>(f.m));
        for (int i = 0; i < f.m; ++i)
            x[static_cast<std::size_t>(i)] = U.center[static_cast<std::size_t>(i)] +
                                             Rat(cnt[static_cast<std::size_t>(i)]) *
                                                 rat_pow(Rat(p), U.level);
        grid.push_back(std::move(x));
        int i = 0;
        for (; i < f.m; ++i) {
            if (++cnt[static_cast<std::size_t>(i)] < step) break;
            cnt[static_cast<std::size_t>(i)] = 0;
        }
        if (i == f.m) break;
    }
    rep.sup_bound = 0;
    rep.grad_bound = 0;
    for (const auto& x : grid) {
        for (const Poly& c : f.comps) {
            rep.sup_bound = std::max(rep.sup_bound, padic_abs(c.eval(x), P));
            rep.grad_bound = std::max(rep.grad_bound, gradient_norm_p(c, x, p));
        }
    }
    rep.sup_ok = rep.sup_bound <= 1;
    rep.grad_ok = rep.grad_bound <= 1;
    // Second difference quotients on triples of grid points, per slot pair.
    rep.second_dq_bound = 0;
    std::size_t stride = std::max<std::size_t>(1, grid.size() / 6);
    std::vector<std::vector<Rat>> sample;
    for (std::size_t i = 0; i < grid.size(); i += stride) sample.push_back(grid[i]);
    for (const Poly& c : f.comps) {
        for (int v1 = 0; v1 < f.m; ++v1)
            for (int v2 = v1; v2 < f.m; ++v2) {
                MultiIndex beta{std::vector<int>(static_cast<std::size_t>(f.m), 0)};
                beta.idx[static_cast<std::size_t>(v1)] += 1;
                beta.idx[static_cast<std::size_t>(v2)] += 1;
                for (std::size_t i = 0; i < sample.size(); ++i) {
                    // Point groups from a rotation of the sample; repeats are
                    // fine for Phi-bar.
                    std::vector<std::vector<Rat>> groups;
                    for (int g = 0; g < f.m; ++g) {
                        std::vector<Rat> pts;
                        for (int t = 0; t <= beta.idx[static_cast<std::size_t>(g)]; ++t) {
                            const auto& pt = sample[(i + static_cast<std::size_t>(t)) % sample.size()];
                            pts.push_back(pt[static_cast<std::size_t>(g)]);
                        }
                        groups.push_back(std::move(pts));
                    }
                    rep.second_dq_bound =
                        std::max(rep.second_dq_bound, padic_abs(phi_bar(c, beta, groups), P));
                }
            }
    }
    rep.second_dq_ok = rep.second_dq_bound <= Rat(1, 2);
    return rep;
}

std::pair<AnalyticMap, int> rescale_to_i3(const AnalyticMap& f, long long p) {
    f.validate();
    Int P(p);
    // Coefficient (Gauss) bounds on Z_p^m: |f(x)| <= max |coeff|_p, and the
    // same for partials and for Phi-bar (whose monomial expansion has integer
    // coefficients). Choose e so that p^e f clears all three bounds.
    long need = 0;
    for (const Poly& c : f.comps) {
        for (const auto& [mono, coef] : c.terms()) {
            long v = vp_rat(coef, P);
            int deg = 0;
            for (int e : mono) deg += e;
            // value bound: v + e >= 0 ; gradient: handled by value bound since
            // d/dx multiplies by integers; second dq (deg >= 2): v + e >= 1.
            need = std::max(need, -v);
            if (deg >= 2) need = std::max(need, 1 - v);
        }
    }
    if (need <= 0) return {f, 0};
    AnalyticMap g = f;
    Rat scale = rat_pow(Rat(p), need);
    for (Poly& c : g.comps) c = c.scaled(scale);
    return {g, static_cast<int>(need)};
}

}  // namespace sarith
