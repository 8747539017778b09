#include "sarith/lattice.hpp"

#include <algorithm>
#include <functional>

namespace sarith {

namespace {

Rat dot_with_one(const std::vector<Int>& v, const std::vector<Rat>& y) {
    // q_0 + q_1 y_1 + ... + q_n y_n
    Rat acc(v[0]);
    for (std::size_t i = 0; i < y.size(); ++i) acc += Rat(v[i + 1]) * y[i];
    return acc;
}

}  // namespace

Int GammaLattice::det_abs() const {
    std::vector<std::vector<Rat>> a(basis.size(), std::vector<Rat>(basis.size()));
    for (std::size_t c = 0; c < basis.size(); ++c)
        for (std::size_t r = 0; r < basis.size(); ++r) a[r][c] = Rat(basis[c][r]);
    Rat det(1);
    std::size_t nn = a.size();
    for (std::size_t c = 0; c < nn; ++c) {
        std::size_t piv = c;
        while (piv < nn && a[piv][c] == 0) ++piv;
        if (piv == nn) return 0;
        if (piv != c) {
            std::swap(a[piv], a[c]);
            det = -det;
        }
        det *= a[c][c];
        for (std::size_t r = c + 1; r < nn; ++r) {
            Rat f = a[r][c] / a[c][c];
            for (std::size_t cc = c; cc < nn; ++cc) a[r][cc] -= f * a[c][cc];
        }
    }
    Rat ad = rat_abs(det);
    if (den(ad) != 1) throw internal_error("det_abs: non-integer determinant");
    return num(ad);
}

GammaLattice build_gamma(long long p, const std::vector<Rat>& y, int j) {
    if (j < 1) throw domain_error("build_gamma: j >= 1 required");
    if (y.empty()) throw domain_error("build_gamma: empty y");
    Int P(p);
    for (const Rat& yi : y)
        if (yi != 0 && vp_rat(yi, P) < 0) throw domain_error("build_gamma: |y_i|_p > 1");
    GammaLattice L;
    L.p = p;
    L.j = j;
    L.n = static_cast<int>(y.size());
    L.y = y;
    Int pj = int_pow(P, static_cast<unsigned long>(j));
    // q_i == p y_i mod p^j, canonical representative in [0, p^j).
    for (const Rat& yi : y) {
        Rat t = Rat(p) * yi;
        Int r = mod_floor(num(t) * mod_inverse(den(t), pj), pj);
        L.q.push_back(r);
    }
    int N = L.n + 1;
    L.basis.assign(static_cast<std::size_t>(N), std::vector<Int>(static_cast<std::size_t>(N), 0));
    L.basis[0][0] = pj;
    for (int i = 1; i < N; ++i) {
        L.basis[static_cast<std::size_t>(i)][0] = L.q[static_cast<std::size_t>(i - 1)];
        L.basis[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = -P;
    }
    L.covolume = pj * int_pow(P, static_cast<unsigned long>(L.n));
    return L;
}

GammaLattice build_gamma(const std::vector<PAdicNumber>& y, int j) {
    if (y.empty()) throw domain_error("build_gamma: empty y");
    long long p = y.front().prime();
    std::vector<Rat> reps;
    reps.reserve(y.size());
    for (const auto& yi : y) {
        if (yi.prime() != p) throw domain_error("build_gamma: mixed primes");
        if (!yi.is_zero() && yi.valuation() < 0) throw domain_error("build_gamma: |y_i|_p > 1");
        // q_i needs p y_i mod p^j; the contract demands j+1 known digits.
        if (!yi.is_zero() && yi.valuation() + yi.precision() < j + 1)
            throw domain_error("build_gamma: insufficient precision (need j+1 digits)");
        reps.push_back(yi.representative());
    }
    return build_gamma(p, reps, j);
}

MembershipResult lattice_membership(const GammaLattice& L, const std::vector<Int>& v) {
    if (static_cast<int>(v.size()) != L.n + 1) throw domain_error("membership: dimension mismatch");
    MembershipResult out;
    Int P(L.p);
    // Defining congruences: p | v_i for i >= 1 and |v_0 + sum v_i y_i|_p <= p^{-j}.
    for (int i = 1; i <= L.n; ++i)
        if (mod_floor(v[static_cast<std::size_t>(i)], P) != 0) return out;
    Rat form = dot_with_one(v, L.y);
    if (form != 0 && vp_rat(form, P) < L.j) return out;
    out.member = true;
    // Coefficient witness from the proof's inverse formula:
    // s_0 = (v_0 p + q_1 v_1 + ... + q_n v_n) / p^{j+1}, s_i = -v_i / p.
    Int pj1 = int_pow(P, static_cast<unsigned long>(L.j + 1));
    Int top = v[0] * P;
    for (int i = 1; i <= L.n; ++i)
        top += L.q[static_cast<std::size_t>(i - 1)] * v[static_cast<std::size_t>(i)];
    if (mod_floor(top, pj1) != 0)
        throw internal_error("membership: witness formula failed on a member");
    out.coeffs.push_back(top / pj1);
    for (int i = 1; i <= L.n; ++i) out.coeffs.push_back(-v[static_cast<std::size_t>(i)] / P);
    // Recompose exactly (basis is stored column-major).
    for (int r = 0; r <= L.n; ++r) {
        Int acc = 0;
        for (int c = 0; c <= L.n; ++c)
            acc += L.basis[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)] *
                   out.coeffs[static_cast<std::size_t>(c)];
        if (acc != v[static_cast<std::size_t>(r)])
            throw internal_error("membership: basis recomposition mismatch");
    }
    return out;
}

int integer_rank(const std::vector<std::vector<Int>>& rows) {
    if (rows.empty()) return 0;
    std::vector<std::vector<Rat>> a;
    a.reserve(rows.size());
    for (const auto& r : rows) {
        std::vector<Rat> rr;
        rr.reserve(r.size());
        for (const Int& x : r) rr.emplace_back(x);
        a.push_back(std::move(rr));
    }
    std::size_t cols = a.front().size();
    int rank = 0;
    for (std::size_t c = 0; c < cols && rank < static_cast<int>(a.size()); ++c) {
        std::size_t piv = static_cast<std::size_t>(rank);
        while (piv < a.size() && a[piv][c] == 0) ++piv;
        if (piv == a.size()) continue;
        std::swap(a[static_cast<std::size_t>(rank)], a[piv]);
        for (std::size_t r = static_cast<std::size_t>(rank) + 1; r < a.size(); ++r) {
            if (a[r][c] == 0) continue;
            Rat f = a[r][c] / a[static_cast<std::size_t>(rank)][c];
            for (std::size_t cc = c; cc < cols; ++cc)
                a[r][cc] -= f * a[static_cast<std::size_t>(rank)][cc];
        }
        ++rank;
    }
    return rank;
}

namespace {

struct Candidate {
    Int norm;
    std::vector<Int> w;
    bool operator<(const Candidate& o) const {
        if (norm != o.norm) return norm < o.norm;
        return w < o.w;
    }
};

std::optional<std::pair<std::vector<Candidate>, Int>> greedy_chain(std::vector<Candidate> pool,
                                                                   int dim) {
    std::sort(pool.begin(), pool.end());
    std::vector<Candidate> chain;
    std::vector<std::vector<Int>> chosen;
    for (const auto& c : pool) {
        if (static_cast<int>(chain.size()) == dim) break;
        chosen.push_back(c.w);
        if (integer_rank(chosen) == static_cast<int>(chosen.size()))
            chain.push_back(c);
        else
            chosen.pop_back();
    }
    if (static_cast<int>(chain.size()) < dim) return std::nullopt;
    Int mx = chain.back().norm;
    return std::make_pair(std::move(chain), mx);
}

// Enumerate tails (s_1..s_n) with max|s_i| == shell, up to overall sign.
void for_each_tail_in_shell(int n, long shell,
                            const std::function<void(const std::vector<long>&)>& fn) {
    std::vector<long> s(static_cast<std::size_t>(n), 0);
    auto rec = [&](auto&& self, int pos, bool hit, bool all_zero_prefix) -> void {
        if (pos == n) {
            if (hit) fn(s);
            return;
        }
        for (long v = -shell; v <= shell; ++v) {
            if (all_zero_prefix && v < 0) continue;  // canonical sign
            s[static_cast<std::size_t>(pos)] = v;
            self(self, pos + 1, hit || std::labs(v) == shell, all_zero_prefix && v == 0);
        }
        s[static_cast<std::size_t>(pos)] = 0;
    };
    rec(rec, 0, false, true);
}

}  // namespace

MinimaResult successive_minima(const GammaLattice& L, const Int& Q, const MinimaOptions& opts) {
    if (Q < 1) throw domain_error("successive_minima: Q >= 1 required");
    const int dim = L.n + 1;
    Int P(L.p);
    Int pj = int_pow(P, static_cast<unsigned long>(L.j));
    MinimaResult out;

    std::vector<Candidate> pool;
    {
        std::vector<Int> e0(static_cast<std::size_t>(dim), 0);
        e0[0] = pj;
        pool.push_back({pj, std::move(e0)});
    }
    auto push_tail = [&](const std::vector<long>& tail) {
        // w_0 lies in the class sum_i s_i q_i mod p^j. The two smallest
        // representatives per tail plus the e0 vector dominate every lattice
        // vector for the greedy chain.
        Int c = 0;
        Int tail_norm = 0;
        for (int i = 0; i < L.n; ++i) {
            c += Int(tail[static_cast<std::size_t>(i)]) * L.q[static_cast<std::size_t>(i)];
            tail_norm = std::max(tail_norm, P * Int(std::labs(tail[static_cast<std::size_t>(i)])));
        }
        Int r0 = mod_centered(c, pj);
        Int r1 = r0 == 0 ? pj : (r0 > 0 ? Int(r0 - pj) : Int(r0 + pj));
        for (const Int& rep : {r0, r1}) {
            std::vector<Int> w(static_cast<std::size_t>(dim));
            w[0] = rep;
            for (int i = 0; i < L.n; ++i)
                w[static_cast<std::size_t>(i + 1)] = -P * Int(tail[static_cast<std::size_t>(i)]);
            pool.push_back({std::max(int_abs(rep), tail_norm), std::move(w)});
        }
    };

    long shell = 0;
    for (;;) {
        if (shell > 0) {
            for_each_tail_in_shell(L.n, shell, [&](const std::vector<long>& t) {
                ++out.tails_processed;
                push_tail(t);
            });
        }
        if (out.tails_processed > opts.tail_budget) {
            out.complete = false;
            break;
        }
        auto chain = greedy_chain(pool, dim);
        if (chain) {
            // Any vector from an unseen shell has norm >= p (shell+1).
            if (P * Int(shell + 1) >= chain->second) {
                for (const auto& c : chain->first) {
                    out.lambda.push_back(Rat(c.norm) / Rat(Q));
                    out.witnesses.push_back(c.w);
                }
                return out;
            }
        }
        ++shell;
    }
    auto chain = greedy_chain(pool, dim);
    if (chain)
        for (const auto& c : chain->first) {
            out.lambda.push_back(Rat(c.norm) / Rat(Q));
            out.witnesses.push_back(c.w);
        }
    return out;
}

MinimaResult successive_minima_general(const std::vector<std::vector<Int>>& basis, const Int& Q,
                                       const MinimaOptions& opts) {
    const int dim = static_cast<int>(basis.size());
    if (dim == 0) throw domain_error("successive_minima_general: empty basis");
    // Inverse of the basis matrix over Q, for coefficient-box bounds.
    std::vector<std::vector<Rat>> a(static_cast<std::size_t>(dim),
                                    std::vector<Rat>(static_cast<std::size_t>(2 * dim), Rat(0)));
    for (int c = 0; c < dim; ++c)
        for (int r = 0; r < dim; ++r)
            a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] =
                Rat(basis[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)]);
    for (int i = 0; i < dim; ++i)
        a[static_cast<std::size_t>(i)][static_cast<std::size_t>(dim + i)] = 1;
    for (int c = 0; c < dim; ++c) {
        int piv = c;
        while (piv < dim && a[static_cast<std::size_t>(piv)][static_cast<std::size_t>(c)] == 0)
            ++piv;
        if (piv == dim) throw domain_error("successive_minima_general: singular basis");
        std::swap(a[static_cast<std::size_t>(piv)], a[static_cast<std::size_t>(c)]);
        Rat d = a[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)];
        for (int cc = 0; cc < 2 * dim; ++cc)
            a[static_cast<std::size_t>(c)][static_cast<std::size_t>(cc)] /= d;
        for (int r = 0; r < dim; ++r) {
            if (r == c) continue;
            Rat f = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
            if (f == 0) continue;
            for (int cc = 0; cc < 2 * dim; ++cc)
                a[static_cast<std::size_t>(r)][static_cast<std::size_t>(cc)] -=
                    f * a[static_cast<std::size_t>(c)][static_cast<std::size_t>(cc)];
        }
    }
    std::vector<Rat> rowsum(static_cast<std::size_t>(dim), Rat(0));
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c)
            rowsum[static_cast<std::size_t>(r)] +=
                rat_abs(a[static_cast<std::size_t>(r)][static_cast<std::size_t>(dim + c)]);

    Int R = 0;
    for (const auto& col : basis) {
        Int nn = 0;
        for (const Int& x : col) nn = std::max(nn, int_abs(x));
        R = (R == 0) ? nn : std::min(R, nn);
    }
    MinimaResult out;
    long processed = 0;
    for (;;) {
        std::vector<Candidate> pool;
        std::vector<Int> hi(static_cast<std::size_t>(dim));
        for (int i = 0; i < dim; ++i)
            hi[static_cast<std::size_t>(i)] =
                rat_round(Rat(R) * rowsum[static_cast<std::size_t>(i)]) + 1;
        std::vector<Int> s(static_cast<std::size_t>(dim));
        bool over_budget = false;
        auto rec = [&](auto&& self, int pos) -> void {
            if (over_budget) return;
            if (pos == dim) {
                if (++processed > opts.tail_budget) {
                    over_budget = true;
                    return;
                }
                bool all_zero = true;
                for (const Int& si : s)
                    if (si != 0) all_zero = false;
                if (all_zero) return;
                std::vector<Int> w(static_cast<std::size_t>(dim), 0);
                Int nn = 0;
                for (int r = 0; r < dim; ++r) {
                    for (int c = 0; c < dim; ++c)
                        w[static_cast<std::size_t>(r)] +=
                            basis[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)] *
                            s[static_cast<std::size_t>(c)];
                    nn = std::max(nn, int_abs(w[static_cast<std::size_t>(r)]));
                }
                if (nn <= R) pool.push_back({nn, std::move(w)});
                return;
            }
            for (Int v = -hi[static_cast<std::size_t>(pos)]; v <= hi[static_cast<std::size_t>(pos)];
                 ++v) {
                s[static_cast<std::size_t>(pos)] = v;
                self(self, pos + 1);
            }
        };
        rec(rec, 0);
        out.tails_processed = processed;
        if (over_budget) {
            out.complete = false;
            auto chain = greedy_chain(pool, dim);
            if (chain)
                for (const auto& c : chain->first) {
                    out.lambda.push_back(Rat(c.norm) / Rat(Q));
                    out.witnesses.push_back(c.w);
                }
            return out;
        }
        auto chain = greedy_chain(pool, dim);
        if (chain && chain->second <= R) {
            for (const auto& c : chain->first) {
                out.lambda.push_back(Rat(c.norm) / Rat(Q));
                out.witnesses.push_back(c.w);
            }
            return out;
        }
        R *= 2;
    }
}

bool has_nonzero_point_in_box(const GammaLattice& L, const Int& Q) {
    Int P(L.p);
    Int pj = int_pow(P, static_cast<unsigned long>(L.j));
    if (pj <= Q) return true;  // (p^j, 0, ..., 0) fits
    long shell_max = Int(Q / P).convert_to<long>();
    bool found = false;
    for (long shell = 1; shell <= shell_max && !found; ++shell) {
        for_each_tail_in_shell(L.n, shell, [&](const std::vector<long>& tail) {
            if (found) return;
            Int c = 0;
            for (int i = 0; i < L.n; ++i)
                c += Int(tail[static_cast<std::size_t>(i)]) * L.q[static_cast<std::size_t>(i)];
            Int r0 = mod_centered(c, pj);
            if (int_abs(r0) <= Q) found = true;
        });
    }
    return found;
}

MinkowskiReport minkowski_audit(const GammaLattice& L, const Int& Q, const MinimaResult& minima,
                                const std::optional<Rat>& delta) {
    MinkowskiReport rep;
    if (minima.lambda.empty()) throw domain_error("minkowski_audit: minima missing");
    Rat prod(1);
    for (const Rat& l : minima.lambda) prod *= l;
    rep.lambda_product = prod;
    // lambda_1...lambda_{n+1} (2Q)^{n+1} <= 2^{n+1} covol  <=>  prod <= covol/Q^{n+1}
    rep.product_bound = Rat(L.covolume) / rat_pow(Rat(Q), L.n + 1);
    rep.product_ok = prod <= rep.product_bound;
    rep.slack = rep.product_bound - prod;
    rep.first_minimum_ok = rat_pow(minima.lambda.front(), L.n + 1) <= rep.product_bound;
    rep.lambda1_gt_1 = minima.lambda.front() > 1;
    if (delta) {
        Rat bound = rat_pow(Rat(Q), L.n + 1) * rat_pow(Rat(L.p), L.n + 2) / *delta;
        rep.covol_bound_ok = Rat(L.covolume) <= bound;
        rep.lambda_last_ok = minima.lambda.back() <= rat_pow(Rat(L.p), L.n + 2) / *delta;
    }
    return rep;
}

}  // namespace sarith
