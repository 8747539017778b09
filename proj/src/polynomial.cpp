#include "sarith/polynomial.hpp"

#include <algorithm>
#include <sstream>

namespace sarith {

Int factorial(int n) {
    Int r = 1;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

Int binomial(const Int& n, int k) {
    if (k < 0) return 0;
    Int r = 1;
    for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return r;
}

Int MultiIndex::factorial() const {
    Int r = 1;
    for (int i : idx) r *= sarith::factorial(i);
    return r;
}

Int multinomial(int k, const MultiIndex& beta) {
    if (beta.order() != k) throw domain_error("multinomial: order mismatch");
    return factorial(k) / beta.factorial();
}

Poly Poly::constant(int nvars, const Rat& c) {
    Poly f(nvars);
    if (c != 0) f.terms_[std::vector<int>(static_cast<std::size_t>(nvars), 0)] = c;
    return f;
}

Poly Poly::variable(int nvars, int i) {
    if (i < 0 || i >= nvars) throw domain_error("Poly::variable: index out of range");
    Poly f(nvars);
    std::vector<int> mono(static_cast<std::size_t>(nvars), 0);
    mono[static_cast<std::size_t>(i)] = 1;
    f.terms_[mono] = 1;
    return f;
}

int Poly::degree() const {
    int d = 0;
    for (const auto& [m, c] : terms_) {
        int s = 0;
        for (int e : m) s += e;
        d = std::max(d, s);
    }
    return d;
}

bool Poly::is_constant() const {
    return terms_.empty() ||
           (terms_.size() == 1 &&
            terms_.begin()->first == std::vector<int>(static_cast<std::size_t>(nvars_), 0));
}

Rat Poly::constant_term() const {
    auto it = terms_.find(std::vector<int>(static_cast<std::size_t>(nvars_), 0));
    return it == terms_.end() ? Rat(0) : it->second;
}

void Poly::set_coeff(const std::vector<int>& mono, const Rat& c) {
    if (static_cast<int>(mono.size()) != nvars_) throw domain_error("Poly: monomial size mismatch");
    for (int e : mono)
        if (e < 0) throw domain_error("Poly: negative exponent");
    if (c == 0)
        terms_.erase(mono);
    else
        terms_[mono] = c;
}

Rat Poly::coeff(const std::vector<int>& mono) const {
    auto it = terms_.find(mono);
    return it == terms_.end() ? Rat(0) : it->second;
}

void Poly::add_term(const std::vector<int>& mono, const Rat& c) {
    if (c == 0) return;
    auto [it, fresh] = terms_.emplace(mono, c);
    if (!fresh) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

Rat Poly::eval(std::span<const Rat> x) const {
    if (static_cast<int>(x.size()) != nvars_) throw domain_error("Poly::eval: arity mismatch");
    Rat acc(0);
    for (const auto& [m, c] : terms_) {
        Rat t = c;
        for (int i = 0; i < nvars_; ++i)
            if (m[static_cast<std::size_t>(i)] != 0)
                t *= rat_pow(x[static_cast<std::size_t>(i)], m[static_cast<std::size_t>(i)]);
        acc += t;
    }
    return acc;
}

PAdicNumber Poly::eval_padic(const std::vector<PAdicNumber>& x) const {
    if (static_cast<int>(x.size()) != nvars_) throw domain_error("Poly::eval: arity mismatch");
    if (x.empty()) throw domain_error("Poly::eval_padic: needs at least one variable");
    long long p = x.front().prime();
    int prec = kDefaultPrecision;
    for (const auto& xi : x) {
        if (xi.prime() != p) throw domain_error("Poly::eval_padic: mixed primes");
        prec = std::min(prec, xi.precision());
    }
    PAdicNumber acc = PAdicNumber::zero(p, prec);
    for (const auto& [m, c] : terms_) {
        PAdicNumber t = PAdicNumber::from_rational(c, p, prec);
        for (int i = 0; i < nvars_; ++i)
            for (int e = 0; e < m[static_cast<std::size_t>(i)]; ++e)
                t = t.mul(x[static_cast<std::size_t>(i)]);
        acc = acc.add(t);
    }
    return acc;
}

Poly Poly::partial(int var) const {
    if (var < 0 || var >= nvars_) throw domain_error("Poly::partial: index out of range");
    Poly g(nvars_);
    for (const auto& [m, c] : terms_) {
        int e = m[static_cast<std::size_t>(var)];
        if (e == 0) continue;
        std::vector<int> mm = m;
        mm[static_cast<std::size_t>(var)] = e - 1;
        g.add_term(mm, c * e);
    }
    return g;
}

Poly Poly::partial_multi(const MultiIndex& beta) const {
    if (static_cast<int>(beta.idx.size()) != nvars_)
        throw domain_error("Poly::partial_multi: arity mismatch");
    Poly g = *this;
    for (int i = 0; i < nvars_; ++i)
        for (int k = 0; k < beta.idx[static_cast<std::size_t>(i)]; ++k) g = g.partial(i);
    return g;
}

Poly Poly::operator+(const Poly& o) const {
    if (nvars_ != o.nvars_) throw domain_error("Poly: arity mismatch");
    Poly g = *this;
    for (const auto& [m, c] : o.terms_) g.add_term(m, c);
    return g;
}

Poly Poly::operator-(const Poly& o) const {
    if (nvars_ != o.nvars_) throw domain_error("Poly: arity mismatch");
    Poly g = *this;
    for (const auto& [m, c] : o.terms_) g.add_term(m, -c);
    return g;
}

Poly Poly::operator*(const Poly& o) const {
    if (nvars_ != o.nvars_) throw domain_error("Poly: arity mismatch");
    Poly g(nvars_);
    for (const auto& [ma, ca] : terms_)
        for (const auto& [mb, cb] : o.terms_) {
            std::vector<int> m(static_cast<std::size_t>(nvars_));
            for (int i = 0; i < nvars_; ++i)
                m[static_cast<std::size_t>(i)] =
                    ma[static_cast<std::size_t>(i)] + mb[static_cast<std::size_t>(i)];
            g.add_term(m, ca * cb);
        }
    return g;
}

Poly Poly::scaled(const Rat& c) const {
    Poly g(nvars_);
    if (c == 0) return g;
    for (const auto& [m, k] : terms_) g.terms_[m] = k * c;
    return g;
}

Poly Poly::compose_affine(std::span<const Rat> a, const Rat& s) const {
    if (static_cast<int>(a.size()) != nvars_) throw domain_error("compose_affine: arity mismatch");
    Poly g(nvars_);
    std::vector<int> zero(static_cast<std::size_t>(nvars_), 0);
    for (const auto& [m, c] : terms_) {
        // Expand prod_i (a_i + s z_i)^{m_i} term by term.
        std::vector<std::pair<std::vector<int>, Rat>> acc{{zero, c}};
        for (int i = 0; i < nvars_; ++i) {
            int e = m[static_cast<std::size_t>(i)];
            if (e == 0) continue;
            std::vector<std::pair<std::vector<int>, Rat>> next;
            for (int k = 0; k <= e; ++k) {
                Rat coef = Rat(binomial(Int(e), k)) * rat_pow(a[static_cast<std::size_t>(i)], e - k) *
                           rat_pow(s, k);
                if (coef == 0) continue;
                for (const auto& [mono, cc] : acc) {
                    std::vector<int> mm = mono;
                    mm[static_cast<std::size_t>(i)] += k;
                    next.emplace_back(std::move(mm), cc * coef);
                }
            }
            acc = std::move(next);
        }
        for (const auto& [mono, cc] : acc) g.add_term(mono, cc);
    }
    return g;
}

Poly Poly::compose_linear(const std::vector<std::vector<Rat>>& A) const {
    if (static_cast<int>(A.size()) != nvars_) throw domain_error("compose_linear: shape mismatch");
    for (const auto& row : A)
        if (static_cast<int>(row.size()) != nvars_)
            throw domain_error("compose_linear: shape mismatch");
    // x_i = sum_j A[i][j] z_j
    std::vector<Poly> subs;
    subs.reserve(static_cast<std::size_t>(nvars_));
    for (int i = 0; i < nvars_; ++i) {
        Poly s(nvars_);
        for (int j = 0; j < nvars_; ++j) {
            std::vector<int> mono(static_cast<std::size_t>(nvars_), 0);
            mono[static_cast<std::size_t>(j)] = 1;
            s.add_term(mono, A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
        }
        subs.push_back(std::move(s));
    }
    Poly g(nvars_);
    for (const auto& [m, c] : terms_) {
        Poly t = Poly::constant(nvars_, c);
        for (int i = 0; i < nvars_; ++i)
            for (int e = 0; e < m[static_cast<std::size_t>(i)]; ++e)
                t = t * subs[static_cast<std::size_t>(i)];
        g = g + t;
    }
    return g;
}

Poly Poly::embed(int nvars, std::span<const int> slot) const {
    if (static_cast<int>(slot.size()) != nvars_) throw domain_error("embed: slot size mismatch");
    Poly g(nvars);
    for (const auto& [m, c] : terms_) {
        std::vector<int> mono(static_cast<std::size_t>(nvars), 0);
        for (int i = 0; i < nvars_; ++i)
            mono[static_cast<std::size_t>(slot[static_cast<std::size_t>(i)])] +=
                m[static_cast<std::size_t>(i)];
        g.add_term(mono, c);
    }
    return g;
}

std::string Poly::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << c.str();
        for (int i = 0; i < nvars_; ++i)
            if (m[static_cast<std::size_t>(i)] > 0) {
                os << "*x" << i;
                if (m[static_cast<std::size_t>(i)] > 1) os << "^" << m[static_cast<std::size_t>(i)];
            }
    }
    return os.str();
}

Rat complete_homogeneous(int d, std::span<const Rat> xs) {
    if (d < 0) return Rat(0);
    if (d == 0) return Rat(1);
    if (xs.empty()) return Rat(0);
    // h_d over a growing prefix: h[k] = h_k(x_1..x_m) via the recursion
    // h_k(x_1..x_j) = h_k(x_1..x_{j-1}) + x_j h_{k-1}(x_1..x_j).
    std::vector<Rat> h(static_cast<std::size_t>(d) + 1, Rat(0));
    h[0] = 1;
    for (const Rat& x : xs)
        for (int k = 1; k <= d; ++k) h[static_cast<std::size_t>(k)] += x * h[static_cast<std::size_t>(k - 1)];
    return h[static_cast<std::size_t>(d)];
}

namespace {

void check_groups(const Poly& f, const MultiIndex& beta,
                  const std::vector<std::vector<Rat>>& groups, bool require_distinct) {
    if (static_cast<int>(beta.idx.size()) != f.nvars())
        throw domain_error("difference quotient: beta arity mismatch");
    if (groups.size() != beta.idx.size())
        throw domain_error("difference quotient: group count mismatch");
    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (static_cast<int>(groups[g].size()) != beta.idx[g] + 1)
            throw domain_error("difference quotient: group size must be i_g + 1");
        if (require_distinct)
            for (std::size_t i = 0; i < groups[g].size(); ++i)
                for (std::size_t j = i + 1; j < groups[g].size(); ++j)
                    if (groups[g][i] == groups[g][j])
                        throw domain_error("difference quotient: coincident points");
    }
}

Rat dq_recurse(const Poly& f, std::vector<int> beta, std::vector<std::vector<Rat>>& groups) {
    int g = -1;
    for (std::size_t i = 0; i < beta.size(); ++i)
        if (beta[i] > 0) {
            g = static_cast<int>(i);
            break;
        }
    if (g < 0) {
        std::vector<Rat> x;
        x.reserve(groups.size());
        for (const auto& grp : groups) x.push_back(grp.front());
        return f.eval(x);
    }
    auto& grp = groups[static_cast<std::size_t>(g)];
    // Phi f(x1,...) = (Phi' f(x1,x3,..) - Phi' f(x2,x3,..)) / (x1 - x2)
    Rat x1 = grp[0], x2 = grp[1];
    std::vector<int> beta2 = beta;
    --beta2[static_cast<std::size_t>(g)];
    std::vector<Rat> rest(grp.begin() + 2, grp.end());
    std::vector<Rat> left;
    left.push_back(x1);
    left.insert(left.end(), rest.begin(), rest.end());
    std::vector<Rat> right;
    right.push_back(x2);
    right.insert(right.end(), rest.begin(), rest.end());
    std::vector<std::vector<Rat>> gl = groups, gr = groups;
    gl[static_cast<std::size_t>(g)] = left;
    gr[static_cast<std::size_t>(g)] = right;
    return (dq_recurse(f, beta2, gl) - dq_recurse(f, beta2, gr)) / (x1 - x2);
}

}  // namespace

Rat difference_quotient(const Poly& f, const MultiIndex& beta,
                        const std::vector<std::vector<Rat>>& groups) {
    check_groups(f, beta, groups, /*require_distinct=*/true);
    std::vector<std::vector<Rat>> g = groups;
    return dq_recurse(f, beta.idx, g);
}

Rat phi_bar(const Poly& f, const MultiIndex& beta, const std::vector<std::vector<Rat>>& groups) {
    check_groups(f, beta, groups, /*require_distinct=*/false);
    // Divided differences act monomial-wise: in each variable slot,
    // Phi^{i} maps T^k to h_{k-i}(group values).
    Rat acc(0);
    for (const auto& [m, c] : f.terms()) {
        Rat t = c;
        for (std::size_t g = 0; g < groups.size(); ++g) {
            int k = m[g];
            int i = beta.idx[g];
            if (k < i) {
                t = 0;
                break;
            }
            t *= complete_homogeneous(k - i, groups[g]);
            if (t == 0) break;
        }
        acc += t;
    }
    return acc;
}

Rat dn_at_point(const Poly& f, const MultiIndex& beta, std::span<const Rat> a) {
    if (static_cast<int>(a.size()) != f.nvars()) throw domain_error("dn_at_point: arity mismatch");
    std::vector<std::vector<Rat>> groups;
    groups.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        groups.emplace_back(static_cast<std::size_t>(beta.idx[i]) + 1, a[i]);
    return phi_bar(f, beta, groups);
}

Rat dn_at_point(const Poly& f, int j, const Rat& a) {
    if (f.nvars() != 1) throw domain_error("dn_at_point: expected one variable");
    MultiIndex beta{{j}};
    std::vector<Rat> pt{a};
    return dn_at_point(f, beta, pt);
}

}  // namespace sarith
