#include "sarith/padic.hpp"

#include <algorithm>

namespace sarith {

void PAdicNumber::check_prime(long long p) {
    if (p < 2) throw domain_error("prime must be >= 2");
    for (long long d = 2; d * d <= p; ++d)
        if (p % d == 0) throw domain_error("p is not prime");
}

PAdicNumber PAdicNumber::zero(long long p, int precision) {
    check_prime(p);
    if (precision < 1) throw domain_error("precision must be >= 1");
    return PAdicNumber(p, 0, 0, precision, true);
}

PAdicNumber PAdicNumber::from_parts(long long p, long long v, Int unit, int precision) {
    check_prime(p);
    if (precision < 1) throw domain_error("precision must be >= 1");
    Int pn = int_pow(Int(p), static_cast<unsigned long>(precision));
    unit = mod_floor(unit, pn);
    if (unit % p == 0) throw domain_error("unit part must be coprime to p");
    return PAdicNumber(p, v, std::move(unit), precision, false);
}

PAdicNumber PAdicNumber::from_rational(const Rat& q, long long p, int precision) {
    check_prime(p);
    if (precision < 1) throw domain_error("precision must be >= 1");
    if (q == 0) return zero(p, precision);
    Int P(p);
    long vn = vp_int(num(q), P);
    long vd = vp_int(den(q), P);
    Int pn = int_pow(P, static_cast<unsigned long>(precision));
    Int un = num(q) / int_pow(P, static_cast<unsigned long>(vn));
    Int ud = den(q) / int_pow(P, static_cast<unsigned long>(vd));
    Int unit = mod_floor(un * mod_inverse(ud, pn), pn);
    return PAdicNumber(p, vn - vd, std::move(unit), precision, false);
}

long long PAdicNumber::valuation() const {
    if (zero_) throw domain_error("valuation of certified zero is +infinity");
    return v_;
}

const Int& PAdicNumber::unit() const {
    if (zero_) throw domain_error("certified zero has no unit part");
    return unit_;
}

Rat PAdicNumber::norm() const {
    if (zero_) return Rat(0);
    return rat_pow(Rat(p_), -v_);
}

std::vector<int> PAdicNumber::digits() const {
    std::vector<int> d(static_cast<std::size_t>(prec_), 0);
    if (zero_) return d;
    Int u = unit_;
    for (int i = 0; i < prec_; ++i) {
        d[static_cast<std::size_t>(i)] = (u % p_).convert_to<int>();
        u /= p_;
    }
    return d;
}

Rat PAdicNumber::representative() const {
    if (zero_) return Rat(0);
    return Rat(unit_) * rat_pow(Rat(p_), v_);
}

PAdicNumber PAdicNumber::neg() const {
    if (zero_) return *this;
    Int pn = int_pow(Int(p_), static_cast<unsigned long>(prec_));
    return PAdicNumber(p_, v_, mod_floor(-unit_, pn), prec_, false);
}

PAdicNumber PAdicNumber::add(const PAdicNumber& o) const {
    if (p_ != o.p_) throw domain_error("add: mismatched primes");
    if (zero_ && o.zero_) return zero(p_, std::min(prec_, o.prec_));
    if (zero_) return o;
    if (o.zero_) return *this;
    const PAdicNumber& a = v_ <= o.v_ ? *this : o;
    const PAdicNumber& b = v_ <= o.v_ ? o : *this;
    long long shift = b.v_ - a.v_;
    // Digits of the sum above level a.v_ + K are unknown.
    long long k64 = std::min<long long>(a.prec_, shift + b.prec_);
    int K = static_cast<int>(k64);
    Int pk = int_pow(Int(p_), static_cast<unsigned long>(K));
    Int m = mod_floor(a.unit_ + b.unit_ * int_pow(Int(p_), static_cast<unsigned long>(shift)), pk);
    if (m == 0)
        throw precision_error("add: cancellation below working precision (indeterminate valuation)");
    long t = vp_int(m, Int(p_));
    if (t >= K)
        throw precision_error("add: cancellation below working precision (indeterminate valuation)");
    int nprec = K - static_cast<int>(t);
    Int unit = m / int_pow(Int(p_), static_cast<unsigned long>(t));
    return PAdicNumber(p_, a.v_ + t, std::move(unit), nprec, false);
}

PAdicNumber PAdicNumber::mul(const PAdicNumber& o) const {
    if (p_ != o.p_) throw domain_error("mul: mismatched primes");
    int nprec = std::min(prec_, o.prec_);
    if (zero_ || o.zero_) return zero(p_, nprec);
    Int pn = int_pow(Int(p_), static_cast<unsigned long>(nprec));
    return PAdicNumber(p_, v_ + o.v_, mod_floor(unit_ * o.unit_, pn), nprec, false);
}

PAdicNumber PAdicNumber::inv() const {
    if (zero_) throw domain_error("inv: certified zero is not invertible");
    Int pn = int_pow(Int(p_), static_cast<unsigned long>(prec_));
    return PAdicNumber(p_, -v_, mod_inverse(unit_, pn), prec_, false);
}

PAdicNumber PAdicNumber::truncated(int precision) const {
    if (precision < 1) throw domain_error("precision must be >= 1");
    if (precision >= prec_) return *this;
    if (zero_) return zero(p_, precision);
    Int pn = int_pow(Int(p_), static_cast<unsigned long>(precision));
    return PAdicNumber(p_, v_, mod_floor(unit_, pn), precision, false);
}

PAdicNumber padic_arith(const PAdicNumber& a, const PAdicNumber& b, ArithOp op) {
    switch (op) {
        case ArithOp::add:
            return a.add(b);
        case ArithOp::mul:
            return a.mul(b);
        case ArithOp::inv_of_a:
            return a.inv();
    }
    throw domain_error("padic_arith: unknown op");
}

bool PAdicBall::contains(const std::vector<Rat>& x) const {
    if (static_cast<int>(x.size()) != dim()) throw domain_error("ball: dimension mismatch");
    for (int i = 0; i < dim(); ++i) {
        Rat d = x[static_cast<std::size_t>(i)] - center[static_cast<std::size_t>(i)];
        if (d == 0) continue;
        if (vp_rat(d, Int(p)) < level) return false;
    }
    return true;
}

int PAdicBall::relate(const PAdicBall& other) const {
    if (p != other.p || dim() != other.dim()) throw domain_error("ball: mismatched balls");
    const PAdicBall& small = level >= other.level ? *this : other;
    const PAdicBall& big = level >= other.level ? other : *this;
    // Ultrametric: the smaller ball is inside the bigger iff centers are close.
    if (big.contains(small.center)) return &small == this ? 1 : 2;
    return 0;
}

void Places::validate() const {
    for (std::size_t i = 0; i < primes.size(); ++i) {
        long long p = primes[i];
        if (p < 2) throw domain_error("places: invalid prime");
        for (long long d = 2; d * d <= p; ++d)
            if (p % d == 0) throw domain_error("places: invalid prime");
        if (i > 0 && primes[i - 1] >= p) throw domain_error("places: primes must be increasing");
    }
    if (l() == 0) throw domain_error("places: empty set");
}

int SAdicVector::dim() const {
    if (places.has_inf) return static_cast<int>(inf_components.size());
    if (!finite_components.empty()) return static_cast<int>(finite_components.front().size());
    return 0;
}

void SAdicVector::validate() const {
    places.validate();
    if (finite_components.size() != places.primes.size())
        throw domain_error("sadic: components/places mismatch");
    int d = dim();
    if (places.has_inf && static_cast<int>(inf_components.size()) != d)
        throw domain_error("sadic: dimension mismatch");
    for (std::size_t i = 0; i < finite_components.size(); ++i) {
        if (static_cast<int>(finite_components[i].size()) != d)
            throw domain_error("sadic: dimension mismatch");
        for (const auto& c : finite_components[i])
            if (c.prime() != places.primes[i]) throw domain_error("sadic: component prime mismatch");
    }
}

Rat sadic_norm(const SAdicVector& x) {
    x.validate();
    Rat best(0);
    if (x.places.has_inf)
        for (const Rat& c : x.inf_components) best = std::max(best, rat_abs(c));
    for (const auto& comp : x.finite_components)
        for (const PAdicNumber& c : comp) best = std::max(best, c.norm());
    return best;
}

Rat sadic_abs_int(const Int& a, const Places& S) {
    if (a == 0) return Rat(0);
    Rat best = S.has_inf ? Rat(int_abs(a)) : Rat(0);
    for (long long p : S.primes) best = std::max(best, padic_abs(Rat(a), Int(p)));
    return best;
}

PowerProduct quasinorm_v_exact(const std::vector<Int>& a, const std::vector<Rat>& v) {
    if (a.size() != v.size() || a.empty()) throw domain_error("quasinorm: size mismatch");
    Rat wsum(0);
    for (const Rat& w : v) {
        if (w <= 0) throw domain_error("quasinorm: weights must be positive");
        wsum += w;
    }
    if (wsum != Rat(static_cast<long>(a.size())))
        throw domain_error("quasinorm: weights must sum to n");
    PowerProduct best;
    bool have = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        PowerProduct cand(Rat(int_abs(a[i])), Rat(1) / v[i]);
        if (!have || best.compare(cand) < 0) {
            best = cand;
            have = true;
        }
    }
    if (!have) throw domain_error("quasinorm: zero vector has norm 0, not a power product");
    return best;
}

double quasinorm_v(const std::vector<Int>& a, const std::vector<Rat>& v) {
    bool all_zero = true;
    for (const Int& x : a)
        if (x != 0) all_zero = false;
    if (all_zero) return 0.0;
    return quasinorm_v_exact(a, v).to_double();
}

}  // namespace sarith
