#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sarith {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

// Error hierarchy. precision_error means "the inputs do not carry enough
// digits to decide"; it must never be swallowed into a default verdict.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct precision_error : error {
    using error::error;
};
struct domain_error : error {
    using error::error;
};
struct budget_error : error {
    using error::error;
};
// A breach of a cross-checked invariant (dual routes disagreeing, a certified
// bound failing). CLI maps this to exit code 4.
struct internal_error : error {
    using error::error;
};

inline Int num(const Rat& q) { return boost::multiprecision::numerator(q); }
inline Int den(const Rat& q) { return boost::multiprecision::denominator(q); }

inline Int int_pow(Int base, unsigned long e) {
    Int r = 1;
    while (e) {
        if (e & 1) r *= base;
        base *= base;
        e >>= 1;
    }
    return r;
}

inline Rat rat_pow(const Rat& base, long e) {
    if (e == 0) return Rat(1);
    if (base == 0) {
        if (e < 0) throw domain_error("rat_pow: 0^negative");
        return Rat(0);
    }
    Int n = int_pow(num(base), static_cast<unsigned long>(e < 0 ? -e : e));
    Int d = int_pow(den(base), static_cast<unsigned long>(e < 0 ? -e : e));
    if (e > 0) return Rat(n, d);
    if (n < 0) return Rat(-d, -n);  // keep the denominator positive
    return Rat(d, n);
}

inline Rat rat_abs(const Rat& q) { return q < 0 ? Rat(-q) : q; }

inline Int int_abs(const Int& z) { return z < 0 ? Int(-z) : z; }

// p-adic valuation of a nonzero integer.
inline long vp_int(Int z, const Int& p) {
    if (z == 0) throw domain_error("vp_int: valuation of zero");
    long v = 0;
    while (z % p == 0) {
        z /= p;
        ++v;
    }
    return v;
}

// p-adic valuation of a nonzero rational.
inline long vp_rat(const Rat& q, const Int& p) {
    if (q == 0) throw domain_error("vp_rat: valuation of zero");
    return vp_int(num(q), p) - vp_int(den(q), p);
}

// |q|_p = p^{-v_p(q)} as an exact rational; |0|_p = 0.
inline Rat padic_abs(const Rat& q, const Int& p) {
    if (q == 0) return Rat(0);
    long v = vp_rat(q, p);
    Int pk = int_pow(p, static_cast<unsigned long>(v < 0 ? -v : v));
    return v >= 0 ? Rat(1, pk) : Rat(pk);
}

inline Int floor_div(const Int& a, const Int& b) {
    Int q = a / b, r = a % b;
    if (r != 0 && ((r < 0) != (b < 0))) --q;
    return q;
}

inline Int mod_floor(const Int& a, const Int& b) {
    Int r = a % b;
    if (r != 0 && ((r < 0) != (b < 0))) r += b;
    return r;
}

// Representative of a mod m in (-m/2, m/2].
inline Int mod_centered(const Int& a, const Int& m) {
    Int r = mod_floor(a, m);
    if (2 * r > m) r -= m;
    return r;
}

inline Rat rat_floor(const Rat& q) { return Rat(floor_div(num(q), den(q))); }

// Nearest integer, ties toward -inf (deterministic).
inline Int rat_round(const Rat& q) {
    return floor_div(2 * num(q) + den(q), 2 * den(q));
}

inline Int mod_inverse(const Int& a, const Int& m) {
    Int old_r = mod_floor(a, m), r = m;
    Int old_s = 1, s = 0;
    while (r != 0) {
        Int qt = old_r / r;
        Int tmp = old_r - qt * r;
        old_r = r;
        r = tmp;
        tmp = old_s - qt * s;
        old_s = s;
        s = tmp;
    }
    if (old_r != 1) throw domain_error("mod_inverse: not invertible");
    return mod_floor(old_s, m);
}

inline double to_double(const Rat& q) { return q.convert_to<double>(); }

// ---------------------------------------------------------------------------
// PowerProduct: a positive real of the form prod_i base_i^{e_i} with rational
// bases > 0 and rational exponents. Comparisons clear denominators and reduce
// to exact integer-exponent rational comparisons; no floating point.
// ---------------------------------------------------------------------------
class PowerProduct {
public:
    PowerProduct() = default;
    explicit PowerProduct(const Rat& value) {
        if (value <= 0) throw domain_error("PowerProduct: base must be positive");
        if (value != 1) factors_.emplace_back(value, Rat(1));
    }
    PowerProduct(const Rat& base, const Rat& exponent) {
        if (base <= 0) throw domain_error("PowerProduct: base must be positive");
        if (base != 1 && exponent != 0) factors_.emplace_back(base, exponent);
    }

    static PowerProduct one() { return PowerProduct(); }

    PowerProduct& operator*=(const PowerProduct& o) {
        factors_.insert(factors_.end(), o.factors_.begin(), o.factors_.end());
        return *this;
    }
    friend PowerProduct operator*(PowerProduct a, const PowerProduct& b) { return a *= b; }

    PowerProduct pow(const Rat& e) const {
        PowerProduct r;
        if (e == 0) return r;
        for (const auto& [b, x] : factors_) r.factors_.emplace_back(b, x * e);
        return r;
    }

    // sign of (*this - other), exact.
    int compare(const PowerProduct& other) const {
        // this / other = prod base_i^{e_i}; compare against 1.
        std::vector<std::pair<Rat, Rat>> f = factors_;
        for (const auto& [b, x] : other.factors_) f.emplace_back(b, -x);
        Int d = 1;
        for (const auto& [b, x] : f) d = boost::multiprecision::lcm(d, den(x));
        // ratio^d = prod base_i^{e_i * d}, an exact rational.
        Rat lhs = 1, rhs = 1;  // keep positive and negative exponents apart
        for (const auto& [b, x] : f) {
            Int e = num(x) * (d / den(x));
            if (e > 0)
                lhs *= rat_pow(b, e.convert_to<long>());
            else if (e < 0)
                rhs *= rat_pow(b, (-e).convert_to<long>());
        }
        if (lhs == rhs) return 0;
        return lhs < rhs ? -1 : 1;
    }
    int compare(const Rat& q) const {
        if (q <= 0) return 1;  // power products are positive
        return compare(PowerProduct(q));
    }

    bool operator<(const PowerProduct& o) const { return compare(o) < 0; }
    bool operator<=(const PowerProduct& o) const { return compare(o) <= 0; }
    bool operator==(const PowerProduct& o) const { return compare(o) == 0; }

    // Exact rational value if all exponents are integers; throws otherwise.
    Rat exact_rational() const {
        Rat r = 1;
        for (const auto& [b, x] : factors_) {
            if (den(x) != 1) throw domain_error("PowerProduct: value is not rational");
            r *= rat_pow(b, num(x).convert_to<long>());
        }
        return r;
    }

    double to_double() const {
        double r = 1.0;
        for (const auto& [b, x] : factors_)
            r *= std::pow(sarith::to_double(b), sarith::to_double(x));
        return r;
    }

private:
    std::vector<std::pair<Rat, Rat>> factors_;
};

// ---------------------------------------------------------------------------
// RatInterval: closed interval with exact rational endpoints. Used where a
// quantity (ln, 2^rational) is irrational but must enter exact comparisons.
// ---------------------------------------------------------------------------
struct RatInterval {
    Rat lo, hi;

    RatInterval() : lo(0), hi(0) {}
    explicit RatInterval(const Rat& x) : lo(x), hi(x) {}
    RatInterval(Rat l, Rat h) : lo(std::move(l)), hi(std::move(h)) {
        if (lo > hi) throw internal_error("RatInterval: lo > hi");
    }

    bool is_point() const { return lo == hi; }
    Rat width() const { return hi - lo; }

    RatInterval operator+(const RatInterval& o) const { return {lo + o.lo, hi + o.hi}; }
    RatInterval operator-(const RatInterval& o) const { return {lo - o.hi, hi - o.lo}; }
    RatInterval operator*(const RatInterval& o) const {
        Rat a = lo * o.lo, b = lo * o.hi, c = hi * o.lo, d = hi * o.hi;
        return {std::min(std::min(a, b), std::min(c, d)), std::max(std::max(a, b), std::max(c, d))};
    }
    RatInterval reciprocal() const {
        if (lo <= 0 && hi >= 0) throw domain_error("RatInterval: reciprocal across 0");
        return {Rat(1) / hi, Rat(1) / lo};
    }
    RatInterval operator/(const RatInterval& o) const { return *this * o.reciprocal(); }

    RatInterval pow_int(long e) const {
        if (e == 0) return RatInterval(Rat(1));
        if (e < 0) return pow_int(-e).reciprocal();
        RatInterval r(Rat(1));
        for (long i = 0; i < e; ++i) r = r * *this;
        return r;
    }

    // sign of interval vs rational: -1 surely below, +1 surely above, 0 undecided.
    int compare(const Rat& q) const {
        if (hi < q) return -1;
        if (lo > q) return 1;
        return 0;
    }
};

// Certified bracket of ln(q) for rational q > 0, via ln q = 2 atanh(z),
// z = (q-1)/(q+1), with an explicit geometric tail bound.
inline RatInterval ln_bracket(const Rat& q, int terms = 24) {
    if (q <= 0) throw domain_error("ln_bracket: argument must be positive");
    if (q == 1) return RatInterval(Rat(0));
    if (q < 1) {
        RatInterval r = ln_bracket(Rat(1) / q, terms);
        return {-r.hi, -r.lo};
    }
    // Scale into [1,2) by halving: ln q = k ln 2 + ln m.
    static const Rat kLn2Lo = Rat(Int("6931471805599453094"), int_pow(10, 19));
    static const Rat kLn2Hi = Rat(Int("6931471805599453095"), int_pow(10, 19));
    long k = 0;
    Rat m = q;
    while (m >= 2) {
        m /= 2;
        ++k;
    }
    Rat z = (m - 1) / (m + 1);  // in [0, 1/3)
    Rat z2 = z * z;
    Rat sum = 0, term = z;
    for (int i = 0; i < terms; ++i) {
        sum += term / (2 * i + 1);
        term *= z2;
    }
    // Remaining series <= term * sum_{j>=0} z2^j / (2 terms + 1)
    Rat tail = term / ((2 * terms + 1) * (1 - z2));
    RatInterval lnm(2 * sum, 2 * (sum + tail));
    return RatInterval(kLn2Lo * k, kLn2Hi * k) + lnm;
}

// Certified bracket of e^{-t} for rational t >= 0 via the alternating series
// (with halving-and-squaring for t > 1/2). Endpoints are coarsened to keep
// denominators bounded.
inline RatInterval exp_neg_bracket(const Rat& t, int terms = 24) {
    if (t < 0) throw domain_error("exp_neg_bracket: t >= 0 required");
    if (t == 0) return RatInterval(Rat(1));
    int halvings = 0;
    Rat s = t;
    while (s > Rat(1, 2)) {
        s /= 2;
        ++halvings;
    }
    // Alternating series: even partial sums above, odd below.
    Rat term(1), even(1), odd(0);
    for (int k = 1; k <= terms; ++k) {
        term *= s;
        term /= k;
        if (k % 2 == 1)
            odd = even - term;
        else
            even = odd + term;
    }
    RatInterval r(odd, even);
    const Int D = Int(1) << 128;
    auto coarse = [&](const RatInterval& x) {
        Rat lo = Rat(floor_div(num(x.lo) * D, den(x.lo)), D);
        Rat hi = Rat(floor_div(num(x.hi) * D, den(x.hi)) + 1, D);
        return RatInterval(lo, hi);
    };
    r = coarse(r);
    for (int i = 0; i < halvings; ++i) r = coarse(r * r);
    if (r.lo < 0) r.lo = 0;
    return r;
}

// Certified bracket of 2^{-g} for rational g >= 0.
inline RatInterval pow2_neg_bracket(const Rat& g, int terms = 24) {
    if (g < 0) throw domain_error("pow2_neg_bracket: g >= 0 required");
    if (g == 0) return RatInterval(Rat(1));
    if (den(g) == 1) return RatInterval(rat_pow(Rat(2), -num(g).convert_to<long>()));
    static const Rat kLn2Lo = Rat(Int("6931471805599453094"), int_pow(10, 19));
    static const Rat kLn2Hi = Rat(Int("6931471805599453095"), int_pow(10, 19));
    RatInterval lo = exp_neg_bracket(g * kLn2Hi, terms);
    RatInterval hi = exp_neg_bracket(g * kLn2Lo, terms);
    return {lo.lo, hi.hi};
}

// Certified bracket of b^e for rational b > 0 and rational exponent e,
// refined by bisection until width <= tol (relative to the value's scale).
inline RatInterval rat_pow_bracket(const Rat& b, const Rat& e, const Rat& tol) {
    if (b <= 0) throw domain_error("rat_pow_bracket: base must be positive");
    if (den(e) == 1) return RatInterval(rat_pow(b, num(e).convert_to<long>()));
    long w = den(e).convert_to<long>();
    Int n = num(e);
    // x = b^{n/w}  <=>  x^w = b^n, x > 0. Bisect on x.
    Rat target = rat_pow(b, n.convert_to<long>());
    Rat lo = 0, hi;
    if (target >= 1) {
        hi = target + 1;
        lo = 1;
        if (rat_pow(hi, w) < target) throw internal_error("rat_pow_bracket: bad upper seed");
    } else {
        lo = 0;
        hi = 1;
    }
    while (hi - lo > tol) {
        Rat mid = (lo + hi) / 2;
        if (rat_pow(mid, w) <= target)
            lo = mid;
        else
            hi = mid;
    }
    return {lo, hi};
}

// ---------------------------------------------------------------------------
// Counter-based RNG: every draw is keyed by (seed, stream, counter), so
// samples are reproducible regardless of evaluation order.
// ---------------------------------------------------------------------------
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(splitmix64(seed ^ splitmix64(stream))), counter_(0) {}

    std::uint64_t next_u64() { return splitmix64(key_ ^ splitmix64(++counter_)); }

    // Unbiased uniform draw in [0, m) by rejection.
    std::uint64_t next_below(std::uint64_t m) {
        if (m == 0) throw domain_error("CounterRng: modulus 0");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % m;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r < limit) return r % m;
        }
    }

    // Uniform integer in [-bound, bound].
    Int next_symmetric(const Int& bound) {
        Int span = 2 * bound + 1;
        Int r = next_int_below(span);
        return r - bound;
    }

    // Uniform Int in [0, m).
    Int next_int_below(const Int& m) {
        if (m <= 0) throw domain_error("CounterRng: modulus <= 0");
        if (m <= Int(UINT64_MAX)) return Int(next_below(m.convert_to<std::uint64_t>()));
        // Wide draw: digits base 2^32 with rejection at the top.
        std::size_t bits = 0;
        Int t = m;
        while (t > 0) {
            ++bits;
            t >>= 1;
        }
        for (;;) {
            Int r = 0;
            for (std::size_t got = 0; got < bits; got += 32)
                r = (r << 32) | Int(next_u64() & 0xffffffffULL);
            r &= (Int(1) << bits) - 1;
            if (r < m) return r;
        }
    }

    // Uniform w.r.t. Haar measure on Z_p: N uniform digits, least significant first.
    Int next_padic_digits(long long p, int n_digits) {
        Int x = 0, pk = 1;
        for (int i = 0; i < n_digits; ++i) {
            x += pk * Int(next_below(static_cast<std::uint64_t>(p)));
            pk *= p;
        }
        return x;
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_;
};

}  // namespace sarith
