#pragma once

#include "sarith/numeric.hpp"

#include <optional>
#include <vector>

namespace sarith {

constexpr int kDefaultPrecision = 64;

// A p-adic number at finite precision: value = p^v * unit, with the unit part
// known modulo p^N. A certified zero is a distinct state, not a deep
// valuation. Arithmetic propagates precision like interval arithmetic and
// throws precision_error instead of fabricating digits.
class PAdicNumber {
public:
    static PAdicNumber zero(long long p, int precision = kDefaultPrecision);
    static PAdicNumber from_rational(const Rat& q, long long p, int precision = kDefaultPrecision);
    static PAdicNumber from_parts(long long p, long long v, Int unit, int precision);

    long long prime() const { return p_; }
    bool is_zero() const { return zero_; }
    long long valuation() const;  // throws domain_error on certified zero
    const Int& unit() const;      // unit part mod p^N
    int precision() const { return prec_; }

    Rat norm() const;  // p^{-v} exactly; 0 for the certified zero

    // Digits of the unit part, least significant first (length = precision).
    std::vector<int> digits() const;

    // The exact rational p^v * unit represented by the known digits.
    Rat representative() const;

    PAdicNumber add(const PAdicNumber& o) const;
    PAdicNumber neg() const;
    PAdicNumber mul(const PAdicNumber& o) const;
    PAdicNumber inv() const;

    // Truncate to fewer known digits.
    PAdicNumber truncated(int precision) const;

    friend PAdicNumber operator+(const PAdicNumber& a, const PAdicNumber& b) { return a.add(b); }
    friend PAdicNumber operator-(const PAdicNumber& a, const PAdicNumber& b) { return a.add(b.neg()); }
    friend PAdicNumber operator*(const PAdicNumber& a, const PAdicNumber& b) { return a.mul(b); }

private:
    PAdicNumber(long long p, long long v, Int unit, int prec, bool zero)
        : p_(p), v_(v), unit_(std::move(unit)), prec_(prec), zero_(zero) {}
    static void check_prime(long long p);

    long long p_ = 0;
    long long v_ = 0;
    Int unit_ = 0;
    int prec_ = 0;
    bool zero_ = false;
};

enum class ArithOp { add, mul, inv_of_a };

// Spec-surface dispatcher over the three primitive operations.
PAdicNumber padic_arith(const PAdicNumber& a, const PAdicNumber& b, ArithOp op);

// A ball c + p^k Z_p^d. Radius p^{-k}; two balls are disjoint or nested.
struct PAdicBall {
    long long p = 0;
    std::vector<Rat> center;  // p-integral rationals
    long long level = 0;      // k; radius p^{-k}

    int dim() const { return static_cast<int>(center.size()); }
    Rat radius() const { return rat_pow(Rat(p), -level); }
    // Haar measure p^{-kd}, exact.
    Rat measure() const { return rat_pow(Rat(p), -level * dim()); }
    bool contains(const std::vector<Rat>& x) const;
    // Disjoint-or-nested comparison; returns 0 disjoint, 1 this<=other, 2 other<this (or equal -> 1).
    int relate(const PAdicBall& other) const;
};

// The set of places: optionally the infinite place plus distinct finite primes.
struct Places {
    bool has_inf = false;
    std::vector<long long> primes;  // strictly increasing

    int l() const { return static_cast<int>(primes.size()) + (has_inf ? 1 : 0); }
    void validate() const;
};

// A vector over Q_S: archimedean components exact rationals, finite-place
// components PAdicNumber vectors, all of one dimension.
struct SAdicVector {
    Places places;
    std::vector<Rat> inf_components;
    std::vector<std::vector<PAdicNumber>> finite_components;  // aligned with places.primes

    int dim() const;
    void validate() const;
};

// |x|_S = max over places of the place-wise sup norm. Exact.
Rat sadic_norm(const SAdicVector& x);

// |a|_S of a single integer across the places: max(|a|_inf if present, |a|_p).
Rat sadic_abs_int(const Int& a, const Places& S);

// Quasinorm ||a||_v = max_i |a_i|^{1/v_i}, weights positive with sum = n.
// Exact comparisons via PowerProduct; double view for reporting.
PowerProduct quasinorm_v_exact(const std::vector<Int>& a, const std::vector<Rat>& v);
double quasinorm_v(const std::vector<Int>& a, const std::vector<Rat>& v);

}  // namespace sarith
