#pragma once

#include "sarith/padic.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace sarith {

// Multiindex beta = (i_1, ..., i_d) of nonnegative integers.
struct MultiIndex {
    std::vector<int> idx;

    int order() const {
        int s = 0;
        for (int i : idx) s += i;
        return s;
    }
    Int factorial() const;  // beta! = prod i_j!
    bool operator<(const MultiIndex& o) const { return idx < o.idx; }
    bool operator==(const MultiIndex& o) const { return idx == o.idx; }
};

Int factorial(int n);
Int binomial(const Int& n, int k);
// k! / (i_1! ... i_d!) for |beta| = k.
Int multinomial(int k, const MultiIndex& beta);

// Multivariate polynomial with exact rational coefficients.
class Poly {
public:
    Poly() : nvars_(0) {}
    explicit Poly(int nvars) : nvars_(nvars) {}
    static Poly constant(int nvars, const Rat& c);
    static Poly variable(int nvars, int i);

    int nvars() const { return nvars_; }
    int degree() const;
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    Rat constant_term() const;
    const std::map<std::vector<int>, Rat>& terms() const { return terms_; }

    void set_coeff(const std::vector<int>& mono, const Rat& c);
    Rat coeff(const std::vector<int>& mono) const;

    Rat eval(std::span<const Rat> x) const;
    PAdicNumber eval_padic(const std::vector<PAdicNumber>& x) const;

    Poly partial(int var) const;
    Poly partial_multi(const MultiIndex& beta) const;

    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator*(const Poly& o) const;
    Poly scaled(const Rat& c) const;

    // Substitute x_i = a_i + s * z_i; returns polynomial in z.
    Poly compose_affine(std::span<const Rat> a, const Rat& s) const;
    // Substitute x = A z for a square rational matrix A (column-major action).
    Poly compose_linear(const std::vector<std::vector<Rat>>& A) const;
    // View a polynomial in fewer variables inside a larger variable set,
    // mapping variable i to slot[i].
    Poly embed(int nvars, std::span<const int> slot) const;

    std::string to_string() const;

private:
    int nvars_;
    std::map<std::vector<int>, Rat> terms_;  // monomial exponents -> coefficient
    void add_term(const std::vector<int>& mono, const Rat& c);
};

// Complete homogeneous symmetric polynomial h_d evaluated at given values.
Rat complete_homogeneous(int d, std::span<const Rat> xs);

// Numeric difference quotient Phi_beta f evaluated at explicit point groups
// (group g supplies i_g + 1 pairwise-distinct values). Pure recursion per the
// defining formula; throws domain_error on coincident points.
Rat difference_quotient(const Poly& f, const MultiIndex& beta,
                        const std::vector<std::vector<Rat>>& groups);

// Continuous extension Phi-bar_beta evaluated at point groups that may
// contain repeats (in particular the diagonal). Exact, via the expansion of
// divided differences of monomials into complete homogeneous symmetric
// polynomials.
Rat phi_bar(const Poly& f, const MultiIndex& beta, const std::vector<std::vector<Rat>>& groups);

// D_beta f(a) = Phi-bar_beta at the diagonal; beta! * D_beta f = partial_beta f.
Rat dn_at_point(const Poly& f, const MultiIndex& beta, std::span<const Rat> a);
// One-variable convenience: D_j f(a).
Rat dn_at_point(const Poly& f, int j, const Rat& a);

}  // namespace sarith
