#pragma once

#include <gmpxx.h>

#include <string>

#include "emext/error.hpp"

namespace emext {

/* Exact field element. Rationals are kept in lowest terms with positive
 * denominator (mpq canonical form); prime-field residues are integers in
 * [0, p) with denominator 1. */
using Scalar = mpq_class;

/* Ground field: Q or F_p with p an odd prime. Characteristic 2 is rejected
 * because the tensor-flavor comparisons need 1/2 in the field. */
class Field {
  public:
    static Field rationals() { return Field(0); }
    static Field prime(long p);

    bool is_rationals() const { return p_ == 0; }
    long characteristic() const { return p_; }

    Scalar zero() const { return Scalar(0); }
    Scalar one() const { return Scalar(1); }

    Scalar from_int(long n) const { return reduce(Scalar(n)); }
    /* Fraction num/den; in F_p a denominator divisible by p is an error. */
    Scalar from_fraction(long num, long den) const;

    /* Bring a raw rational into canonical form for this field. */
    Scalar reduce(const Scalar& x) const;

    Scalar add(const Scalar& a, const Scalar& b) const { return reduce(a + b); }
    Scalar sub(const Scalar& a, const Scalar& b) const { return reduce(a - b); }
    Scalar mul(const Scalar& a, const Scalar& b) const { return reduce(a * b); }
    Scalar neg(const Scalar& a) const { return reduce(-a); }
    Scalar inv(const Scalar& a) const;
    Scalar div(const Scalar& a, const Scalar& b) const { return mul(a, inv(b)); }

    static bool is_zero(const Scalar& a) { return sgn(a) == 0; }

    /* "3/4" over Q, plain integer over F_p. */
    std::string str(const Scalar& a) const;

    std::string name() const { return p_ == 0 ? "Q" : "F" + std::to_string(p_); }

    bool operator==(const Field& o) const { return p_ == o.p_; }
    bool operator!=(const Field& o) const { return p_ != o.p_; }

  private:
    explicit Field(long p) : p_(p) {}
    long p_;  // 0 = rationals
};

bool is_prime(long p);

}  // namespace emext
