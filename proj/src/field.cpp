#include "emext/field.hpp"

namespace emext {

bool is_prime(long p)
{
    if (p < 2)
        return false;
    for (long q = 2; q * q <= p; ++q)
        if (p % q == 0)
            return false;
    return true;
}

Field Field::prime(long p)
{
    if (!is_prime(p))
        throw UsageError("field modulus " + std::to_string(p) + " is not prime");
    if (p == 2)
        throw UsageError("characteristic 2 is not supported (the theory needs 1/2)");
    return Field(p);
}

Scalar Field::reduce(const Scalar& x) const
{
    if (p_ == 0) {
        Scalar y = x;
        y.canonicalize();
        return y;
    }
    /* num/den mod p: den must be invertible. */
    mpz_class num = x.get_num(), den = x.get_den();
    mpz_class p(p_);
    mpz_class dm = den % p;
    if (dm < 0)
        dm += p;
    if (dm == 0)
        throw UsageError("denominator divisible by the field characteristic " + std::to_string(p_));
    mpz_class dinv;
    mpz_invert(dinv.get_mpz_t(), dm.get_mpz_t(), p.get_mpz_t());
    mpz_class r = (num % p) * dinv % p;
    if (r < 0)
        r += p;
    return Scalar(r);
}

Scalar Field::from_fraction(long num, long den) const
{
    if (den == 0)
        throw UsageError("zero denominator");
    Scalar x(num, den);
    return reduce(x);
}

Scalar Field::inv(const Scalar& a) const
{
    if (is_zero(a))
        throw ComputeError("division by zero");
    if (p_ == 0) {
        Scalar y = 1 / a;
        y.canonicalize();
        return y;
    }
    mpz_class v = a.get_num();  // already in [0,p)
    mpz_class p(p_), r;
    mpz_invert(r.get_mpz_t(), v.get_mpz_t(), p.get_mpz_t());
    if (r < 0)
        r += p;
    return Scalar(r);
}

std::string Field::str(const Scalar& a) const
{
    if (p_ != 0)
        return a.get_num().get_str();
    if (a.get_den() == 1)
        return a.get_num().get_str();
    return a.get_num().get_str() + "/" + a.get_den().get_str();
}

}  // namespace emext
