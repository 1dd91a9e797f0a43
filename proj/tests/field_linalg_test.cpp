#include <doctest.h>

#include "emext/linalg.hpp"

using namespace emext;

namespace {

SparseMat from_rows(const Field& F, const std::vector<std::vector<long>>& rows)
{
    int r = (int)rows.size();
    int c = r ? (int)rows[0].size() : 0;
    SparseMat m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j)
            m.set(i, j, F.from_int(rows[i][j]));
    return m;
}

/* Deterministic little generator for the spot checks. */
struct Lcg {
    uint64_t s;
    explicit Lcg(uint64_t seed) : s(seed) {}
    long next(long lo, long hi)
    {
        s = s * 6364136223846793005ULL + 1442695040888963407ULL;
        return lo + (long)((s >> 33) % (uint64_t)(hi - lo + 1));
    }
};

}  // namespace

TEST_CASE("field arithmetic")
{
    Field Q = Field::rationals();
    CHECK(Q.str(Q.from_fraction(3, 6)) == "1/2");
    CHECK(Q.str(Q.from_fraction(2, -4)) == "-1/2");  // positive denominator
    CHECK(Q.str(Q.div(Q.from_int(1), Q.from_int(3))) == "1/3");

    Field F3 = Field::prime(3);
    CHECK(F3.str(F3.from_int(-3)) == "0");
    CHECK(F3.str(F3.from_int(5)) == "2");
    CHECK(F3.str(F3.inv(F3.from_int(2))) == "2");
    CHECK(F3.str(F3.from_fraction(1, 2)) == "2");
    CHECK_THROWS_AS((void)F3.from_fraction(1, 3), UsageError);
    CHECK_THROWS_AS((void)Field::prime(2), UsageError);
    CHECK_THROWS_AS((void)Field::prime(9), UsageError);
}

TEST_CASE("row_reduce identity and zero")
{
    Field Q = Field::rationals();
    auto id2 = from_rows(Q, {{1, 0}, {0, 1}});
    auto r = row_reduce(Q, id2);
    CHECK(r.rank == 2);
    CHECK(r.kernel.empty());

    auto z = from_rows(Q, {{0, 0}, {0, 0}, {0, 0}});
    r = row_reduce(Q, z);
    CHECK(r.rank == 0);
    CHECK(r.kernel.size() == 2);
}

TEST_CASE("row_reduce [[3]] over F3")
{
    Field F3 = Field::prime(3);
    auto m = from_rows(F3, {{3}});
    auto r = row_reduce(F3, m);
    CHECK(r.rank == 0);
    CHECK(r.kernel.size() == 1);
}

TEST_CASE("row_reduce kernel and image properties on random matrices")
{
    Field Q = Field::rationals();
    Lcg rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        int rows = (int)rng.next(1, 5), cols = (int)rng.next(1, 5);
        SparseMat m(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j)
                m.set(i, j, Q.from_int(rng.next(-3, 3)));
        auto r = row_reduce(Q, m);
        CHECK(r.rank + (int)r.kernel.size() == cols);
        for (const auto& k : r.kernel)
            CHECK(m.apply(Q, k).empty());
        /* image vectors are independent columns of A */
        Span sp(Q);
        for (const auto& v : r.image)
            CHECK(sp.add(v));
        for (int j = 0; j < cols; ++j)
            CHECK(sp.contains(m.col[j]));
    }
}

TEST_CASE("F_p results equal the rational computation reduced mod p")
{
    Field Q = Field::rationals();
    Field F5 = Field::prime(5);
    Lcg rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        int rows = (int)rng.next(1, 4), cols = (int)rng.next(1, 4);
        SparseMat mq(rows, cols), mp(rows, cols);
        /* unit-denominator entries chosen so no pivot denominator is
         * divisible by 5: use entries in {0, 1} off-diagonal */
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) {
                long v = rng.next(0, 1);
                mq.set(i, j, Q.from_int(v));
                mp.set(i, j, F5.from_int(v));
            }
        CHECK(row_reduce(Q, mq).rank == row_reduce(F5, mp).rank);
    }
}

TEST_CASE("solve_linear")
{
    Field Q = Field::rationals();
    auto id = from_rows(Q, {{1, 0}, {0, 1}});
    Vec b;
    b[0] = Q.from_int(4);
    b[1] = Q.from_int(-2);
    auto x = solve_linear(Q, id, b);
    REQUIRE(x.has_value());
    CHECK(*x == b);

    auto z = from_rows(Q, {{0, 0}});
    auto x0 = solve_linear(Q, z, {});
    REQUIRE(x0.has_value());
    CHECK(z.apply(Q, *x0).empty());

    auto a = from_rows(Q, {{2, 0}, {0, 0}});
    Vec b2;
    b2[0] = Q.from_int(1);
    auto x2 = solve_linear(Q, a, b2);
    REQUIRE(x2.has_value());
    CHECK(Q.str(x2->at(0)) == "1/2");

    Vec b3;
    b3[1] = Q.from_int(1);  // (0,1) not in the image
    CHECK(!solve_linear(Q, a, b3).has_value());
}

TEST_CASE("homology of small complexes")
{
    Field Q = Field::rationals();

    /* 0 -> K -> K -> 0 with the identity: both homologies vanish. */
    ChainComplex c;
    c.shift = -1;
    c.dims[0] = 1;
    c.dims[1] = 1;
    c.d[1] = from_rows(Q, {{1}});
    CHECK(homology_at(Q, c, 0).dim == 0);
    CHECK(homology_at(Q, c, 1).dim == 0);

    /* zero differential: homology = chain groups */
    ChainComplex z;
    z.shift = -1;
    z.dims[0] = 2;
    z.dims[1] = 3;
    CHECK(homology_at(Q, z, 0).dim == 2);
    CHECK(homology_at(Q, z, 1).dim == 3);

    /* not a complex */
    ChainComplex bad;
    bad.shift = -1;
    bad.dims[0] = 1;
    bad.dims[1] = 1;
    bad.dims[2] = 1;
    bad.d[1] = from_rows(Q, {{1}});
    bad.d[2] = from_rows(Q, {{1}});
    CHECK_THROWS_AS((void)homology_at(Q, bad, 1), InternalError);
}

TEST_CASE("homology independent of basis ordering")
{
    Field Q = Field::rationals();
    ChainComplex c;
    c.shift = -1;
    c.dims[0] = 2;
    c.dims[1] = 3;
    c.dims[2] = 2;
    c.d[1] = from_rows(Q, {{1, 2, 0}, {0, 1, 1}});
    c.d[2] = from_rows(Q, {{2, -2}, {-1, 1}, {1, -1}});

    ChainComplex p = c;  // permute the degree-1 basis (columns of d1, rows of d2)
    p.d[1] = from_rows(Q, {{0, 2, 1}, {1, 1, 0}});
    p.d[2] = from_rows(Q, {{1, -1}, {2, -2}, {-1, 1}});
    for (int i = 0; i <= 2; ++i)
        CHECK(homology_at(Q, c, i).dim == homology_at(Q, p, i).dim);
}

TEST_CASE("induced map injectivity")
{
    Field Q = Field::rationals();
    ChainComplex c;
    c.shift = -1;
    c.dims[0] = 1;
    c.dims[1] = 1;

    std::map<int, SparseMat> idmap;
    idmap[0] = from_rows(Q, {{1}});
    idmap[1] = from_rows(Q, {{1}});
    auto inj = induced_map_injective(Q, idmap, c, c, 0, 1);
    CHECK(inj.at(0));
    CHECK(inj.at(1));

    /* map to the zero complex from a complex with H != 0 */
    ChainComplex zero;
    zero.shift = -1;
    zero.dims[0] = 0;
    std::map<int, SparseMat> tozero;
    tozero[0] = SparseMat(0, 1);
    auto inj0 = induced_map_injective(Q, tozero, c, zero, 0, 0);
    CHECK(!inj0.at(0));

    /* non-chain-map input */
    ChainComplex two;
    two.shift = -1;
    two.dims[0] = 1;
    two.dims[1] = 1;
    two.d[1] = from_rows(Q, {{1}});
    std::map<int, SparseMat> notchain;
    notchain[0] = from_rows(Q, {{0}});
    notchain[1] = from_rows(Q, {{1}});
    CHECK_THROWS_AS((void)induced_map_injective(Q, notchain, two, two, 0, 1), UsageError);
}
