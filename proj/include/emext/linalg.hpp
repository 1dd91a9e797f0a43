#pragma once

#include <map>
#include <optional>
#include <vector>

#include "emext/field.hpp"

namespace emext {

/* Sparse vector: index -> nonzero entry. */
using Vec = std::map<int, Scalar>;

void vec_add_scaled(const Field& F, Vec& a, const Scalar& c, const Vec& b);  // a += c*b
Vec vec_scale(const Field& F, const Scalar& c, const Vec& a);
bool vec_is_zero(const Vec& a);

/* Column-major sparse matrix (triplets grouped per column). */
struct SparseMat {
    int rows = 0;
    int cols = 0;
    std::vector<Vec> col;

    SparseMat() = default;
    SparseMat(int r, int c) : rows(r), cols(c), col(c) {}

    void set(int r, int c, const Scalar& v)
    {
        if (!Field::is_zero(v))
            col[c][r] = v;
    }
    void add(const Field& F, int r, int c, const Scalar& v);
    Vec apply(const Field& F, const Vec& x) const;  // A*x
    static SparseMat identity(int n);
};

/* Incremental echelon span of sparse vectors; pivot = smallest index.
 * Deterministic: vectors normalized so the pivot entry is 1. */
class Span {
  public:
    explicit Span(const Field& F) : F_(&F) {}

    /* Reduce v against the span; the residue has no entry at any pivot. */
    Vec reduce(Vec v) const;
    /* Add v; returns true if it increased the rank. */
    bool add(Vec v);
    bool contains(const Vec& v) const { return vec_is_zero(reduce(v)); }
    int rank() const { return (int)ech_.size(); }

    /* Reduce v, also returning the coefficients used on the stored basis. */
    Vec reduce_with_coeffs(Vec v, Vec& coeffs) const;

  private:
    const Field* F_;
    std::vector<std::pair<int, Vec>> ech_;  // (pivot, vector), pivot entries = 1
};

struct RowReduceResult {
    int rank = 0;
    std::vector<Vec> kernel;  // basis of {x : Ax = 0}
    std::vector<Vec> image;   // independent columns of A spanning im(A)
};

RowReduceResult row_reduce(const Field& F, const SparseMat& A);

/* Any particular solution of Ax = b, or nullopt when b is not in im(A). */
std::optional<Vec> solve_linear(const Field& F, const SparseMat& A, const Vec& b);

/* Chain complex with per-degree bases; d[n] : C_n -> C_{n+shift}. */
struct ChainComplex {
    int shift = -1;  // -1 homological, +1 cohomological
    std::map<int, int> dims;
    std::map<int, SparseMat> d;

    int dim(int n) const
    {
        auto it = dims.find(n);
        return it == dims.end() ? 0 : it->second;
    }
    const SparseMat* block(int n) const
    {
        auto it = d.find(n);
        return it == d.end() ? nullptr : &it->second;
    }
};

struct HomologyResult {
    int dim = 0;
    std::vector<Vec> reps;  // kernel vectors spanning a complement of the image
};

/* Homology at degree n. Throws InternalError("not a complex at degree ...")
 * when the two adjacent blocks fail to compose to zero. */
HomologyResult homology_at(const Field& F, const ChainComplex& C, int n);

/* Per-degree injectivity of H(f) for a chain map f (degree 0, blocks per
 * degree). Checks the chain-map property on the given degrees. */
std::map<int, bool> induced_map_injective(const Field& F, const std::map<int, SparseMat>& f, const ChainComplex& src,
                                          const ChainComplex& tgt, int lo, int hi);

}  // namespace emext
