#pragma once

#include "emext/resolution.hpp"

namespace emext {

/* A-linear map P -> A of natural degree p, determined by its values on the
 * semibasis: f(m) in A_{deg(m)+p}. */
struct HomElement {
    int p = 0;
    std::map<int, Poly> values;  // item -> value (absent = zero)
};

/* Truncated Hom_A(P, A) as a chain complex graded by the natural degree p;
 * coordinates are pairs (semibasis item, base monomial). The differential is
 * D(f) = d o f - (-1)^p f o delta; D^2 = 0 is asserted at build time. */
struct HomComplex {
    std::shared_ptr<const AcyclicClosure> closure;
    int p_lo = 0, p_hi = 0;
    ChainComplex cx;  // degree = natural p, shift = base diff shift
    std::map<int, std::vector<std::pair<int, Key>>> basis;
    std::map<int, std::map<std::pair<int, Key>, int>> index;
};

HomComplex build_hom_complex(std::shared_ptr<const AcyclicClosure> closure, int p_lo, int p_hi);

Vec hom_to_vec(const HomComplex& H, const HomElement& f);
HomElement hom_from_vec(const HomComplex& H, int p, const Vec& v);
/* D(f) as an element of natural degree p + shift. */
HomElement hom_apply_D(const HomComplex& H, const HomElement& f);
bool hom_is_cocycle(const HomComplex& H, const HomElement& f);

enum class Stability { exact, stable, unstable };
std::string stability_str(Stability s);

/* Report degrees follow A^{-q} = A_q: Sullivan r = p, Adams-Hilton r = -p. */
int report_degree(Flavor flavor, int natural_p);
int natural_degree(Flavor flavor, int report_r);

struct ExtAlgebra {
    std::shared_ptr<const DgaPresentation> pres;
    int lo = 0, hi = 0;       // report-degree window
    int margin = 0;           // commutative truncation margin (0 for tensor)
    int weight_bound = -1;

    std::shared_ptr<const AcyclicClosure> closure;
    std::shared_ptr<const HomComplex> hom;

    std::map<int, int> dims;                        // report degree -> dimension
    std::map<int, Stability> stability;
    std::map<int, std::vector<HomElement>> reps;    // report degree -> representatives

    /* Base homology on [0, base_top]: largest nonzero degree and whether it
     * vanishes at the top of the examined range. */
    int base_top = 0;
    int base_h_maxdeg = -1;
    bool base_h_finite = false;

    int total_dim() const;
};

/* Dims and representative cocycles per report degree in [lo, hi]. Tensor
 * flavor is exact; commutative flavor runs at margin and margin+2 and flags
 * each degree stable or unstable. margin < 0 selects the default
 * (max generator degree + 1). */
ExtAlgebra ext_groups(std::shared_ptr<const DgaPresentation> pres, int lo, int hi, int margin = -1);

/* Class coordinates of a cocycle over the stored representatives of its
 * report degree; nullopt when f is not a cocycle or its degree is outside
 * the window. */
std::optional<Vec> class_coords(const ExtAlgebra& E, const HomElement& f);

struct EvClass {
    int report_degree = 0;
    int index = 0;
    Vec h_coords;  // coordinates over the base homology representatives
    bool nonzero = false;
};

struct EvInfo {
    std::vector<EvClass> classes;
    bool nonzero = false;  // the evaluation map is nonzero on some class
};

/* f -> [f(1)] in H(base). */
EvInfo evaluation_map(const ExtAlgebra& E);
/* Class of a single value f(1) (empty Vec when the class vanishes). */
Vec base_h_coords(const ExtAlgebra& E, const Poly& value, int degree);

enum class Verdict { yes, no, unknown };
std::string verdict_str(Verdict v);

struct GorensteinResult {
    Verdict verdict = Verdict::unknown;
    std::string reason;
};

/* dim Ext = 1. "yes" needs the window to cover [-fd_bound, fd_bound] and
 * every degree exact/stable; >= 2 classes give "no". */
GorensteinResult gorenstein_test(const ExtAlgebra& E, int fd_bound);

struct FormalDimension {
    bool found = false;          // false: no nonzero degree in the window
    int value = 0;
    bool exact = false;          // vanishing above + finite base homology
    std::string note;
};

FormalDimension formal_dimension(const ExtAlgebra& E);

/* Comparison data for the n-fold product mu_A,n = mu o (f1 (x) ... (x) fn) o
 * alpha_n (commutative flavor). */
struct PowerBundle {
    int n = 2;
    std::shared_ptr<const AcyclicClosure> Qn;
    ComparisonLift alpha;
};

PowerBundle make_power_bundle(const ExtAlgebra& E, int n);

HomElement hom_product_n(const ExtAlgebra& E, const PowerBundle& B, const std::vector<HomElement>& fs);
HomElement hom_product(const ExtAlgebra& E, const PowerBundle& B, const HomElement& f, const HomElement& g);

/* The candidate unit: the A-linear extension of the augmentation of
 * Lambda(sV), item 1 -> 1. Not always a cocycle; reported as computed. */
struct UnitInfo {
    bool is_cocycle = false;
    bool in_window = false;
    Vec coords;  // class coordinates at report degree 0 when a cocycle
    bool nonzero_class = false;
};

UnitInfo unit_class(const ExtAlgebra& E);

struct ProductEntry {
    int deg_f = 0, idx_f = 0;
    int deg_g = 0, idx_g = 0;
    int deg_fg = 0;
    Vec coords;  // class coordinates of [f][g]
};

struct ExtTable {
    ExtAlgebra ext;
    std::vector<ProductEntry> products;  // commutative flavor only
    EvInfo ev;
    UnitInfo unit;
    bool ev_is_morphism = true;  // checked on all stored pairs
};

/* Full table: products on the chosen class basis plus evaluation images;
 * asserts ev(f.g) = ev(f) ev(g). Tensor flavor: dims/reps/ev only. */
ExtTable ext_algebra_table(std::shared_ptr<const DgaPresentation> pres, int lo, int hi, int margin = -1);

}  // namespace emext
