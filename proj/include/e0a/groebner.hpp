#ifndef E0A_GROEBNER_HPP
#define E0A_GROEBNER_HPP

#include <cstdint>
#include <vector>

#include "e0a/gf2_poly.hpp"

// Buchberger engine in the quotient ring modulo the field equations.  The
// field equations are never materialized: monomials are squarefree and the
// required extra S-polynomials (an element multiplied by a variable of its
// leading monomial) are scheduled alongside the classical pairs.

namespace e0a::gb {

struct IdealBasis {
    std::vector<gf2::BoolPoly> gens;
    gf2::MonomialOrder order;
};

struct EarlyExit {
    // return as soon as a nonzero constant enters the basis
    bool stop_on_unit = false;
    // return once every universe variable heads a linear basis element and
    // the candidate point checks out against the input generators
    bool stop_on_all_vars_linear = false;
};

struct Budget {
    uint64_t max_pair_reductions = 1'000'000;  // queue items processed
    uint64_t max_reduction_steps = 2'000'000'000;
};

enum class GbStatus { Inconsistent, Solved, Finished };

struct GroebnerResult {
    std::vector<gf2::BoolPoly> basis;  // reduced GB, ascending leading monomials
    gf2::MonomialOrder order;
    GbStatus status = GbStatus::Finished;
    int degree = 0;            // max total degree of basis elements; {1} has degree 0
    uint64_t dimension = 0;    // number of standard monomials = number of GF(2) points
    bool dimension_exact = true;
    uint64_t pair_reductions = 0;
    uint64_t reduction_steps = 0;
    uint64_t basis_elements = 0;  // total elements ever inserted
    bool early_exit_taken = false;
};

// throws BudgetExceeded when the caps are hit
GroebnerResult buchberger(const IdealBasis& ideal, const EarlyExit& exits = {},
                          const Budget& budget = {});

uint64_t count_solutions(const GroebnerResult& res);

// all GF(2) points of the variety, each assigning every universe variable;
// throws TooManySolutions if dimension > limit
std::vector<gf2::Assignment> enumerate_solutions(const GroebnerResult& res, uint64_t limit);

}  // namespace e0a::gb

#endif
