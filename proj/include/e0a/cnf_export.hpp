#ifndef E0A_CNF_EXPORT_HPP
#define E0A_CNF_EXPORT_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "e0a/attack.hpp"
#include "e0a/gf2_poly.hpp"

// ANF-to-CNF compilation: every nonlinear monomial gets one shared AND-gate
// auxiliary, every polynomial becomes an XOR constraint cut into clauses
// through chain auxiliaries.  The compilation runs once per instance; guesses
// enter later as unit clauses.

namespace e0a::cnf {

struct CnfFormula {
    int num_vars = 0;
    std::vector<std::vector<int>> clauses;
    std::unordered_map<gf2::VarKey, int> var_map;  // source variable -> DIMACS index
    std::vector<gf2::VarKey> mapped_vars;          // ascending, index i maps to i+1

    struct AndGate {
        int lit;            // auxiliary variable
        gf2::Monomial mono; // the defining monomial (degree >= 2)
    };
    std::vector<AndGate> and_gates;
    int chain_aux_count = 0;
    int cut_width = 4;
    bool native_xor = false;                   // emit x-lines instead of XOR clauses
    std::vector<std::vector<int>> xor_lines;   // used by the native dialect

    int lit_of(gf2::VarKey k) const;  // throws UnmappedVariable
};

struct CompileOptions {
    int cut_width = 4;        // max literals per emitted XOR chunk
    bool native_xor = false;  // cryptominisat-style `x<lits> 0` lines
};

CnfFormula compile(const attack::AttackInstance& inst, const CompileOptions& opts = {});
CnfFormula compile_polys(const std::vector<gf2::BoolPoly>& polys, const CompileOptions& opts = {});

// appends one unit clause per assigned variable; the base formula is reused
// across a campaign unchanged
CnfFormula inject_guess(const CnfFormula& base, const gf2::Assignment& guess);

void write_dimacs(const CnfFormula& f, std::ostream& os);
void write_dimacs_file(const CnfFormula& f, const std::string& path);
// sidecar map: `<dimacs-index> <variable>` per line, source variables only
void write_var_map(const CnfFormula& f, std::ostream& os);
void write_var_map_file(const CnfFormula& f, const std::string& path);

// parse-back of an emitted DIMACS file (round-trip checks and the test
// oracle); understands the native-xor dialect
struct ParsedDimacs {
    int num_vars = 0;
    std::vector<std::vector<int>> clauses;
    std::vector<std::vector<int>> xor_lines;
};
ParsedDimacs parse_dimacs(std::istream& is);

}  // namespace e0a::cnf

#endif
