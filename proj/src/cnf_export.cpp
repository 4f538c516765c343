#include "e0a/cnf_export.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace e0a::cnf {

using gf2::Assignment;
using gf2::BoolPoly;
using gf2::Monomial;
using gf2::VarKey;

int CnfFormula::lit_of(VarKey k) const {
    auto it = var_map.find(k);
    if (it == var_map.end()) throw UnmappedVariable("variable " + gf2::key_str(k) + " not in CNF");
    return it->second;
}

namespace {

// all sign patterns of `lits` with an even number of complements, i.e. the
// clauses forbidding assignments of the wrong parity; `parity` is the value
// the XOR of the literals must take
void emit_xor_clauses(const std::vector<int>& lits, int parity,
                      std::vector<std::vector<int>>& clauses) {
    if (lits.empty()) {
        if (parity != 0) clauses.push_back({});  // 1 = 0: the empty clause
        return;
    }
    size_t n = lits.size();
    for (uint32_t pattern = 0; pattern < (1u << n); ++pattern) {
        if (__builtin_popcount(pattern) % 2 == parity) continue;  // satisfies the XOR
        // block this assignment: every clause literal is false under it
        std::vector<int> clause(n);
        for (size_t i = 0; i < n; ++i) {
            bool bit = (pattern >> i) & 1;
            clause[i] = bit ? -lits[i] : lits[i];
        }
        clauses.push_back(std::move(clause));
    }
}

}  // namespace

CnfFormula compile_polys(const std::vector<BoolPoly>& polys, const CompileOptions& opts) {
    CnfFormula f;
    f.cut_width = std::max(3, opts.cut_width);  // chaining needs room for the carry literal
    f.native_xor = opts.native_xor;

    // source variables first, ascending, so indices are reproducible
    std::vector<VarKey> universe;
    for (const auto& p : polys) {
        auto s = p.support();
        universe.insert(universe.end(), s.begin(), s.end());
    }
    std::sort(universe.begin(), universe.end());
    universe.erase(std::unique(universe.begin(), universe.end()), universe.end());
    f.mapped_vars = universe;
    int next = 1;
    for (VarKey k : universe) f.var_map[k] = next++;

    // one shared AND gate per distinct nonlinear monomial
    std::unordered_map<Monomial, int, gf2::MonomialHash> gate_of;
    auto monomial_lit = [&](const Monomial& m) -> int {
        if (m.degree() == 1) return f.var_map[m.keys()[0]];
        auto it = gate_of.find(m);
        if (it != gate_of.end()) return it->second;
        int lit = next++;
        gate_of.emplace(m, lit);
        f.and_gates.push_back({lit, m});
        // lit <-> AND(vars): (~lit v x_i) for each i, (lit v ~x_1 v ... v ~x_k)
        std::vector<int> big{lit};
        for (VarKey k : m.keys()) {
            f.clauses.push_back({-lit, f.var_map[k]});
            big.push_back(-f.var_map[k]);
        }
        f.clauses.push_back(std::move(big));
        return lit;
    };

    for (const auto& p : polys) {
        int parity = 0;  // constant term folds into the target parity
        std::vector<int> lits;
        for (const auto& m : p.monomials()) {
            if (m.is_one()) {
                parity ^= 1;
            } else {
                lits.push_back(monomial_lit(m));
            }
        }
        std::sort(lits.begin(), lits.end());
        // polynomial = 0 means XOR(lits) = parity
        if (f.native_xor) {
            if (lits.empty()) {
                if (parity != 0) f.clauses.push_back({});
                continue;
            }
            std::vector<int> line = lits;
            if (parity == 0) line[0] = -line[0];  // x-line asserts XOR = true
            f.xor_lines.push_back(std::move(line));
            continue;
        }
        // cut long XORs into chunks chained through fresh variables:
        // XOR(chunk_1) = t_1, t_1 ^ XOR(chunk_2) = t_2, ..., last = parity
        while (static_cast<int>(lits.size()) > f.cut_width) {
            std::vector<int> chunk(lits.begin(), lits.begin() + (f.cut_width - 1));
            lits.erase(lits.begin(), lits.begin() + (f.cut_width - 1));
            int t = next++;
            ++f.chain_aux_count;
            chunk.push_back(t);
            emit_xor_clauses(chunk, 0, f.clauses);  // XOR(chunk) ^ t = 0
            lits.insert(lits.begin(), t);
        }
        emit_xor_clauses(lits, parity, f.clauses);
    }
    f.num_vars = next - 1;
    return f;
}

CnfFormula compile(const attack::AttackInstance& inst, const CompileOptions& opts) {
    return compile_polys(inst.generators(), opts);
}

CnfFormula inject_guess(const CnfFormula& base, const Assignment& guess) {
    CnfFormula out = base;
    for (auto [key, value] : guess.sorted()) {
        int lit = out.lit_of(key);
        out.clauses.push_back({value ? lit : -lit});
    }
    return out;
}

void write_dimacs(const CnfFormula& f, std::ostream& os) {
    os << "p cnf " << f.num_vars << " " << (f.clauses.size() + f.xor_lines.size()) << "\n";
    for (const auto& cl : f.clauses) {
        for (int lit : cl) os << lit << " ";
        os << "0\n";
    }
    for (const auto& xl : f.xor_lines) {
        os << "x";
        for (size_t i = 0; i < xl.size(); ++i) os << (i ? " " : "") << xl[i];
        os << " 0\n";
    }
}

void write_dimacs_file(const CnfFormula& f, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw Error("cannot write " + path);
    write_dimacs(f, os);
    if (!os) throw Error("write failed: " + path);
}

void write_var_map(const CnfFormula& f, std::ostream& os) {
    for (VarKey k : f.mapped_vars) os << f.var_map.at(k) << " " << gf2::key_str(k) << "\n";
}

void write_var_map_file(const CnfFormula& f, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw Error("cannot write " + path);
    write_var_map(f, os);
    if (!os) throw Error("write failed: " + path);
}

ParsedDimacs parse_dimacs(std::istream& is) {
    ParsedDimacs out;
    std::string line;
    int expected_clauses = -1;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == 'c') continue;
        std::istringstream ls(line);
        if (line[0] == 'p') {
            std::string p, fmt;
            ls >> p >> fmt >> out.num_vars >> expected_clauses;
            if (fmt != "cnf") throw ParseError("not a cnf DIMACS file");
            continue;
        }
        bool is_xor = false;
        if (line[0] == 'x') {
            is_xor = true;
            ls.ignore(1);
        }
        std::vector<int> clause;
        int lit;
        while (ls >> lit) {
            if (lit == 0) break;
            clause.push_back(lit);
        }
        (is_xor ? out.xor_lines : out.clauses).push_back(std::move(clause));
    }
    if (expected_clauses >= 0 &&
        out.clauses.size() + out.xor_lines.size() != static_cast<size_t>(expected_clauses)) {
        throw ParseError("DIMACS clause count mismatch");
    }
    return out;
}

}  // namespace e0a::cnf
