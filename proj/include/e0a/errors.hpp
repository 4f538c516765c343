#ifndef E0A_ERRORS_HPP
#define E0A_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace e0a {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// evaluate() hit a variable without a value
struct UnassignedVariable : Error {
    explicit UnassignedVariable(const std::string& var)
        : Error("unassigned variable: " + var) {}
};

// anf_from_truth_table() got a table whose size is not 2^n
struct IncompleteTable : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

// Buchberger ran past its pair/reduction cap; the instance is outside desk
// scale, never silently wrong.
struct BudgetExceeded : Error {
    using Error::Error;
};

struct TooManySolutions : Error {
    using Error::Error;
};

struct InsufficientKeystream : Error {
    using Error::Error;
};

// CNF guess injection referenced a variable absent from the formula's map
struct UnmappedVariable : Error {
    using Error::Error;
};

}  // namespace e0a

#endif
