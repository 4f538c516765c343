#ifndef E0A_E0_HPP
#define E0A_E0_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "e0a/difference_system.hpp"

// The Bluetooth combiner E0 in two independent implementations: a bitwise
// integer/shift-register oracle and the algebraic difference system.  The
// canonical bit-numbering convention here is the one of the difference
// equations: x(t) is the cell that exits its register at clock t, and the
// register taps are chosen to satisfy
//   x(25) = x(0)+x(5)+x(13)+x(17)      y(31) = y(0)+y(7)+y(15)+y(19)
//   z(33) = z(0)+z(5)+z(9)+z(29)       u(39) = u(0)+u(3)+u(11)+u(35)
// Bluetooth's published sample data uses the mirrored register convention;
// bluetooth_convention_adapter() converts such states into this layout.

namespace e0a::e0 {

constexpr int kLenX = 25, kLenY = 31, kLenZ = 33, kLenU = 39;
constexpr int kStateBits = 132;

// bit i of each register holds the cell value x(t+i); fsm bit layout:
// bit0 = c(t), bit1 = c(t+1), bit2 = d(t), bit3 = d(t+1)
struct CipherState {
    uint32_t x = 0;
    uint32_t y = 0;
    uint64_t z = 0;
    uint64_t u = 0;
    uint8_t fsm = 0;

    bool operator==(const CipherState& o) const {
        return x == o.x && y == o.y && z == o.z && u == o.u && fsm == o.fsm;
    }
    bool operator!=(const CipherState& o) const { return !(*this == o); }
};

struct Keystream {
    std::vector<uint8_t> bits;
    uint64_t start_clock = 0;
};

enum class Route { Oracle, Algebraic };

// one clock of the bitwise machine: keystream bit k(t) of the current state
// plus the successor state
std::pair<CipherState, int> oracle_step(const CipherState& s);

// n keystream bits from state s, by either implementation
Keystream keystream(const CipherState& s, size_t n, Route route);

// state advanced t clocks (bitwise route)
CipherState advance(const CipherState& s, uint64_t t);

// the explicit difference system, six equations with windows (25,31,33,39,2,2)
const dsys::DiffSystem& e0_system();
// its inverse: reversed register taps plus the h0/h1 combiner feedbacks
const dsys::DiffSystem& e0_inverse_system();

// layout bijection with the difference system's state vector:
// x(0..24) | y(0..30) | z(0..32) | u(0..38) | c(0),c(1) | d(0),d(1)
dsys::SystemState to_system_state(const CipherState& s);
CipherState from_system_state(const dsys::SystemState& v);

// undo t clocks through the inverse system
CipherState rewind(const CipherState& s, uint64_t t);

// 33 lowercase hex digits, streams concatenated x|y|z|u|fsm, least-index bit
// in the low bit of each digit
std::string to_hex(const CipherState& s);
CipherState from_hex(const std::string& hex);

// mirrored-register ("specification order") states: reverses every LFSR
// window and reads the FSM word as (c(0), d(0), c(1), d(1))
CipherState bluetooth_convention_adapter(const CipherState& s);

// packed keystream file image: magic 0xE0 0x4B, u16 start clock, u32 bit
// count (both little endian), then bits packed LSB-first
std::vector<uint8_t> pack_keystream(const Keystream& ks);
Keystream unpack_keystream(const std::vector<uint8_t>& bytes);

// keystream bits as an ASCII 0/1 string
std::string bits_string(const Keystream& ks);

CipherState state_from_bits(const std::vector<uint8_t>& bits);  // 132 entries
std::vector<uint8_t> state_bits(const CipherState& s);

}  // namespace e0a::e0

#endif
