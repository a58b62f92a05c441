#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace meshfwd::netcode {

// Coding coefficients over GF(2). Bit (width-1-i) selects source packet i,
// so for width 2 the value 0b01 selects packet 1 and 0b10 selects packet 0.
struct CoefficientVector {
    std::uint32_t bits = 0;
    int width = 0;

    bool operator==(const CoefficientVector&) const = default;
};

using Payload = std::vector<std::uint8_t>;

struct Generation {
    int k = 0;  // generation size
    std::vector<Payload> payloads;  // k payloads of equal length
};

struct CodedPacket {
    CoefficientVector coeff;
    Payload payload;
};

// All 2^k - 1 nonzero coefficient vectors in ascending integer order.
std::vector<CoefficientVector> enumerate_coefficients(int k);

// XOR of the source payloads selected by c. Payload lengths must match.
CodedPacket encode(const Generation& gen, CoefficientVector c);

// One coded packet per nonzero coefficient vector, in enumeration order.
std::vector<CodedPacket> encode_all(const Generation& gen);

// Rank of the set over GF(2), by bitwise Gaussian elimination.
int gf2_rank(std::span<const CoefficientVector> vectors);

// True when the packets' coefficient vectors reach rank k.
bool is_decodable(std::span<const CodedPacket> packets, int k);

// Recovers the k source payloads, or nullopt when the packets do not
// carry rank k.
std::optional<std::vector<Payload>> decode(std::span<const CodedPacket> packets,
                                           int k);

// How many of the 2^k - 1 distinct coded packets a receiver needs in the
// best and the worst case to decode a generation of size k.
struct DecodeBounds {
    int min_needed = 0;
    int max_needed = 0;
};

// pre: 1 <= k <= 8. For small k this enumerates every subset of the
// nonzero coefficient vectors; beyond that it enumerates the maximal
// rank-deficient families directly (every rank-deficient family lies in
// the nonzero part of some hyperplane, so scanning all 2^k - 1 hyperplanes
// is exhaustive).
DecodeBounds decode_bounds(int k);

}  // namespace meshfwd::netcode
