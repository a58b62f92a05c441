#include "meshfwd/netcode.hpp"

#include <bit>
#include <stdexcept>

namespace meshfwd::netcode {

namespace {

void check_k(int k, int max_k) {
    if (k < 1 || k > max_k) {
        throw std::invalid_argument("generation size out of range");
    }
}

}  // namespace

std::vector<CoefficientVector> enumerate_coefficients(int k) {
    check_k(k, 16);
    std::vector<CoefficientVector> out;
    const std::uint32_t count = (1u << k) - 1;
    out.reserve(count);
    for (std::uint32_t v = 1; v <= count; ++v) {
        out.push_back({v, k});
    }
    return out;
}

CodedPacket encode(const Generation& gen, CoefficientVector c) {
    check_k(gen.k, 16);
    if (c.width != gen.k || c.bits == 0 || c.bits >= (1u << gen.k)) {
        throw std::invalid_argument("encode: coefficient vector does not match generation");
    }
    if (gen.payloads.size() != static_cast<std::size_t>(gen.k)) {
        throw std::invalid_argument("encode: generation payload count mismatch");
    }
    const std::size_t len = gen.payloads.front().size();
    for (const auto& p : gen.payloads) {
        if (p.size() != len) {
            throw std::invalid_argument("encode: payload lengths differ");
        }
    }
    CodedPacket pkt;
    pkt.coeff = c;
    pkt.payload.assign(len, 0);
    for (int i = 0; i < gen.k; ++i) {
        if (c.bits & (1u << (gen.k - 1 - i))) {
            for (std::size_t b = 0; b < len; ++b) {
                pkt.payload[b] ^= gen.payloads[i][b];
            }
        }
    }
    return pkt;
}

std::vector<CodedPacket> encode_all(const Generation& gen) {
    std::vector<CodedPacket> out;
    for (const auto& c : enumerate_coefficients(gen.k)) {
        out.push_back(encode(gen, c));
    }
    return out;
}

int gf2_rank(std::span<const CoefficientVector> vectors) {
    std::uint32_t basis[32] = {};  // basis[b] has leading bit b
    int rank = 0;
    for (const auto& v : vectors) {
        std::uint32_t row = v.bits;
        while (row != 0) {
            const int lead = std::bit_width(row) - 1;
            if (basis[lead] == 0) {
                basis[lead] = row;
                ++rank;
                break;
            }
            row ^= basis[lead];
        }
    }
    return rank;
}

bool is_decodable(std::span<const CodedPacket> packets, int k) {
    std::vector<CoefficientVector> vs;
    vs.reserve(packets.size());
    for (const auto& p : packets) {
        vs.push_back(p.coeff);
    }
    return gf2_rank(vs) == k;
}

std::optional<std::vector<Payload>> decode(std::span<const CodedPacket> packets,
                                           int k) {
    check_k(k, 16);
    std::vector<CodedPacket> rows(packets.begin(), packets.end());
    for (const auto& r : rows) {
        if (r.payload.size() != rows.front().payload.size()) {
            throw std::invalid_argument("decode: payload lengths differ");
        }
    }

    // Gauss-Jordan over the coefficient bits, mirroring every row
    // operation on the payloads.
    std::size_t pivot_row = 0;
    for (int i = 0; i < k && pivot_row < rows.size(); ++i) {
        const std::uint32_t bit = 1u << (k - 1 - i);
        std::size_t r = pivot_row;
        while (r < rows.size() && !(rows[r].coeff.bits & bit)) ++r;
        if (r == rows.size()) continue;
        std::swap(rows[pivot_row], rows[r]);
        for (std::size_t r2 = 0; r2 < rows.size(); ++r2) {
            if (r2 != pivot_row && (rows[r2].coeff.bits & bit)) {
                rows[r2].coeff.bits ^= rows[pivot_row].coeff.bits;
                for (std::size_t b = 0; b < rows[r2].payload.size(); ++b) {
                    rows[r2].payload[b] ^= rows[pivot_row].payload[b];
                }
            }
        }
        ++pivot_row;
    }
    if (pivot_row < static_cast<std::size_t>(k)) return std::nullopt;

    std::vector<Payload> sources(k);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::uint32_t bits = rows[r].coeff.bits;
        if (std::popcount(bits) == 1) {
            const int i = k - 1 - std::countr_zero(bits);
            if (i >= 0 && i < k) sources[i] = rows[r].payload;
        }
    }
    return sources;
}

DecodeBounds decode_bounds(int k) {
    check_k(k, 8);
    const std::uint32_t n = (1u << k) - 1;  // nonzero vectors available

    if (k <= 4) {
        // Literal enumeration of every subset of the nonzero vectors.
        int min_needed = k;
        int max_deficient = 0;
        for (std::uint32_t subset = 0; subset < (1u << n); ++subset) {
            std::vector<CoefficientVector> vs;
            for (std::uint32_t i = 0; i < n; ++i) {
                if (subset & (1u << i)) vs.push_back({i + 1, k});
            }
            const int rank = gf2_rank(vs);
            const int size = static_cast<int>(vs.size());
            if (rank == k && size < min_needed) min_needed = size;
            if (rank < k && size > max_deficient) max_deficient = size;
        }
        return {min_needed, max_deficient + 1};
    }

    // A rank-deficient family spans a proper subspace and therefore lies in
    // the kernel of some nonzero functional a; the largest such family is
    // the nonzero part of a hyperplane.
    int max_deficient = 0;
    for (std::uint32_t a = 1; a <= n; ++a) {
        int count = 0;
        for (std::uint32_t v = 1; v <= n; ++v) {
            if (std::popcount(a & v) % 2 == 0) ++count;
        }
        max_deficient = std::max(max_deficient, count);
    }
    return {k, max_deficient + 1};
}

}  // namespace meshfwd::netcode
