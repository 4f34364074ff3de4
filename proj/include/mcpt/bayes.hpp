#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "mcpt/cell.hpp"
#include "mcpt/device.hpp"
#include "mcpt/rng.hpp"

namespace mcpt {

using Pmf16 = std::array<double, 16>;

// The 1+2+4+8 conditional probabilities of the four-level network. Node A is
// the most significant bit; the entry for node at `level` (0=A .. 3=D) under
// parent bits `mask` is P(bit = 1 | higher bits = mask).
struct CondProbTable {
    double a = 0.5;
    std::array<double, 2> b{0.5, 0.5};
    std::array<double, 4> c{0.5, 0.5, 0.5, 0.5};
    std::array<double, 8> d{0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5};

    static constexpr int flat_index(int level, unsigned mask) {
        return (1 << level) - 1 + static_cast<int>(mask);
    }

    double entry(int level, unsigned mask) const {
        switch (level) {
            case 0: return a;
            case 1: return b[mask];
            case 2: return c[mask];
            default: return d[mask];
        }
    }

    void set_entry(int level, unsigned mask, double value) {
        switch (level) {
            case 0: a = value; break;
            case 1: b[mask] = value; break;
            case 2: c[mask] = value; break;
            default: d[mask] = value; break;
        }
    }

    std::array<double, 15> flatten() const {
        std::array<double, 15> out{};
        for (int level = 0; level < 4; ++level)
            for (unsigned mask = 0; mask < (1u << level); ++mask)
                out[flat_index(level, mask)] = entry(level, mask);
        return out;
    }

    static CondProbTable from_flat(std::span<const double> values) {
        if (values.size() != 15) throw std::invalid_argument("CPT needs exactly 15 entries");
        CondProbTable cpt;
        for (int level = 0; level < 4; ++level)
            for (unsigned mask = 0; mask < (1u << level); ++mask)
                cpt.set_entry(level, mask, values[flat_index(level, mask)]);
        return cpt;
    }

    void validate() const {
        for (double e : flatten())
            if (!(e >= 0.0 && e <= 1.0))
                throw std::domain_error("CPT entries must lie in [0, 1]");
    }
};

inline void validate_pmf(const Pmf16& pmf, double tol = 1e-9) {
    double sum = 0.0;
    for (double p : pmf) {
        if (!(p >= 0.0)) throw std::domain_error("PMF entries must be >= 0");
        sum += p;
    }
    if (std::abs(sum - 1.0) > tol) throw std::domain_error("PMF must sum to 1");
}

// Binary-tree marginalization of a 16-bin PMF: each entry is the conditional
// mass of the upper half of its subtree. Zero-mass prefixes get 0.5 (the
// branch is unreachable; the value only keeps compilation well-posed).
inline CondProbTable build_cpt(const Pmf16& pmf) {
    validate_pmf(pmf);
    CondProbTable cpt;
    for (int level = 0; level < 4; ++level) {
        const int width = 16 >> level;  // subtree size at this level
        for (unsigned mask = 0; mask < (1u << level); ++mask) {
            const int lo = static_cast<int>(mask) * width;
            double total = 0.0, ones = 0.0;
            for (int v = lo; v < lo + width; ++v) total += pmf[v];
            for (int v = lo + width / 2; v < lo + width; ++v) ones += pmf[v];
            cpt.set_entry(level, mask, total > 0.0 ? ones / total : 0.5);
        }
    }
    return cpt;
}

// Chain-rule product along the nibble's bit path, complementing entries where
// the emitted bit is 0.
inline double joint_probability(const CondProbTable& cpt, unsigned nibble) {
    if (nibble > 15) throw std::domain_error("nibble out of range");
    double p = 1.0;
    unsigned prefix = 0;
    for (int level = 0; level < 4; ++level) {
        const unsigned bit = (nibble >> (3 - level)) & 1u;
        const double e = cpt.entry(level, prefix);
        p *= bit ? e : 1.0 - e;
        prefix = (prefix << 1) | bit;
    }
    return p;
}

inline Pmf16 pmf_from_cpt(const CondProbTable& cpt) {
    Pmf16 pmf{};
    for (unsigned v = 0; v < 16; ++v) pmf[v] = joint_probability(cpt, v);
    return pmf;
}

// The 15 voltage pairs realizing a CPT; "compiled" form of a PMF. Indexing
// matches CondProbTable::flat_index.
struct VoltageProgram {
    std::array<VoltagePair, 15> pairs;
    double t_pulse;

    const VoltagePair& pair(int level, unsigned mask) const {
        return pairs[CondProbTable::flat_index(level, mask)];
    }
};

constexpr double kDefaultClampEpsilon = 1e-4;

// Each CPT entry becomes one program_bernoulli pair. Entries are clamped to
// [clamp_eps, 1-clamp_eps] first; real write drivers cannot realize 0 or 1.
inline VoltageProgram compile(const CondProbTable& cpt, double t_pulse,
                              const DeviceParams& params,
                              double clamp_eps = kDefaultClampEpsilon) {
    cpt.validate();
    VoltageProgram program;
    program.t_pulse = t_pulse;
    const auto flat = cpt.flatten();
    for (int k = 0; k < 15; ++k) {
        const double p = std::min(std::max(flat[k], clamp_eps), 1.0 - clamp_eps);
        program.pairs[k] = program_bernoulli(p, t_pulse, params);
    }
    return program;
}

enum class Variant { bidirectional, unidirectional };

// Four chained cells driven by a VoltageProgram: each node's pair is selected
// by the already-emitted higher bits of the same nibble, and cell states
// persist across nibbles (the hardware read-feedback loop). The first
// warmup_cycles nibbles after (re)configuration are discarded to bound the
// transient of the per-cell two-state chains.
class NibbleGenerator {
public:
    NibbleGenerator(const VoltageProgram& program, const DeviceParams& params,
                    const OperatingPoint& op, Variant variant, std::uint64_t seed,
                    int warmup_cycles = 8, bool reset_per_nibble = false)
        : program_(program),
          params_(params),
          op_(op),
          variant_(variant),
          reset_per_nibble_(reset_per_nibble),
          noisy_(op.voltage_noise_sigma > 0.0),
          rng_(seed) {
        op_.validate();
        for (int k = 0; k < 15; ++k)
            realized_[k] = flip_probabilities(program_.pairs[k], params_, op_);
        for (int k = 0; k < warmup_cycles; ++k) next();
    }

    std::uint8_t next() {
        if (reset_per_nibble_) cells_ = {0, 0, 0, 0};
        unsigned prefix = 0;
        for (int level = 0; level < 4; ++level) {
            const int k = CondProbTable::flat_index(level, prefix);
            CellBit bit;
            if (noisy_) {
                bit = variant_ == Variant::bidirectional
                          ? step_bidirectional(cells_[level], program_.pairs[k], params_, op_, rng_)
                          : step_unidirectional(cells_[level], program_.pairs[k], params_, op_, rng_);
            } else {
                bit = variant_ == Variant::bidirectional
                          ? step_bidirectional_p(cells_[level], realized_[k].p01,
                                                 realized_[k].p10, rng_)
                          : step_unidirectional_p(realized_[k].p01, rng_);
            }
            cells_[level] = bit;
            prefix = (prefix << 1) | bit;
        }
        return static_cast<std::uint8_t>(prefix);
    }

    std::vector<std::uint8_t> generate(std::size_t count) {
        std::vector<std::uint8_t> out(count);
        for (auto& n : out) n = next();
        return out;
    }

private:
    VoltageProgram program_;
    DeviceParams params_;
    OperatingPoint op_;
    Variant variant_;
    bool reset_per_nibble_;
    bool noisy_;
    std::array<FlipProbabilities, 15> realized_;
    std::array<CellBit, 4> cells_{0, 0, 0, 0};
    Rng rng_;
};

inline std::vector<std::uint8_t> generate(const VoltageProgram& program,
                                          const DeviceParams& params, const OperatingPoint& op,
                                          std::size_t count, std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("count must be >= 1");
    return NibbleGenerator(program, params, op, Variant::bidirectional, seed).generate(count);
}

inline std::vector<std::uint8_t> generate_unidirectional(const VoltageProgram& program,
                                                         const DeviceParams& params,
                                                         const OperatingPoint& op,
                                                         std::size_t count, std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("count must be >= 1");
    return NibbleGenerator(program, params, op, Variant::unidirectional, seed).generate(count);
}

// ---- PMF helpers ----------------------------------------------------------

inline Pmf16 uniform_pmf() {
    Pmf16 pmf;
    pmf.fill(1.0 / 16.0);
    return pmf;
}

// Discrete Gaussian over {0..15}: truncated and renormalized.
inline Pmf16 gaussian_pmf(double mean, double variance) {
    if (variance <= 0.0) throw std::domain_error("variance must be > 0");
    Pmf16 pmf{};
    double sum = 0.0;
    for (int v = 0; v < 16; ++v) {
        pmf[v] = std::exp(-(v - mean) * (v - mean) / (2.0 * variance));
        sum += pmf[v];
    }
    for (auto& p : pmf) p /= sum;
    return pmf;
}

inline Pmf16 point_mass_pmf(unsigned value) {
    if (value > 15) throw std::domain_error("value out of range");
    Pmf16 pmf{};
    pmf[value] = 1.0;
    return pmf;
}

inline Pmf16 empirical_pmf(std::span<const std::uint8_t> nibbles) {
    if (nibbles.empty()) throw std::invalid_argument("empty nibble stream");
    Pmf16 pmf{};
    for (std::uint8_t n : nibbles) pmf[n & 0xF] += 1.0;
    for (auto& p : pmf) p /= static_cast<double>(nibbles.size());
    return pmf;
}

// Bit expansion in emission order: A (MSB) first within each nibble.
inline std::vector<std::uint8_t> nibbles_to_bits(std::span<const std::uint8_t> nibbles) {
    std::vector<std::uint8_t> bits;
    bits.reserve(nibbles.size() * 4);
    for (std::uint8_t n : nibbles)
        for (int k = 3; k >= 0; --k) bits.push_back((n >> k) & 1u);
    return bits;
}

}  // namespace mcpt
