#pragma once

#include <cstdint>
#include <stdexcept>

#include "mcpt/device.hpp"
#include "mcpt/rng.hpp"

namespace mcpt {

// One voltage pair of the write driver: v_set drives P->AP (logic 1),
// v_reset drives AP->P (logic 0), both applied for t_pulse.
struct VoltagePair {
    double v_set;
    double v_reset;
    double t_pulse;

    void validate() const {
        if (v_set <= 0 || v_reset <= 0 || t_pulse <= 0)
            throw std::domain_error("voltage pair entries must be positive");
    }
};

// Cell state: 0 = parallel (low resistance), 1 = antiparallel (high resistance).
using CellBit = std::uint8_t;

// Switching probabilities of a pair under an operating point:
// p01 = P(0 -> 1 flip), p10 = P(1 -> 0 flip).
struct FlipProbabilities {
    double p01;
    double p10;
};

inline FlipProbabilities flip_probabilities(const VoltagePair& pair,
                                            const DeviceParams& params,
                                            const OperatingPoint& op) {
    const double i_set = voltage_to_current(pair.v_set, SwitchDirection::p_to_ap, params, op);
    const double i_reset = voltage_to_current(pair.v_reset, SwitchDirection::ap_to_p, params, op);
    return FlipProbabilities{switch_probability(i_set, pair.t_pulse, params, op),
                             switch_probability(i_reset, pair.t_pulse, params, op)};
}

// Compiles a Bernoulli(p) cell: the set voltage realizes P(P->AP) = p and the
// reset voltage realizes P(AP->P) = 1-p, so that with the complement-feedback
// write the next bit is 1 with probability p regardless of the previous bit.
inline VoltagePair program_bernoulli(double p, double t_pulse, const DeviceParams& params) {
    const double i_set = calibrate_current(p, t_pulse, params);
    const double i_reset = calibrate_current(1.0 - p, t_pulse, params);
    return VoltagePair{i_set * params.r_p, i_reset * params.r_ap(), t_pulse};
}

// Probability-level steps. The device-level overloads below reduce to these.
inline CellBit step_bidirectional_p(CellBit state, double p01, double p10, Rng& rng) {
    if (state == 0) return rng.bernoulli(p01) ? 1 : 0;
    return rng.bernoulli(p10) ? 0 : 1;
}

inline CellBit step_unidirectional_p(double p01, Rng& rng) {
    return rng.bernoulli(p01) ? 1 : 0;  // deterministic reset to 0, then set
}

namespace detail {
// Per-pulse supply noise: each write sees voltage_scale * (1 + sigma*z).
inline OperatingPoint noisy_op(const OperatingPoint& op, Rng& rng) {
    OperatingPoint n = op;
    n.voltage_scale = op.voltage_scale * (1.0 + op.voltage_noise_sigma * rng.normal());
    n.voltage_noise_sigma = 0.0;
    return n;
}
}  // namespace detail

// Read -> feedback-complement -> probabilistic write cycle: the complement of
// the current bit is written with the pair's stochastic probability for that
// switching direction.
inline CellBit step_bidirectional(CellBit state, const VoltagePair& pair,
                                  const DeviceParams& params, const OperatingPoint& op,
                                  Rng& rng) {
    const OperatingPoint eff = op.voltage_noise_sigma > 0 ? detail::noisy_op(op, rng) : op;
    const FlipProbabilities fp = flip_probabilities(pair, params, eff);
    return step_bidirectional_p(state, fp.p01, fp.p10, rng);
}

// Baseline variant: deterministic reset to 0 followed by a stochastic set, so
// the output is 1 with exactly the set probability, independent of history.
inline CellBit step_unidirectional(CellBit /*state*/, const VoltagePair& pair,
                                   const DeviceParams& params, const OperatingPoint& op,
                                   Rng& rng) {
    const OperatingPoint eff = op.voltage_noise_sigma > 0 ? detail::noisy_op(op, rng) : op;
    const double i_set = voltage_to_current(pair.v_set, SwitchDirection::p_to_ap, params, eff);
    return step_unidirectional_p(switch_probability(i_set, pair.t_pulse, params, eff), rng);
}

// Stationary P(bit = 1) of the two-state chain. Invariant under common
// multiplicative scaling of (p01, p10) -- the bidirectional PVT-tolerance
// mechanism.
inline double stationary_probability(double p01, double p10) {
    if (p01 + p10 <= 0.0)
        throw std::domain_error("degenerate chain: p01 + p10 must be > 0");
    return p01 / (p01 + p10);
}

inline double stationary_probability(const VoltagePair& pair, const DeviceParams& params,
                                     const OperatingPoint& op) {
    const FlipProbabilities fp = flip_probabilities(pair, params, op);
    return stationary_probability(fp.p01, fp.p10);
}

}  // namespace mcpt
