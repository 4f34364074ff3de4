#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "mcpt/rng.hpp"

namespace mcpt {

// Raised when a requested switching probability cannot be realized by any
// sub-critical write current at the given pulse width.
class CalibrationError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Multiplicative process factors (free-layer thickness, tunnel-barrier
// thickness, TMR ratio), each nominally 1.0.
struct ProcessSample {
    double f_tfl = 1.0;
    double f_ttb = 1.0;
    double f_tmr = 1.0;
};

// PVT condition a device operation is evaluated under. voltage_noise_sigma
// adds an i.i.d. fractional perturbation to every individual write pulse on
// top of the static voltage_scale.
struct OperatingPoint {
    double temperature = 300.0;
    double voltage_scale = 1.0;
    ProcessSample process;
    double voltage_noise_sigma = 0.0;

    void validate() const {
        if (temperature <= 0.0) throw std::domain_error("temperature must be > 0");
        if (voltage_scale <= 0.0) throw std::domain_error("voltage_scale must be > 0");
        if (process.f_tfl <= 0.0 || process.f_ttb <= 0.0 || process.f_tmr <= 0.0)
            throw std::domain_error("process factors must be > 0");
        if (voltage_noise_sigma < 0.0) throw std::domain_error("voltage_noise_sigma must be >= 0");
    }
};

// STT-MTJ compact-model constants. Thermally activated switching:
//
//   tau(I) = tau0 * exp(delta * (1 - I/Ic0)^2),  P(I, t) = 1 - exp(-t/tau)
//
// Defaults are representative magnitudes chosen so that the full calibration
// range [1e-6, 1-1e-6] is realizable inside the 5 ns write window.
struct DeviceParams {
    double tau0 = 0.3e-9;    // attempt time [s]
    double delta0 = 18.0;    // thermal stability factor at t_ref
    double ic0 = 100e-6;     // critical switching current at 0 K [A]
    double r_p = 1000.0;     // parallel-state resistance [ohm]
    double tmr = 2.0;        // tunnel magnetoresistance ratio (2.0 = 200 %)
    double t_fl = 1.3e-9;    // free-layer thickness [m]
    double t_tb = 0.85e-9;   // tunnel-barrier thickness [m]
    double cd = 32e-9;       // critical diameter [m]
    double t_ref = 300.0;    // reference temperature [K]
    double kappa = 10.0;     // barrier-thickness resistance sensitivity

    double r_ap() const { return r_p * (1.0 + tmr); }

    void validate() const {
        if (tau0 <= 0 || delta0 <= 0 || ic0 <= 0 || r_p <= 0 || t_fl <= 0 ||
            t_tb <= 0 || cd <= 0 || t_ref <= 0)
            throw std::domain_error("device parameters must be positive");
        if (tmr < 0) throw std::domain_error("tmr must be >= 0");
    }
};

enum class SwitchDirection {
    p_to_ap,  // set, writes logic 1; pre-switch resistance r_p
    ap_to_p,  // reset, writes logic 0; pre-switch resistance r_ap
};

struct SwitchOutcome {
    bool switched;
    double probability_used;
};

// First-order PVT mapping. Temperature enters through the stability factor
// (an energy barrier over kT), process factors through their dominant
// physical channel: t_FL scales both barrier and critical current, t_TB
// scales resistance exponentially, TMR scales the AP/P resistance contrast.
inline DeviceParams effective_params(const DeviceParams& params, const OperatingPoint& op) {
    DeviceParams eff = params;
    eff.delta0 = params.delta0 * (params.t_ref / op.temperature) * op.process.f_tfl;
    eff.ic0 = params.ic0 * op.process.f_tfl;
    eff.r_p = params.r_p * std::exp(params.kappa * (op.process.f_ttb - 1.0));
    eff.tmr = params.tmr * op.process.f_tmr;
    return eff;
}

inline double mean_switch_time(double i_write, const DeviceParams& params,
                               const OperatingPoint& op) {
    if (i_write <= 0.0) throw std::domain_error("write current must be > 0");
    const DeviceParams eff = effective_params(params, op);
    const double r = 1.0 - i_write / eff.ic0;
    return eff.tau0 * std::exp(eff.delta0 * r * r);
}

inline double switch_probability(double i_write, double t_pulse,
                                 const DeviceParams& params, const OperatingPoint& op) {
    if (t_pulse < 0.0) throw std::domain_error("pulse width must be >= 0");
    if (t_pulse == 0.0) return 0.0;
    return -std::expm1(-t_pulse / mean_switch_time(i_write, params, op));
}

inline double voltage_to_current(double v_write, SwitchDirection direction,
                                 const DeviceParams& params, const OperatingPoint& op) {
    if (v_write <= 0.0) throw std::domain_error("write voltage must be > 0");
    const DeviceParams eff = effective_params(params, op);
    const double r = direction == SwitchDirection::p_to_ap ? eff.r_p : eff.r_ap();
    return v_write * op.voltage_scale / r;
}

// Normal(1, sigma) factors truncated to [0.85, 1.15] by redraw.
inline ProcessSample sample_process_variation(Rng& rng, double sigma = 0.03) {
    auto draw = [&] {
        double f;
        do {
            f = 1.0 + sigma * rng.normal();
        } while (f < 0.85 || f > 1.15);
        return f;
    };
    return ProcessSample{draw(), draw(), draw()};
}

// Inverts P(i, t_pulse) = target_p at the nominal operating point. The
// closed-form inverse of the switching law seeds a bisection that polishes
// to 1e-9 absolute in probability.
inline double calibrate_current(double target_p, double t_pulse, const DeviceParams& params) {
    constexpr double kRange = 1e-6;
    constexpr double kTol = 1e-9;
    constexpr int kMaxIter = 200;
    if (!(target_p > kRange && target_p < 1.0 - kRange))
        throw CalibrationError("target probability outside (1e-6, 1-1e-6)");
    if (t_pulse <= 0.0) throw std::domain_error("pulse width must be > 0");
    params.validate();

    const OperatingPoint nominal{};
    const double hazard = -std::log1p(-target_p);           // t/tau required
    const double arg = std::log(t_pulse / (params.tau0 * hazard)) / params.delta0;
    if (arg < 0.0)
        throw CalibrationError("target above the sub-critical maximum at this pulse width");
    if (arg > 1.0)
        throw CalibrationError("target below the zero-current switching floor");

    double lo = params.ic0 * 1e-12;
    double hi = params.ic0;
    if (switch_probability(lo, t_pulse, params, nominal) > target_p)
        throw CalibrationError("target below the zero-current switching floor");
    if (switch_probability(hi, t_pulse, params, nominal) < target_p)
        throw CalibrationError("target above the sub-critical maximum at this pulse width");

    double i = params.ic0 * (1.0 - std::sqrt(arg));  // exact inverse, used as seed
    for (int iter = 0; iter < kMaxIter; ++iter) {
        if (i <= lo || i >= hi) i = 0.5 * (lo + hi);
        const double p = switch_probability(i, t_pulse, params, nominal);
        if (std::abs(p - target_p) <= kTol) return i;
        if (p < target_p)
            lo = i;
        else
            hi = i;
        i = 0.5 * (lo + hi);
    }
    throw CalibrationError("calibration did not converge");
}

inline SwitchOutcome attempt_switch(double i_write, double t_pulse,
                                    const DeviceParams& params, const OperatingPoint& op,
                                    Rng& rng) {
    const double p = switch_probability(i_write, t_pulse, params, op);
    return SwitchOutcome{rng.bernoulli(p), p};
}

}  // namespace mcpt
