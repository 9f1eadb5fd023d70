#pragma once

#include "llns/field.hpp"
#include "llns/noise.hpp"
#include "llns/rng.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace llns {

// Deterministic stirring force: a few low modes, constant or cosine-in-time.
// Modes are listed for canonical k only (first nonzero component positive);
// the conjugate mirror is implied so the physical force is real. k = 0 is
// rejected: no bulk acceleration.
struct ForcingMode {
    std::array<int, 3> k{0, 0, 0};
    std::array<cplx, 3> amplitude{cplx(0, 0), cplx(0, 0), cplx(0, 0)};
};

struct ForcingSpec {
    enum class Profile { Constant, Cosine };
    std::vector<ForcingMode> modes;
    Profile profile = Profile::Constant;
    double omega = 0.0;

    bool empty() const { return modes.empty(); }
    double time_factor(double t) const { return profile == Profile::Constant ? 1.0 : std::cos(omega * t); }
    void validate(int dim) const;
    SpectralField field(TorusGrid grid, double t) const; // raw f, no projection
};

struct SolverParams {
    int d = 2;
    TorusGrid grid;
    double nu = 0.0;
    double alpha = 0.75;
    int m = 0;          // cutoff exponent, Lambda = 2^m
    double kappa = 0.0; // 3(d+2)/8
    double theta = M_SQRT2;
    double dt = 0.0;
    double t_end = 0.0;
    ForcingSpec forcing;
    bool enable_nonlinear = true; // test hook for the linearized system
    bool enable_noise = true;

    double noise_amplitude() const { return enable_noise ? theta * std::pow(nu, kappa) : 0.0; }
};

// m = round(alpha log2(1/nu)), kappa = 3(d+2)/8. Throws if alpha is outside
// [3/4, 1] or 2^m does not fit the grid band (under-resolved run).
SolverParams make_params(double nu, double alpha, int d, TorusGrid grid, double dt, double t_end,
                         ForcingSpec forcing = {});

double kappa_exponent(int d);

// Advective CFL suggestion dt = cfl / (2^m max|u|).
double suggested_dt(const SpectralField& u, int m, double cfl = 0.5);

struct BlowUpError : std::runtime_error {
    std::size_t step_index;
    BlowUpError(std::size_t step, const std::string& what)
        : std::runtime_error(what), step_index(step) {}
};

// One row of the stochastic energy ledger. All entries are exact for the
// discrete update (integrating-factor losses, not their continuum limits),
// so the deterministic part closes to rounding.
struct AuditSample {
    double t = 0.0;            // time after the step
    double energy = 0.0;       // E after the step
    double dissipation = 0.0;  // viscous loss of this step (positive)
    double force_work = 0.0;   // dt <u, P pi_L f>
    double quad_remainder = 0.0;  // (dt^2/2) ||N + f||^2
    double nonlinear_transfer = 0.0; // dt <u, N>; zero up to rounding
    double noise_work = 0.0;      // a <e^{-nu k^2 dt} w, S>
    double ito_realized = 0.0;    // (a^2/2) ||S||^2 with a = theta nu^kappa
    double ito_model = 0.0;       // (a^2 dt/2) sum_band E|S(k)|^2 / (a^2 dt)
    std::array<double, 3> mean{0.0, 0.0, 0.0};
};

// Per-wavevector series tapped while stepping, enough to evaluate the Euler
// residual and its exact four-term split for every test mode phi = (k, i)
// without storing full snapshots. Accumulated sums satisfy
// u(t) - u(0) = visc + nonlin + force + noise exactly at sample times.
struct ModeTap {
    std::array<int, 3> k{0, 0, 0};
    std::vector<std::array<cplx, 3>> u;          // u_hat(k) at sample times
    std::vector<std::array<cplx, 3>> visc_sum;   // integrating-factor viscous increments
    std::vector<std::array<cplx, 3>> nonlin_sum; // sum dt * Nhat(k)  (N = -P div pi(u x u))
    std::vector<std::array<cplx, 3>> force_sum;  // sum dt * (P pi f)(k)
    std::vector<std::array<cplx, 3>> noise_sum;  // sum a * S(k)
    std::vector<std::array<cplx, 3>> conv_full;  // (P div(u x u))(k), untruncated, at sample times
    std::vector<std::array<cplx, 3>> force_proj; // (P f)(k), untruncated, at sample times
};

struct TrajectoryStore {
    SolverParams params;
    std::vector<double> times;             // sample times (always includes 0 and t_end)
    std::vector<SpectralField> snapshots;  // empty when store_snapshots = false
    std::vector<AuditSample> audit;        // one per step
    std::vector<ModeTap> taps;
    double initial_energy = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t member = 0;

    std::size_t sample_count() const { return times.size(); }
    const ModeTap* tap(const std::array<int, 3>& k) const;
};

struct RunOptions {
    std::size_t sample_every = 1;
    bool store_snapshots = true;
    std::vector<std::array<int, 3>> tap_modes; // empty: no residual tap
};

// One exponential Euler-Maruyama step:
// u <- e^{-nu|k|^2 dt} (u + dt [N + P pi f]) + theta nu^kappa S,
// S = P div pi_Lambda(dxi). Keeps the field divergence-free, zero-mean and
// band-limited; throws BlowUpError on overflow.
SpectralField step(const SpectralField& u, const SolverParams& p, const RngStream& rng);

TrajectoryStore run(const SpectralField& u0, const SolverParams& p, const RngStream& rng,
                    const RunOptions& opts = {});

struct EnergyAuditReport {
    std::vector<double> residuals; // r_n = dE_n - (-D + W_force + Q + I_model)
    double mean = 0.0;
    double stddev = 0.0;
    double max_abs = 0.0;
    double max_rel = 0.0; // vs energy at that step
};

// Per-interval residual of the energy ledger. The modeled side carries the
// deterministic terms plus the Ito input in expectation, so with noise the
// residual is the zero-mean martingale part.
EnergyAuditReport energy_audit(const TrajectoryStore& traj, const SolverParams& p);

// (a^2 dt / 2) * sum_{0<|k|_inf<2^m} forcing_mode_second_moment(k): the
// modeled Ito energy input per step.
double ito_input_per_step(const SolverParams& p);

} // namespace llns
