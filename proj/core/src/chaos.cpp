#include "qcdma/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "qcdma/csv.hpp"

namespace qcdma::chaos {

namespace {

constexpr double kThermalVoltage = 0.026; // [V], smoothing scale of the exponential model

double softplus(double x) {
    if (x > 30.0) return x;
    return std::log1p(std::exp(x));
}

double sigmoid(double x) {
    if (x > 30.0) return 1.0;
    if (x < -30.0) return 0.0;
    return 1.0 / (1.0 + std::exp(-x));
}

struct Rates {
    double v1, v2, il;
};

Rates rates(const CircuitParams& p, double v1, double v2, double il) {
    const double ie = emitter_current(p, v2);
    return {
        (il - ie) / p.c1,
        (il - p.bias_current) / p.c2,
        (p.vcc - v1 - v2 - p.resistance * il) / p.inductance,
    };
}

// One classical RK4 step, in place.
void rk4_step(const CircuitParams& p, double dt, double& v1, double& v2, double& il) {
    const Rates k1 = rates(p, v1, v2, il);
    const Rates k2 = rates(p, v1 + 0.5 * dt * k1.v1, v2 + 0.5 * dt * k1.v2, il + 0.5 * dt * k1.il);
    const Rates k3 = rates(p, v1 + 0.5 * dt * k2.v1, v2 + 0.5 * dt * k2.v2, il + 0.5 * dt * k2.il);
    const Rates k4 = rates(p, v1 + dt * k3.v1, v2 + dt * k3.v2, il + dt * k3.il);
    v1 += dt / 6.0 * (k1.v1 + 2.0 * k2.v1 + 2.0 * k3.v1 + k4.v1);
    v2 += dt / 6.0 * (k1.v2 + 2.0 * k2.v2 + 2.0 * k3.v2 + k4.v2);
    il += dt / 6.0 * (k1.il + 2.0 * k2.il + 2.0 * k3.il + k4.il);
}

using Vec3 = std::array<double, 3>;

Vec3 apply_jacobian(const CircuitParams& p, const CircuitState& s, const Vec3& u) {
    const auto j = jacobian(p, s);
    return {j[0] * u[0] + j[1] * u[1] + j[2] * u[2],
            j[3] * u[0] + j[4] * u[1] + j[5] * u[2],
            j[6] * u[0] + j[7] * u[1] + j[8] * u[2]};
}

// RK4 step of state + tangent vectors; the tangent flow is evaluated with
// the Jacobian at the matching internal stages.
void rk4_step_tangent(const CircuitParams& p, double dt, CircuitState& s,
                      std::vector<Vec3>& tangents) {
    const Rates k1 = rates(p, s.v_c1, s.v_c2, s.i_l);
    const CircuitState s2{s.v_c1 + 0.5 * dt * k1.v1, s.v_c2 + 0.5 * dt * k1.v2,
                          s.i_l + 0.5 * dt * k1.il};
    const Rates k2 = rates(p, s2.v_c1, s2.v_c2, s2.i_l);
    const CircuitState s3{s.v_c1 + 0.5 * dt * k2.v1, s.v_c2 + 0.5 * dt * k2.v2,
                          s.i_l + 0.5 * dt * k2.il};
    const Rates k3 = rates(p, s3.v_c1, s3.v_c2, s3.i_l);
    const CircuitState s4{s.v_c1 + dt * k3.v1, s.v_c2 + dt * k3.v2, s.i_l + dt * k3.il};
    const Rates k4 = rates(p, s4.v_c1, s4.v_c2, s4.i_l);

    for (auto& u : tangents) {
        const Vec3 j1 = apply_jacobian(p, s, u);
        const Vec3 u2{u[0] + 0.5 * dt * j1[0], u[1] + 0.5 * dt * j1[1], u[2] + 0.5 * dt * j1[2]};
        const Vec3 j2 = apply_jacobian(p, s2, u2);
        const Vec3 u3{u[0] + 0.5 * dt * j2[0], u[1] + 0.5 * dt * j2[1], u[2] + 0.5 * dt * j2[2]};
        const Vec3 j3 = apply_jacobian(p, s3, u3);
        const Vec3 u4{u[0] + dt * j3[0], u[1] + dt * j3[1], u[2] + dt * j3[2]};
        const Vec3 j4 = apply_jacobian(p, s4, u4);
        for (int i = 0; i < 3; ++i)
            u[i] += dt / 6.0 * (j1[i] + 2.0 * j2[i] + 2.0 * j3[i] + j4[i]);
    }

    s.v_c1 += dt / 6.0 * (k1.v1 + 2.0 * k2.v1 + 2.0 * k3.v1 + k4.v1);
    s.v_c2 += dt / 6.0 * (k1.v2 + 2.0 * k2.v2 + 2.0 * k3.v2 + k4.v2);
    s.i_l += dt / 6.0 * (k1.il + 2.0 * k2.il + 2.0 * k3.il + k4.il);
}

double norm3(const Vec3& u) {
    return std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
}

double dot3(const Vec3& a, const Vec3& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

} // namespace

void CircuitParams::validate() const {
    const bool positive = resistance > 0 && inductance > 0 && c1 > 0 && c2 > 0 && vcc > 0 &&
                          bias_current > 0 && on_conductance > 0;
    if (!positive)
        throw ConfigError("CircuitParams: R, L, C1, C2, Vcc, I0, Gon must be strictly positive");
    if (!(threshold > 0 && threshold < vcc))
        throw ConfigError("CircuitParams: Vth must lie in (0, Vcc)");
    if (!(std::isfinite(resistance) && std::isfinite(inductance) && std::isfinite(c1) &&
          std::isfinite(c2) && std::isfinite(vcc) && std::isfinite(bias_current) &&
          std::isfinite(threshold) && std::isfinite(on_conductance)))
        throw ConfigError("CircuitParams: non-finite component value");
}

bool CircuitState::finite() const noexcept {
    return std::isfinite(v_c1) && std::isfinite(v_c2) && std::isfinite(i_l);
}

double emitter_current(const CircuitParams& p, double v_c2) {
    const double vbe_excess = -v_c2 - p.threshold;
    switch (p.model) {
        case TransistorModel::Exponential:
            return p.on_conductance * kThermalVoltage * softplus(vbe_excess / kThermalVoltage);
        case TransistorModel::PiecewiseLinear:
        default:
            return p.on_conductance * std::max(0.0, vbe_excess);
    }
}

CircuitState vector_field(const CircuitParams& p, const CircuitState& s) {
    p.validate();
    if (!s.finite()) throw ConfigError("vector_field: non-finite state");
    const Rates r = rates(p, s.v_c1, s.v_c2, s.i_l);
    return {r.v1, r.v2, r.il};
}

std::array<double, 9> jacobian(const CircuitParams& p, const CircuitState& s) {
    double die_dv2; // d(I_E)/d(v_c2)
    const double vbe_excess = -s.v_c2 - p.threshold;
    if (p.model == TransistorModel::Exponential) {
        die_dv2 = -p.on_conductance * sigmoid(vbe_excess / kThermalVoltage);
    } else {
        die_dv2 = vbe_excess > 0.0 ? -p.on_conductance : 0.0;
    }
    return {
        0.0, -die_dv2 / p.c1, 1.0 / p.c1,        // dv_c1' / d(v1,v2,i)
        0.0, 0.0, 1.0 / p.c2,                    // dv_c2'
        -1.0 / p.inductance, -1.0 / p.inductance, -p.resistance / p.inductance, // di_l'
    };
}

double resonance_frequency(const CircuitParams& p) {
    const double cs = p.c1 * p.c2 / (p.c1 + p.c2);
    return 1.0 / (2.0 * M_PI * std::sqrt(p.inductance * cs));
}

CircuitState equilibrium(const CircuitParams& p) {
    // Active region: i_l = I0 and I_E(v_c2) = I0.
    double v2;
    if (p.model == TransistorModel::Exponential) {
        const double x = std::expm1(p.bias_current / (p.on_conductance * kThermalVoltage));
        v2 = -(p.threshold + kThermalVoltage * std::log(x));
    } else {
        v2 = -(p.threshold + p.bias_current / p.on_conductance);
    }
    const double v1 = p.vcc - v2 - p.resistance * p.bias_current;
    return {v1, v2, p.bias_current};
}

bool inside_bounding_box(const CircuitParams& p, const CircuitState& s) {
    const double vmax = 10.0 * p.vcc;
    const double imax = 10.0 * p.vcc / p.resistance;
    return std::abs(s.v_c1) <= vmax && std::abs(s.v_c2) <= vmax && std::abs(s.i_l) <= imax;
}

Trajectory integrate(const CircuitParams& p, const CircuitState& init, double dt, std::size_t n,
                     double t0) {
    p.validate();
    if (!init.finite()) throw ConfigError("integrate: non-finite initial state");
    if (!(dt > 0)) throw ConfigError("integrate: dt must be positive");
    if (dt > 1.0 / (100.0 * resonance_frequency(p)))
        throw ConfigError("integrate: dt exceeds 1/(100*f0) accuracy guard");

    Trajectory traj;
    traj.t0 = t0;
    traj.dt = dt;
    traj.samples.reserve(n + 1);
    traj.samples.push_back(init);

    double v1 = init.v_c1, v2 = init.v_c2, il = init.i_l;
    for (std::size_t k = 0; k < n; ++k) {
        rk4_step(p, dt, v1, v2, il);
        const CircuitState s{v1, v2, il};
        if (!s.finite() || !inside_bounding_box(p, s))
            throw DivergenceError(k + 1, "integrate: state left the bounding box at step " +
                                             std::to_string(k + 1));
        traj.samples.push_back(s);
    }
    return traj;
}

std::array<double, 3> lyapunov_spectrum(const CircuitParams& p, const CircuitState& init,
                                        const LyapunovOptions& opts) {
    p.validate();
    const double dt = opts.dt > 0 ? opts.dt : 1.0 / (200.0 * resonance_frequency(p));
    const std::size_t steps_per_renorm =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(opts.renorm_interval / dt)));

    CircuitState s = init;
    // transient
    const std::size_t transient_steps = static_cast<std::size_t>(opts.transient_time / dt);
    {
        double v1 = s.v_c1, v2 = s.v_c2, il = s.i_l;
        for (std::size_t k = 0; k < transient_steps; ++k) {
            rk4_step(p, dt, v1, v2, il);
            const CircuitState c{v1, v2, il};
            if (!c.finite() || !inside_bounding_box(p, c))
                throw DivergenceError(k + 1, "lyapunov_spectrum: divergence during transient");
        }
        s = {v1, v2, il};
    }

    std::vector<Vec3> q = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    std::array<double, 3> logsum{0.0, 0.0, 0.0};
    const std::size_t total_steps = static_cast<std::size_t>(opts.total_time / dt);
    std::size_t k = 0;
    while (k < total_steps) {
        for (std::size_t j = 0; j < steps_per_renorm && k < total_steps; ++j, ++k) {
            rk4_step_tangent(p, dt, s, q);
            if (!s.finite() || !inside_bounding_box(p, s))
                throw DivergenceError(k + 1, "lyapunov_spectrum: divergence");
        }
        // modified Gram-Schmidt
        for (int i = 0; i < 3; ++i) {
            for (int m = 0; m < i; ++m) {
                const double c = dot3(q[i], q[m]);
                for (int d = 0; d < 3; ++d) q[i][d] -= c * q[m][d];
            }
            const double r = norm3(q[i]);
            logsum[i] += std::log(r);
            for (int d = 0; d < 3; ++d) q[i][d] /= r;
        }
    }
    const double t = static_cast<double>(total_steps) * dt;
    std::array<double, 3> lam{logsum[0] / t, logsum[1] / t, logsum[2] / t};
    std::sort(lam.begin(), lam.end(), std::greater<>());
    return lam;
}

std::array<double, 2> conditional_exponents(const CircuitParams& p) {
    // The (v_c2, i_l) response subsystem is linear with constant Jacobian
    // [[0, 1/C2], [-1/L, -R/L]]; its Lyapunov exponents are the real parts
    // of the eigenvalues.
    const double a = p.resistance / p.inductance;
    const double b = 1.0 / (p.inductance * p.c2);
    const double disc = a * a - 4.0 * b;
    if (disc >= 0.0) {
        const double r = std::sqrt(disc);
        double l1 = (-a + r) / 2.0, l2 = (-a - r) / 2.0;
        return {std::max(l1, l2), std::min(l1, l2)};
    }
    return {-a / 2.0, -a / 2.0};
}

CircuitParams scale_to_bandwidth(const CircuitParams& p, double target_bw_hz,
                                 double reference_bw_hz) {
    if (!(target_bw_hz > 0)) throw ConfigError("scale_to_bandwidth: target bandwidth must be > 0");
    const double factor = reference_bw_hz / target_bw_hz;
    CircuitParams out = p;
    out.inductance *= factor;
    out.c1 *= factor;
    out.c2 *= factor;
    return out;
}

Trajectory pecora_carroll_receive(const CircuitParams& p, const std::vector<double>& drive,
                                  double dt, const CircuitState& init, double t0) {
    p.validate();
    if (drive.empty()) throw ConfigError("pecora_carroll_receive: empty drive");
    if (!(dt > 0)) throw ConfigError("pecora_carroll_receive: dt must be positive");
    if (dt > 1.0 / (100.0 * resonance_frequency(p)))
        throw ConfigError("pecora_carroll_receive: dt exceeds 1/(100*f0) accuracy guard");

    Trajectory traj;
    traj.t0 = t0;
    traj.dt = dt;
    traj.samples.reserve(drive.size());

    double v1 = drive.front(), v2 = init.v_c2, il = init.i_l;
    traj.samples.push_back({v1, v2, il});
    for (std::size_t k = 1; k < drive.size(); ++k) {
        rk4_step(p, dt, v1, v2, il);
        v1 = drive[k]; // drive replaces the evolved v_c1 at every step
        const CircuitState s{v1, v2, il};
        if (!s.finite() || !inside_bounding_box(p, s))
            throw DivergenceError(k, "pecora_carroll_receive: divergence at step " +
                                         std::to_string(k));
        traj.samples.push_back(s);
    }
    return traj;
}

SyncError sync_error(const Trajectory& tx, const Trajectory& rx, double transient_time) {
    if (tx.dt != rx.dt || tx.size() != rx.size())
        throw ConfigError("sync_error: trajectories must share dt and length");
    SyncError out;
    out.trace.resize(tx.size());
    for (std::size_t i = 0; i < tx.size(); ++i)
        out.trace[i] = std::abs(tx.samples[i].v_c2 - rx.samples[i].v_c2);
    const std::size_t start =
        std::min(tx.size(), static_cast<std::size_t>(transient_time / tx.dt));
    out.max_after_transient = 0.0;
    for (std::size_t i = start; i < tx.size(); ++i)
        out.max_after_transient = std::max(out.max_after_transient, out.trace[i]);
    return out;
}

void write_csv(std::ostream& os, const Trajectory& traj) {
    os << "t,v_c1,v_c2,i_l\n";
    for (std::size_t i = 0; i < traj.size(); ++i) {
        std::string line;
        append_cell(line, traj.time_at(i));
        append_cell(line, traj.samples[i].v_c1);
        append_cell(line, traj.samples[i].v_c2);
        append_cell(line, traj.samples[i].i_l);
        line.push_back('\n');
        os << line;
    }
}

} // namespace qcdma::chaos
