#include "aoilab/channel.hpp"

#include <cmath>
#include <numbers>

#include "aoilab/errors.hpp"

namespace aoilab::channel {
namespace {
constexpr int kMaxBisection = 200;
constexpr double kRelTol = 1e-9;
}  // namespace

double elevation_deg(const LinkGeometry& geom) {
    if (geom.horizontal_dist <= 0.0) {
        return 90.0;
    }
    return std::atan(geom.altitude / geom.horizontal_dist) * 180.0 / std::numbers::pi;
}

double los_probability(const LinkGeometry& geom, const EnvParams& env) {
    const double theta = elevation_deg(geom);
    return 1.0 / (1.0 + env.beta * std::exp(-env.beta_tilde * (theta - env.beta)));
}

double free_space_loss_db(const LinkGeometry& geom, const EnvParams& env) {
    const double d = std::hypot(geom.altitude, geom.horizontal_dist);
    return 20.0 * std::log10(4.0 * std::numbers::pi * env.carrier_freq * d / env.light_speed);
}

double avg_path_loss(const LinkGeometry& geom, const EnvParams& env) {
    const double p = los_probability(geom, env);
    const double fspl = free_space_loss_db(geom, env);
    return p * (fspl + env.xi_los) + (1.0 - p) * (fspl + env.xi_nlos);
}

double snr(const LinkGeometry& geom, const EnvParams& env) {
    return env.ch_tx_power / (env.noise_power * std::pow(10.0, avg_path_loss(geom, env) / 10.0));
}

double rate(const LinkGeometry& geom, const EnvParams& env) {
    return env.bandwidth * std::log2(1.0 + snr(geom, env));
}

LinkBudget link_budget(const LinkGeometry& geom, const EnvParams& env) {
    LinkBudget b;
    b.p_los = los_probability(geom, env);
    b.avg_loss_db = avg_path_loss(geom, env);
    b.snr_linear = env.ch_tx_power / (env.noise_power * std::pow(10.0, b.avg_loss_db / 10.0));
    b.rate_bps = env.bandwidth * std::log2(1.0 + b.snr_linear);
    return b;
}

double rate_at(const Vec3& hover, const Vec2& ch, const EnvParams& env) {
    return rate({horizontal_distance(hover, ch), env.altitude}, env);
}

double service_radius(const EnvParams& env) {
    const double target = env.snr_threshold;
    auto snr_at = [&](double r) { return snr({r, env.altitude}, env); };
    const double overhead = snr_at(0.0);
    if (overhead < target) {
        throw InfeasibleError("SNR threshold unreachable at altitude " + std::to_string(env.altitude) +
                              " m (overhead SNR " + std::to_string(overhead) + ")");
    }
    if (overhead == target) {
        return 0.0;
    }
    double lo = 0.0;
    double hi = env.altitude;
    while (snr_at(hi) >= target) {
        lo = hi;
        hi *= 2.0;
        if (!std::isfinite(hi)) {
            throw InfeasibleError("service radius bracket diverged");
        }
    }
    double mid = lo;
    for (int i = 0; i < kMaxBisection; ++i) {
        mid = 0.5 * (lo + hi);
        const double s = snr_at(mid);
        if (std::abs(s - target) / target < kRelTol * 1e-3) {
            break;
        }
        if (s > target) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo <= 1e-15 * hi) {
            break;
        }
    }
    // Return the inner end of the bracket so every point at distance <= R*
    // satisfies the threshold.
    return snr_at(mid) >= target ? mid : lo;
}

}  // namespace aoilab::channel
