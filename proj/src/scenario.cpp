#include "aoilab/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "aoilab/errors.hpp"
#include "aoilab/rng.hpp"

namespace aoilab {
namespace {

using nlohmann::json;

constexpr int kQuadrature = 64;
constexpr std::uint64_t kStreamPositions = 1;
constexpr std::uint64_t kStreamCounts = 2;

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw ParameterError(std::string(name) + " must be positive and finite");
    }
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object() || !obj.contains(key)) {
        throw SchemaError(path.empty() ? key : path + "." + key, "missing required field");
    }
    return obj.at(key);
}

double number(const json& obj, const std::string& key, const std::string& path) {
    const json& v = require(obj, key, path);
    if (!v.is_number()) {
        throw SchemaError(path + "." + key, "expected a number");
    }
    return v.get<double>();
}

Vec3 vec3(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() || !v[2].is_number()) {
        throw SchemaError(path, "expected [x, y, z]");
    }
    return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

// Rethrows parameter-level invariant failures as schema errors naming the block.
template <typename Fn>
void validate_block(const std::string& block, Fn&& fn) {
    try {
        fn();
    } catch (const ParameterError& e) {
        throw SchemaError(block, e.what());
    }
}

}  // namespace

long Scenario::total_nodes() const {
    long total = 0;
    for (const auto& c : clusters) {
        total += c.node_count;
    }
    return total;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double ratio) { return 10.0 * std::log10(ratio); }
double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

void validate(const EnvParams& env) {
    require_positive(env.beta, "env.beta");
    require_positive(env.beta_tilde, "env.beta_tilde");
    require_positive(env.xi_los, "env.xi_los");
    require_positive(env.xi_nlos, "env.xi_nlos");
    require_positive(env.carrier_freq, "env.carrier_freq");
    require_positive(env.light_speed, "env.light_speed");
    require_positive(env.noise_power, "env.noise_power");
    require_positive(env.ch_tx_power, "env.ch_tx_power");
    require_positive(env.bandwidth, "env.bandwidth");
    require_positive(env.packet_bits, "env.packet_bits");
    require_positive(env.slot_seconds, "env.slot_seconds");
    require_positive(env.altitude, "env.altitude");
    if (!(env.xi_los < env.xi_nlos)) {
        throw ParameterError("env.xi_los must be smaller than env.xi_nlos");
    }
    if (!(env.snr_threshold > 1.0)) {
        throw ParameterError("env.snr_threshold must exceed 1 (0 dB)");
    }
    if (env.l_sub < 1) {
        throw ParameterError("env.l_sub must be at least 1");
    }
}

void validate(const UavParams& uav) {
    require_positive(uav.speed, "uav.speed");
    require_positive(uav.p0, "uav.p0");
    require_positive(uav.p1, "uav.p1");
    require_positive(uav.u_tip, "uav.u_tip");
    require_positive(uav.v0, "uav.v0");
    require_positive(uav.d0, "uav.d0");
    require_positive(uav.rho, "uav.rho");
    require_positive(uav.s0, "uav.s0");
    require_positive(uav.delta, "uav.delta");
    require_positive(uav.p_com, "uav.p_com");
}

void validate(const Scenario& s) {
    validate(s.env);
    validate(s.uav);
    if (s.clusters.empty()) {
        throw ParameterError("scenario needs at least one cluster");
    }
    if (std::abs(s.start.z - s.env.altitude) > 1e-9) {
        throw ParameterError("start altitude must equal env.altitude");
    }
    for (std::size_t i = 0; i < s.clusters.size(); ++i) {
        if (s.clusters[i].node_count < 1) {
            throw ParameterError("clusters[" + std::to_string(i) + "].n must be at least 1");
        }
        if (!std::isfinite(s.clusters[i].ch_position.x) || !std::isfinite(s.clusters[i].ch_position.y)) {
            throw ParameterError("clusters[" + std::to_string(i) + "].ch must be finite");
        }
    }
}

Scenario generate_scenario(std::uint64_t seed, std::size_t m, double area_side,
                           const std::vector<int>& node_count_choices, const EnvParams& env,
                           const UavParams& uav) {
    if (m < 1) {
        throw ParameterError("m must be at least 1");
    }
    if (!(area_side > 0.0)) {
        throw ParameterError("area_side must be positive");
    }
    if (node_count_choices.empty()) {
        throw ParameterError("node_count_choices must not be empty");
    }
    for (int n : node_count_choices) {
        if (n < 1) {
            throw ParameterError("node counts must be at least 1");
        }
    }
    Scenario s;
    s.seed = seed;
    s.env = env;
    s.uav = uav;
    s.start = {0.0, 0.0, env.altitude};
    Rng positions(seed, kStreamPositions);
    Rng counts(seed, kStreamCounts);
    s.clusters.resize(m);
    for (auto& c : s.clusters) {
        c.ch_position.x = positions.uniform(0.0, area_side);
        c.ch_position.y = positions.uniform(0.0, area_side);
        c.node_count = node_count_choices[counts.index(node_count_choices.size())];
    }
    validate(s);
    return s;
}

CandidateGrid build_candidate_grid(const GroundCluster& cluster, std::size_t cluster_index,
                                   double service_radius, int l_sub, double altitude) {
    if (!(service_radius >= 0.0)) {
        throw ParameterError("service_radius must be non-negative");
    }
    if (l_sub < 1) {
        throw ParameterError("l_sub must be at least 1");
    }
    CandidateGrid grid;
    grid.cluster_index = cluster_index;
    grid.radius = service_radius;
    grid.center = lift(cluster.ch_position, altitude);
    const double r = service_radius;
    if (r == 0.0) {
        grid.points.push_back(grid.center);
        return grid;
    }
    const double cell = 2.0 * r / l_sub;
    const double r2 = r * r;
    for (int iy = 0; iy < l_sub; ++iy) {
        for (int ix = 0; ix < l_sub; ++ix) {
            const double x0 = -r + ix * cell;
            const double y0 = -r + iy * cell;
            const double x1 = x0 + cell;
            const double y1 = y0 + cell;
            const double far_x = std::max(std::abs(x0), std::abs(x1));
            const double far_y = std::max(std::abs(y0), std::abs(y1));
            double cx = 0.0;
            double cy = 0.0;
            if (far_x * far_x + far_y * far_y <= r2) {
                cx = 0.5 * (x0 + x1);
                cy = 0.5 * (y0 + y1);
            } else {
                const double sub = cell / kQuadrature;
                double sx = 0.0;
                double sy = 0.0;
                long inside = 0;
                for (int j = 0; j < kQuadrature; ++j) {
                    const double py = y0 + (j + 0.5) * sub;
                    for (int i = 0; i < kQuadrature; ++i) {
                        const double px = x0 + (i + 0.5) * sub;
                        if (px * px + py * py <= r2) {
                            sx += px;
                            sy += py;
                            ++inside;
                        }
                    }
                }
                if (inside == 0) {
                    continue;
                }
                cx = sx / static_cast<double>(inside);
                cy = sy / static_cast<double>(inside);
            }
            grid.points.push_back({grid.center.x + cx, grid.center.y + cy, altitude});
        }
    }
    return grid;
}

std::string scenario_to_json(const Scenario& s) {
    json j;
    j["version"] = 1;
    j["seed"] = s.seed;
    j["start"] = {s.start.x, s.start.y, s.start.z};
    j["env"] = {
        {"beta", s.env.beta},
        {"beta_tilde", s.env.beta_tilde},
        {"xi_los", s.env.xi_los},
        {"xi_nlos", s.env.xi_nlos},
        {"carrier_freq", s.env.carrier_freq},
        {"light_speed", s.env.light_speed},
        {"noise_power", s.env.noise_power},
        {"ch_tx_power", s.env.ch_tx_power},
        {"snr_threshold", s.env.snr_threshold},
        {"bandwidth", s.env.bandwidth},
        {"packet_bits", s.env.packet_bits},
        {"slot_seconds", s.env.slot_seconds},
        {"altitude", s.env.altitude},
        {"l_sub", s.env.l_sub},
    };
    j["uav"] = {
        {"speed", s.uav.speed}, {"p0", s.uav.p0},       {"p1", s.uav.p1},
        {"u_tip", s.uav.u_tip}, {"v0", s.uav.v0},       {"d0", s.uav.d0},
        {"rho", s.uav.rho},     {"s0", s.uav.s0},       {"delta", s.uav.delta},
        {"p_com", s.uav.p_com},
    };
    json clusters = json::array();
    for (const auto& c : s.clusters) {
        clusters.push_back({{"ch", {c.ch_position.x, c.ch_position.y}}, {"n", c.node_count}});
    }
    j["clusters"] = std::move(clusters);
    return j.dump(2) + "\n";
}

Scenario scenario_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError("<document>", e.what());
    }
    if (!j.is_object()) {
        throw SchemaError("<document>", "expected a JSON object");
    }
    const json& version = require(j, "version", "");
    if (!version.is_number_integer() || version.get<int>() != 1) {
        throw SchemaError("version", "unsupported version (expected 1)");
    }
    Scenario s;
    const json& seed = require(j, "seed", "");
    if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0)) {
        throw SchemaError("seed", "expected a non-negative integer");
    }
    s.seed = seed.get<std::uint64_t>();
    s.start = vec3(require(j, "start", ""), "start");

    const json& env = require(j, "env", "");
    if (!env.is_object()) {
        throw SchemaError("env", "expected an object");
    }
    s.env.beta = number(env, "beta", "env");
    s.env.beta_tilde = number(env, "beta_tilde", "env");
    s.env.xi_los = number(env, "xi_los", "env");
    s.env.xi_nlos = number(env, "xi_nlos", "env");
    s.env.carrier_freq = number(env, "carrier_freq", "env");
    s.env.light_speed = number(env, "light_speed", "env");
    s.env.noise_power = number(env, "noise_power", "env");
    s.env.ch_tx_power = number(env, "ch_tx_power", "env");
    s.env.snr_threshold = number(env, "snr_threshold", "env");
    s.env.bandwidth = number(env, "bandwidth", "env");
    s.env.packet_bits = number(env, "packet_bits", "env");
    s.env.slot_seconds = number(env, "slot_seconds", "env");
    s.env.altitude = number(env, "altitude", "env");
    const json& l_sub = require(env, "l_sub", "env");
    if (!l_sub.is_number_integer()) {
        throw SchemaError("env.l_sub", "expected an integer");
    }
    s.env.l_sub = l_sub.get<int>();
    validate_block("env", [&] { validate(s.env); });

    const json& uav = require(j, "uav", "");
    if (!uav.is_object()) {
        throw SchemaError("uav", "expected an object");
    }
    s.uav.speed = number(uav, "speed", "uav");
    s.uav.p0 = number(uav, "p0", "uav");
    s.uav.p1 = number(uav, "p1", "uav");
    s.uav.u_tip = number(uav, "u_tip", "uav");
    s.uav.v0 = number(uav, "v0", "uav");
    s.uav.d0 = number(uav, "d0", "uav");
    s.uav.rho = number(uav, "rho", "uav");
    s.uav.s0 = number(uav, "s0", "uav");
    s.uav.delta = number(uav, "delta", "uav");
    s.uav.p_com = number(uav, "p_com", "uav");
    validate_block("uav", [&] { validate(s.uav); });

    const json& clusters = require(j, "clusters", "");
    if (!clusters.is_array() || clusters.empty()) {
        throw SchemaError("clusters", "expected a non-empty array");
    }
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        const std::string path = "clusters[" + std::to_string(i) + "]";
        const json& c = clusters[i];
        const json& ch = require(c, "ch", path);
        if (!ch.is_array() || ch.size() != 2 || !ch[0].is_number() || !ch[1].is_number()) {
            throw SchemaError(path + ".ch", "expected [x, y]");
        }
        const json& n = require(c, "n", path);
        if (!n.is_number_integer() || n.get<long long>() < 1) {
            throw SchemaError(path + ".n", "expected an integer >= 1");
        }
        s.clusters.push_back({{ch[0].get<double>(), ch[1].get<double>()}, n.get<int>()});
    }
    if (std::abs(s.start.z - s.env.altitude) > 1e-9) {
        throw SchemaError("start", "altitude must equal env.altitude");
    }
    return s;
}

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write scenario file: " + path.string());
    }
    out << scenario_to_json(s);
    if (!out) {
        throw IoError("failed writing scenario file: " + path.string());
    }
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read scenario file: " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return scenario_from_json(buf.str());
}

}  // namespace aoilab
