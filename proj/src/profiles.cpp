#include "hcfs/profiles.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "hcfs/errors.hpp"
#include "hcfs/rng.hpp"
#include "hcfs/text.hpp"

namespace hcfs {

std::size_t VelocityProfile::index_at(double t) const {
    const auto i = static_cast<long long>(std::llround(t / dt));
    if (i < 0 || i >= static_cast<long long>(v.size()))
        throw StructuralError("profile: time " + fmt_double(t) + " outside trace");
    return static_cast<std::size_t>(i);
}

void VelocityProfile::validate(double v_max) const {
    if (!(dt > 0.0)) throw ConfigError("profile: dt must be > 0");
    if (v.size() < 2) throw ConfigError("profile: needs at least 2 samples");
    for (double s : v)
        if (!(s >= 0.0) || !(s <= v_max))
            throw ConfigError("profile: velocity " + fmt_double(s) + " outside [0, v_max]");
}

VelocityProfile read_profile(std::istream& in, double target_dt, double v_max) {
    if (!(target_dt > 0.0)) throw ConfigError("profile: target dt must be > 0");
    std::vector<double> ts, vs;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto text = trim(line);
        if (text.empty()) continue;
        if (lineno == 1 && text == "t,v") continue;
        const auto cols = split(text, ',');
        if (cols.size() != 2) throw ParseError("profile: expected 't,v'", lineno);
        const auto t = parse_double(trim(cols[0]));
        const auto v = parse_double(trim(cols[1]));
        if (!t || !v) throw ParseError("profile: non-numeric field", lineno);
        if (!ts.empty() && !(*t > ts.back()))
            throw ParseError("profile: time column must be strictly increasing", lineno);
        ts.push_back(*t);
        vs.push_back(*v);
    }
    if (ts.size() < 2) throw ParseError("profile: fewer than 2 data rows", lineno);

    VelocityProfile out;
    out.dt = target_dt;
    const double span = ts.back() - ts.front();
    const auto n = static_cast<std::size_t>(std::floor(span / target_dt + 1e-9)) + 1;
    out.v.reserve(n);
    std::size_t seg = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = ts.front() + static_cast<double>(i) * target_dt;
        while (seg + 2 < ts.size() && ts[seg + 1] <= t) ++seg;
        double v;
        // snap onto knots so that resampling an already-gridded trace is exact
        if (std::abs(t - ts[seg]) <= 1e-9) {
            v = vs[seg];
        } else if (std::abs(t - ts[seg + 1]) <= 1e-9) {
            v = vs[seg + 1];
        } else {
            const double w = (t - ts[seg]) / (ts[seg + 1] - ts[seg]);
            v = vs[seg] + std::clamp(w, 0.0, 1.0) * (vs[seg + 1] - vs[seg]);
        }
        out.v.push_back(std::clamp(v, 0.0, v_max));
    }
    return out;
}

VelocityProfile load_profile(const std::string& path, double target_dt, double v_max) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open profile file: " + path);
    return read_profile(in, target_dt, v_max);
}

VelocityProfile synth_stop_and_go(double duration, double dt, double v_mean, double amp,
                                  double period, double noise_sigma, std::uint64_t seed,
                                  double v_max) {
    if (!(duration > 0.0)) throw ConfigError("synth profile: duration must be > 0");
    if (!(dt > 0.0)) throw ConfigError("synth profile: dt must be > 0");
    if (!(amp >= 0.0) || !(amp <= v_mean))
        throw ConfigError("synth profile: amp must satisfy 0 <= amp <= v_mean");
    if (!(period > 0.0)) throw ConfigError("synth profile: period must be > 0");
    if (!(noise_sigma >= 0.0)) throw ConfigError("synth profile: noise_sigma must be >= 0");

    const auto n = static_cast<std::size_t>(std::floor(duration / dt + 1e-9)) + 1;

    // raw white noise in velocity would imply unbounded jerk; a 3-sample
    // moving average keeps the trace physically plausible
    std::vector<double> noise(n, 0.0);
    if (noise_sigma > 0.0) {
        Rng rng(mix64(seed));
        std::normal_distribution<double> gauss(0.0, noise_sigma);
        std::vector<double> raw(n);
        for (auto& r : raw) r = gauss(rng);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t lo = (i == 0) ? 0 : i - 1;
            const std::size_t hi = (i + 1 < n) ? i + 1 : i;
            noise[i] = (raw[lo] + raw[i] + raw[hi]) / 3.0;
        }
    }

    VelocityProfile out;
    out.dt = dt;
    out.v.resize(n);
    constexpr double two_pi = 6.283185307179586476925286766559;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * dt;
        const double v = v_mean + amp * std::sin(two_pi * t / period) + noise[i];
        out.v[i] = std::clamp(v, 0.0, v_max);
    }
    return out;
}

std::vector<VehicleState> derive_leader_trace(const VelocityProfile& profile, double x0) {
    if (profile.v.size() < 2) throw StructuralError("derive_leader_trace: profile too short");
    std::vector<VehicleState> out(profile.v.size());
    out[0] = VehicleState{x0, profile.v[0], 0.0};
    for (std::size_t i = 1; i < profile.v.size(); ++i) {
        out[i].a = (profile.v[i] - profile.v[i - 1]) / profile.dt;
        out[i].v = profile.v[i];
        const double dx =
            out[i - 1].v * profile.dt + 0.5 * out[i - 1].a * profile.dt * profile.dt;
        out[i].x = out[i - 1].x + dx;
    }
    return out;
}

void write_profile_csv(const VelocityProfile& profile, std::ostream& out) {
    out << "t,v\n";
    for (std::size_t i = 0; i < profile.v.size(); ++i)
        out << fmt_double(static_cast<double>(i) * profile.dt) << ','
            << fmt_double(profile.v[i]) << '\n';
}

}  // namespace hcfs
