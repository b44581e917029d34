#include "hcfs/cacc.hpp"

#include <cmath>

namespace hcfs {

void CaccGains::validate() const {
    if (!(k1 > 0.0) || !(k2 > 0.0) || !(k3 > 0.0) || !(k4 > 0.0))
        throw ConfigError("cacc gains must all be > 0");
}

double cacc_command(const Observation& obs, const CaccGains& gains, double v_last, double dt,
                    double a_max) {
    if (!std::isfinite(obs.e_gap_pred) || !std::isfinite(obs.e_v_pred) ||
        !std::isfinite(obs.e_gap_lead) || !std::isfinite(obs.e_v_lead) ||
        !std::isfinite(v_last))
        throw NumericError("cacc_command: non-finite observation");
    if (!(dt > 0.0)) throw NumericError("cacc_command: dt must be > 0");

    const double v_cmd = cacc_velocity_command(obs, gains, v_last);
    return clamp_accel((v_cmd - v_last) / dt, a_max);
}

}  // namespace hcfs
