#include "secemb/dp.hpp"

#include <cmath>
#include <stdexcept>

namespace secemb::dp {

void DpConfig::validate() const {
    if (!(epsilon > 0)) throw std::invalid_argument("DpConfig: epsilon must be positive");
    if (!(delta > 0 && delta < 1)) throw std::invalid_argument("DpConfig: delta must be in (0,1)");
    if (!(delta2 > 0)) throw std::invalid_argument("DpConfig: delta2 must be positive");
}

std::vector<double> clip(std::span<const double> g, double delta2) {
    double sq = 0;
    for (double x : g) sq += x * x;
    double norm = std::sqrt(sq);
    std::vector<double> out(g.begin(), g.end());
    if (norm > delta2) {
        double scale = delta2 / norm;
        for (double& x : out) x *= scale;
    }
    return out;
}

double noise_sigma(const DpConfig& cfg) {
    cfg.validate();
    return std::sqrt(std::log(1.25 / cfg.delta)) * cfg.delta2 / cfg.epsilon;
}

void add_server_noise(Rng& rng, RingVector& shares, double sigma) {
    if (sigma < 0) throw std::invalid_argument("add_server_noise: sigma must be >= 0");
    if (sigma == 0) return;
    const RingParams& p = shares.params;
    const std::uint64_t mask = p.mask();
    for (auto& v : shares.elems) {
        RingScalar noise = quantize(p, sigma * rng.next_gaussian());
        v = (v + noise) & mask;
    }
}

}  // namespace secemb::dp
