#pragma once

#include <span>
#include <vector>

#include "secemb/ring.hpp"
#include "secemb/rng.hpp"

namespace secemb::dp {

struct DpConfig {
    double epsilon = 1.0;
    double delta = 1e-5;
    double delta2 = 1.0;  // L2 clipping norm

    void validate() const;
};

// L2 clipping: g * min{1, delta2 / ||g||_2}.
std::vector<double> clip(std::span<const double> g, double delta2);

// sigma = sqrt(ln(1.25/delta)) * delta2 / epsilon.
double noise_sigma(const DpConfig& cfg);

// Per-coordinate Gaussian noise, quantized and added in the ring. Each server
// calls this independently on its own aggregate share.
void add_server_noise(Rng& rng, RingVector& shares, double sigma);

}  // namespace secemb::dp
