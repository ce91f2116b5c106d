#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "secemb/dataset.hpp"
#include "secemb/protocol.hpp"

namespace secemb::mf {

struct MfHyper {
    std::uint32_t embed_dim = 64;
    double lr = 0.025;
    double reg = 0.01;
    std::uint32_t rounds = 400;
    std::uint32_t clients_per_round = 100;
    std::uint32_t m_prime = 200;  // 0: derive via secure count averaging
    double m_prime_alpha = 2.0;
    std::uint32_t local_epochs = 1;
    std::uint64_t seed = 1;
    double init_scale = 0.1;
    bool center_ratings = true;
    bool clamp_predictions = true;
    double rating_min = 1.0;
    double rating_max = 5.0;
};

// Private per-user parameters; never serialized into any server-bound message.
struct ClientState {
    std::vector<double> p;
    double bias = 0.0;
};

// Item-side result of one local training pass: average gradient rows (d+1,
// embedding plus item bias) for the items actually trained, scaled by
// `client_scale`.
struct LocalUpdate {
    std::vector<std::uint32_t> items;
    std::vector<std::vector<double>> rows;
};

// One or more SGD passes over the user's kept train ratings. Retrieved rows
// cover exactly the items to train; private p/bias update in place. When
// dp_clip > 0, the uploaded rows are sums of per-sample item gradients each
// L2-clipped to dp_clip (local updates themselves stay unclipped).
LocalUpdate local_train_mf(ClientState& client, const std::vector<std::uint32_t>& items,
                           const std::vector<double>& ratings,
                           const std::unordered_map<std::uint32_t, std::vector<double>>& q_rows,
                           const MfHyper& hyper, double global_mean, double client_scale,
                           double dp_clip = 0.0);

double predict(const ClientState& client, const std::vector<double>& q_row, double global_mean,
               const MfHyper& hyper);

// How the reconstructed aggregate is turned into a model step. mean/sum
// expect learning-rate-scaled client deltas; adam expects raw gradients and
// applies its own step size.
struct ServerOptimizer {
    enum class Mode { mean_sgd, sum_sgd, adam };
    Mode mode = Mode::mean_sgd;
    double lr = 1.0;  // adam step size
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::uint64_t step = 0;
    std::vector<double> m1, v1;  // table moments
    std::vector<double> m1_theta, v1_theta;

    double client_scale(const MfHyper& hyper) const {
        return mode == Mode::adam ? 1.0 : hyper.lr;
    }
};

// Recover g from the two servers' accumulator shares, dequantize, step the
// model, requantize into both servers, and verify they agree.
void servers_reconstruct_and_apply(protocol::ServerState& s0, protocol::ServerState& s1,
                                   ServerOptimizer& opt);

std::uint64_t table_checksum(const protocol::ServerState& s);

}  // namespace secemb::mf
