#include "secemb/mf.hpp"

#include <cmath>
#include <stdexcept>

namespace secemb::mf {

double predict(const ClientState& client, const std::vector<double>& q_row, double global_mean,
               const MfHyper& hyper) {
    double dot = 0;
    for (std::uint32_t k = 0; k < hyper.embed_dim; ++k) dot += client.p[k] * q_row[k];
    double r = global_mean + client.bias + q_row[hyper.embed_dim] + dot;
    if (hyper.clamp_predictions) r = std::clamp(r, hyper.rating_min, hyper.rating_max);
    return r;
}

LocalUpdate local_train_mf(ClientState& client, const std::vector<std::uint32_t>& items,
                           const std::vector<double>& ratings,
                           const std::unordered_map<std::uint32_t, std::vector<double>>& q_rows,
                           const MfHyper& hyper, double global_mean, double client_scale,
                           double dp_clip) {
    const std::uint32_t d = hyper.embed_dim;
    if (client.p.size() != d) throw std::invalid_argument("local_train_mf: client dim mismatch");
    if (items.size() != ratings.size())
        throw std::invalid_argument("local_train_mf: items/ratings length mismatch");

    // Local working copies of the retrieved rows; deltas leave, copies die.
    std::unordered_map<std::uint32_t, std::vector<double>> work;
    std::unordered_map<std::uint32_t, std::vector<double>> clipped_sum;
    work.reserve(q_rows.size());
    for (std::uint32_t item : items) {
        auto it = q_rows.find(item);
        if (it == q_rows.end()) throw std::invalid_argument("local_train_mf: missing embedding row");
        work.emplace(item, it->second);
        if (dp_clip > 0) clipped_sum.emplace(item, std::vector<double>(d + 1, 0.0));
    }

    std::vector<double> sample_grad(d + 1);
    for (std::uint32_t pass = 0; pass < hyper.local_epochs; ++pass) {
        for (std::size_t idx = 0; idx < items.size(); ++idx) {
            std::vector<double>& q = work[items[idx]];
            double dot = 0;
            for (std::uint32_t k = 0; k < d; ++k) dot += client.p[k] * q[k];
            double pred = global_mean + client.bias + q[d] + dot;
            double e = pred - ratings[idx];

            for (std::uint32_t k = 0; k < d; ++k) {
                double gq = e * client.p[k] + hyper.reg * q[k];
                double gp = e * q[k] + hyper.reg * client.p[k];
                sample_grad[k] = gq;
                q[k] -= hyper.lr * gq;
                client.p[k] -= hyper.lr * gp;
            }
            double gbi = e + hyper.reg * q[d];
            double gbu = e + hyper.reg * client.bias;
            sample_grad[d] = gbi;
            q[d] -= hyper.lr * gbi;
            client.bias -= hyper.lr * gbu;

            if (dp_clip > 0) {
                double sq = 0;
                for (double x : sample_grad) sq += x * x;
                double norm = std::sqrt(sq);
                double s = norm > dp_clip ? dp_clip / norm : 1.0;
                std::vector<double>& acc = clipped_sum[items[idx]];
                for (std::uint32_t k = 0; k <= d; ++k) acc[k] += s * sample_grad[k];
            }
        }
    }

    // Accumulated item-side movement, rescaled to the unit the server expects.
    const double scale = client_scale / (hyper.lr * hyper.local_epochs);
    const double dp_scale = client_scale / hyper.local_epochs;
    LocalUpdate out;
    out.items.reserve(items.size());
    for (std::uint32_t item : items) {
        bool dup = false;
        for (std::uint32_t seen : out.items) dup = dup || (seen == item);
        if (dup) continue;
        std::vector<double> row(d + 1);
        if (dp_clip > 0) {
            const std::vector<double>& acc = clipped_sum.at(item);
            for (std::uint32_t k = 0; k <= d; ++k) row[k] = acc[k] * dp_scale;
        } else {
            const std::vector<double>& orig = q_rows.at(item);
            const std::vector<double>& fin = work.at(item);
            for (std::uint32_t k = 0; k <= d; ++k) row[k] = (orig[k] - fin[k]) * scale;
        }
        out.items.push_back(item);
        out.rows.push_back(std::move(row));
    }
    return out;
}

namespace {

void adam_step(std::vector<double>& m1, std::vector<double>& v1, const std::vector<double>& g,
               std::vector<double>& delta, const ServerOptimizer& opt) {
    const double bc1 = 1.0 - std::pow(opt.beta1, static_cast<double>(opt.step));
    const double bc2 = 1.0 - std::pow(opt.beta2, static_cast<double>(opt.step));
    for (std::size_t i = 0; i < g.size(); ++i) {
        m1[i] = opt.beta1 * m1[i] + (1 - opt.beta1) * g[i];
        v1[i] = opt.beta2 * v1[i] + (1 - opt.beta2) * g[i] * g[i];
        double mh = m1[i] / bc1;
        double vh = v1[i] / bc2;
        delta[i] = opt.lr * mh / (std::sqrt(vh) + opt.eps);
    }
}

}  // namespace

void servers_reconstruct_and_apply(protocol::ServerState& s0, protocol::ServerState& s1,
                                   ServerOptimizer& opt) {
    protocol::Aggregates agg = protocol::reconstruct_aggregates(s0, s1);
    const RingParams& ring = s0.params.ring;

    if (agg.users == 0) {
        // Nothing uploaded this round; just clear round state.
        protocol::sync_servers(s0, s1, s0.table, s0.theta);
        return;
    }

    const double denom =
        (opt.mode == ServerOptimizer::Mode::sum_sgd) ? 1.0 : static_cast<double>(agg.users);

    // Range instrumentation: clipped per-user inputs cannot wrap the ring.
    const double round_bound = static_cast<double>(agg.users) * s0.params.user_range() + 1.0;

    std::vector<double> g_table(agg.table.size()), g_theta(agg.theta.size());
    for (std::size_t i = 0; i < agg.table.size(); ++i) {
        double g = dequantize(ring, agg.table[i]);
        if (std::abs(g) > round_bound)
            throw std::overflow_error("servers_reconstruct_and_apply: aggregate out of range");
        g_table[i] = g / denom;
    }
    for (std::size_t i = 0; i < agg.theta.size(); ++i)
        g_theta[i] = dequantize(ring, agg.theta[i]) / denom;

    std::vector<double> d_table, d_theta;
    if (opt.mode == ServerOptimizer::Mode::adam) {
        opt.m1.resize(g_table.size(), 0.0);
        opt.v1.resize(g_table.size(), 0.0);
        opt.m1_theta.resize(g_theta.size(), 0.0);
        opt.v1_theta.resize(g_theta.size(), 0.0);
        opt.step += 1;
        d_table.resize(g_table.size());
        d_theta.resize(g_theta.size());
        adam_step(opt.m1, opt.v1, g_table, d_table, opt);
        adam_step(opt.m1_theta, opt.v1_theta, g_theta, d_theta, opt);
    } else {
        d_table = std::move(g_table);
        d_theta = std::move(g_theta);
    }

    std::vector<std::uint64_t> new_table(s0.table.size()), new_theta(s0.theta.size());
    for (std::size_t i = 0; i < new_table.size(); ++i)
        new_table[i] = quantize(ring, dequantize(ring, s0.table[i] & ring.mask()) - d_table[i]);
    for (std::size_t i = 0; i < new_theta.size(); ++i)
        new_theta[i] = quantize(ring, dequantize(ring, s0.theta[i] & ring.mask()) - d_theta[i]);

    protocol::sync_servers(s0, s1, new_table, new_theta);
}

std::uint64_t table_checksum(const protocol::ServerState& s) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&](std::uint64_t v) {
        h ^= v;
        h *= 1099511628211ULL;
    };
    const std::uint64_t mask = s.params.ring.mask();
    for (std::uint64_t v : s.table) mix(v & mask);
    for (std::uint64_t v : s.theta) mix(v & mask);
    return h;
}

}  // namespace secemb::mf
