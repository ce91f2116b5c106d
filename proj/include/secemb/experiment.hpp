#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "secemb/dataset.hpp"
#include "secemb/dp.hpp"
#include "secemb/ledger.hpp"
#include "secemb/mf.hpp"
#include "secemb/protocol.hpp"

namespace secemb::exp {

struct ExperimentConfig {
    std::string dataset_path;            // empty: synthetic dataset
    std::string dataset_name = "synthetic";
    data::SyntheticSpec synthetic;
    protocol::Variant variant = protocol::Variant::final_opt;
    mf::MfHyper hyper;
    RingParams ring{32, 16};
    mf::ServerOptimizer::Mode optimizer = mf::ServerOptimizer::Mode::mean_sgd;
    double train_fraction = 0.8;
    double dropout = 0.0;          // fraction of retrieval-round users lost before upload
    bool dp_enabled = false;
    dp::DpConfig dp;
    bool cache_paths = false;      // keep full-domain leaves between the two stages
    bool record_payloads = false;  // retain round messages for schema validation
    std::uint32_t eval_every = 10;
    double target_rmse = 0.0;      // early stop once reached (0 = never)
    std::uint32_t patience = 0;    // stop after this many evals without improvement (0 = never)
    std::string out_dir;

    void validate() const;
};

// One captured wire message (only when record_payloads is set).
struct CapturedMessage {
    std::uint32_t client;
    std::uint8_t server;
    ledger::Stage stage;
    ledger::Direction dir;
    wire::MessageType type;
    std::vector<std::uint8_t> frame;
};

struct World {
    ExperimentConfig cfg;
    data::Dataset ds;
    double global_mean = 0.0;
    std::vector<data::UserRatings> train;
    std::vector<data::UserRatings> test;
    protocol::ProtocolParams params;
    protocol::ServerState server0;
    protocol::ServerState server1;
    std::vector<mf::ClientState> clients;
    mf::ServerOptimizer optimizer;
    ledger::MessageLedger ledger;
    std::uint32_t round = 0;
    std::vector<CapturedMessage> last_round_messages;
    double last_secret_gen_seconds = 0.0;  // client-side key generation time, most recent round
};

World make_world(const ExperimentConfig& cfg);

// Execute one federated round: sample clients, retrieval, local training,
// upload (minus dropouts), reconstruction, model step.
void run_round(World& world);

double evaluate_rmse(const World& world);

// Structural privacy checks over one round's captured messages: uniform
// message shapes independent of the true rated count, only the allowed
// message types, decodable key material. Throws on violation.
void validate_round_messages(const World& world);

struct EvalPoint {
    std::uint32_t round;
    double rmse;
    double up_mb_per_user;
    double down_mb_per_user;
};

struct Report {
    ExperimentConfig cfg;
    std::vector<EvalPoint> curve;
    double final_rmse = 0.0;
    std::uint32_t rounds_run = 0;
    double avg_up_mb_per_user = 0.0;
    double avg_down_mb_per_user = 0.0;
    double avg_up_info_mb_per_user = 0.0;
    double avg_down_info_mb_per_user = 0.0;
    // Cost-model comparison against the full-download/dense-upload baseline.
    double baseline_up_mb_per_user = 0.0;
    double baseline_down_mb_per_user = 0.0;
    double upload_reduction_ratio = 0.0;
    double download_reduction_ratio = 0.0;

    std::string to_csv() const;
    std::string to_json() const;
};

Report run_experiment(const ExperimentConfig& cfg);

// Parse a JSON config file (missing fields keep defaults).
ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& cfg);

}  // namespace secemb::exp
