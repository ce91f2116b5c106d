#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "secemb/dpf.hpp"
#include "secemb/experiment.hpp"

namespace {

using namespace secemb;

double now_s() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

int cmd_dpf_bench(std::uint32_t bench_bits, std::uint32_t bench_keys) {
    RingParams ring{32, 16};
    Rng rng(42);

    // Correctness sweep over small domains.
    for (std::uint32_t n = 1; n <= 10; ++n) {
        const std::uint64_t dom = 1ULL << n;
        RingVector beta(ring, 3);
        for (auto& e : beta.elems) e = rng.next_u64() & ring.mask();
        std::uint64_t alpha = rng.below(dom);
        auto [k0, k1] = dpf::gen(rng, n, alpha, beta);
        for (std::uint64_t x = 0; x < dom; ++x) {
            RingVector sum = ring_vec_add(dpf::eval(k0, x), dpf::eval(k1, x));
            for (std::size_t c = 0; c < sum.size(); ++c) {
                std::uint64_t want = (x == alpha) ? beta.elems[c] : 0;
                if (sum.elems[c] != want) {
                    std::fprintf(stderr, "dpf-bench: correctness failure at n=%u x=%llu\n", n,
                                 static_cast<unsigned long long>(x));
                    return 1;
                }
            }
        }
    }
    std::printf("correctness sweep n=1..10: ok\n");

    // Key sizes, measured bytes against the closed-form bit count.
    std::printf("%4s %6s %14s %16s %14s\n", "n", "L", "formula bits", "formula bytes",
                "measured B");
    for (std::uint32_t n : {1u, 8u, 11u, 16u, 20u}) {
        for (std::size_t L : {std::size_t{1}, std::size_t{65}}) {
            std::uint64_t bits = dpf::key_info_bits(n, L, ring);
            std::size_t measured = dpf::key_wire_size(n, L, ring);
            std::printf("%4u %6zu %14llu %16.2f %14zu\n", n, L,
                        static_cast<unsigned long long>(bits), bits / 8.0, measured);
        }
    }

    // Full-domain evaluation throughput.
    const std::uint32_t n = bench_bits;
    RingVector beta(ring, 1);
    beta.elems[0] = 1;
    auto [k0, k1] = dpf::gen(rng, n, rng.below(1ULL << n), beta);
    dpf::FullDomain fd;
    prg::reset_expand_count();
    double t0 = now_s();
    for (std::uint32_t i = 0; i < bench_keys; ++i) dpf::eval_full_domain_into(k0.path, fd);
    double dt = now_s() - t0;
    std::printf("full-domain eval: n=%u keys=%u  %.1f keys/s  (%llu PRG expands, %.2f per leaf)\n",
                n, bench_keys, bench_keys / dt,
                static_cast<unsigned long long>(prg::expand_count()),
                static_cast<double>(prg::expand_count()) / (static_cast<double>(bench_keys) * (1ULL << n)));
    return 0;
}

exp::ExperimentConfig build_config(const std::string& config_path, const std::string& variant,
                                   std::int64_t seed, const std::string& out_dir, bool dp,
                                   double dropout) {
    exp::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = exp::load_config(config_path);
    if (!variant.empty()) {
        auto v = protocol::parse_variant(variant);
        if (!v) throw CLI::ValidationError("--variant", "unknown variant " + variant);
        cfg.variant = *v;
    }
    if (seed >= 0) cfg.hyper.seed = static_cast<std::uint64_t>(seed);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (dp) cfg.dp_enabled = true;
    if (dropout >= 0) cfg.dropout = dropout;
    return cfg;
}

int cmd_simulate(const exp::ExperimentConfig& cfg) {
    exp::Report rep = exp::run_experiment(cfg);
    std::printf("variant=%s rounds=%u rmse=%.4f up=%.4f MB/user down=%.4f MB/user\n",
                protocol::variant_name(cfg.variant).c_str(), rep.rounds_run, rep.final_rmse,
                rep.avg_up_mb_per_user, rep.avg_down_mb_per_user);
    if (!cfg.out_dir.empty())
        std::printf("wrote %s/report.csv and %s/summary.json\n", cfg.out_dir.c_str(),
                    cfg.out_dir.c_str());
    return 0;
}

int cmd_ablation(exp::ExperimentConfig base) {
    struct Row {
        std::string name;
        double up_mb;
        double gen_ms;
    };
    std::vector<Row> rows;
    for (protocol::Variant v :
         {protocol::Variant::init, protocol::Variant::rowenc, protocol::Variant::final_opt}) {
        exp::ExperimentConfig cfg = base;
        cfg.variant = v;
        cfg.hyper.rounds = 1;
        cfg.eval_every = 0;
        cfg.out_dir.clear();
        exp::World w = exp::make_world(cfg);
        exp::run_round(w);
        ledger::Totals t = w.ledger.round_totals(0);
        double up_mb = ledger::to_mb(t.up_bytes) / cfg.hyper.clients_per_round;
        double gen_ms = 1000.0 * w.last_secret_gen_seconds / cfg.hyper.clients_per_round;
        rows.push_back({protocol::variant_name(v), up_mb, gen_ms});
    }
    std::printf("%-8s %16s %20s\n", "variant", "upload MB/user", "secret gen ms/user");
    for (const Row& r : rows) std::printf("%-8s %16.4f %20.3f\n", r.name.c_str(), r.up_mb, r.gen_ms);

    const bool size_order = rows[0].up_mb > rows[1].up_mb && rows[1].up_mb > rows[2].up_mb;
    const bool time_order = rows[0].gen_ms > rows[1].gen_ms && rows[1].gen_ms >= rows[2].gen_ms;
    std::printf("upload ordering init > rowenc > final: %s\n", size_order ? "ok" : "VIOLATED");
    std::printf("gen-time ordering init > rowenc >= final: %s\n", time_order ? "ok" : "VIOLATED");
    return size_order ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SecEmb: sparsity-aware secure federated recommender simulator"};
    app.require_subcommand(1);

    std::string config_path, variant, out_dir;
    std::int64_t seed = -1;
    bool dp = false;
    double dropout = -1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON experiment config");
        sub->add_option("--seed", seed, "master seed");
        sub->add_option("--variant", variant, "final|rowenc|init|baseline|plaintext");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_flag("--dp", dp, "enable differential privacy");
        sub->add_option("--dropout", dropout, "fraction of users lost before upload");
    };

    CLI::App* sim = app.add_subcommand("simulate", "run one experiment and write reports");
    add_common(sim);

    CLI::App* abl = app.add_subcommand("ablation", "compare init/rowenc/final on one config");
    add_common(abl);

    std::uint32_t bench_bits = 11, bench_keys = 64;
    CLI::App* bench = app.add_subcommand("dpf-bench", "key correctness, sizes and throughput");
    bench->add_option("--bits", bench_bits, "domain bits")->check(CLI::Range(1, 24));
    bench->add_option("--keys", bench_keys, "keys to evaluate");

    CLI11_PARSE(app, argc, argv);

    try {
        if (bench->parsed()) return cmd_dpf_bench(bench_bits, bench_keys);
        exp::ExperimentConfig cfg = build_config(config_path, variant, seed, out_dir, dp, dropout);
        if (sim->parsed()) return cmd_simulate(cfg);
        if (abl->parsed()) return cmd_ablation(cfg);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
