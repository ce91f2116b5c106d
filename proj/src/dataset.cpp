#include "secemb/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <unordered_set>

namespace secemb::data {

Dataset load_movielens(const std::string& path, bool expect_ml100k) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_movielens: cannot open " + path);

    Dataset ds;
    std::string line;
    std::size_t lineno = 0;
    std::uint32_t max_user = 0, max_item = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        unsigned long u, i;
        double r;
        unsigned long long ts;
        if (std::sscanf(line.c_str(), "%lu %lu %lf %llu", &u, &i, &r, &ts) != 4 || u == 0 || i == 0)
            throw std::runtime_error("load_movielens: parse error at line " +
                                     std::to_string(lineno));
        RatingRecord rec{static_cast<std::uint32_t>(u - 1), static_cast<std::uint32_t>(i - 1), r,
                         static_cast<std::uint64_t>(ts)};
        max_user = std::max(max_user, rec.user);
        max_item = std::max(max_item, rec.item);
        ds.ratings.push_back(rec);
    }
    ds.n_users = max_user + 1;
    ds.n_items = max_item + 1;

    if (expect_ml100k &&
        (ds.n_users != 943 || ds.n_items != 1682 || ds.ratings.size() != 100000))
        throw std::runtime_error("load_movielens: file does not match ML100K statistics");
    return ds;
}

void split_train_test(Rng& rng, Dataset& ds, double train_fraction) {
    if (!(train_fraction >= 0.0 && train_fraction <= 1.0))
        throw std::invalid_argument("split_train_test: fraction out of [0,1]");

    // Group rating positions per user, then hold out a random tail per user.
    std::vector<std::vector<std::uint32_t>> per_user(ds.n_users);
    for (std::uint32_t idx = 0; idx < ds.ratings.size(); ++idx)
        per_user[ds.ratings[idx].user].push_back(idx);

    ds.in_train.assign(ds.ratings.size(), 1);
    for (auto& positions : per_user) {
        const std::size_t n = positions.size();
        if (n == 0) continue;
        auto n_train = static_cast<std::size_t>(std::llround(train_fraction * n));
        for (std::size_t i = 0; i + 1 < n; ++i) {
            auto j = i + static_cast<std::size_t>(rng.below(n - i));
            std::swap(positions[i], positions[j]);
        }
        for (std::size_t i = n_train; i < n; ++i) ds.in_train[positions[i]] = 0;
    }
}

namespace {

std::vector<UserRatings> by_user(const Dataset& ds, std::uint8_t want) {
    if (!ds.has_split()) throw std::logic_error("dataset: split not performed");
    std::vector<UserRatings> out(ds.n_users);
    for (std::size_t i = 0; i < ds.ratings.size(); ++i) {
        if (ds.in_train[i] != want) continue;
        const RatingRecord& r = ds.ratings[i];
        out[r.user].items.push_back(r.item);
        out[r.user].values.push_back(r.rating);
    }
    return out;
}

}  // namespace

std::vector<UserRatings> train_by_user(const Dataset& ds) { return by_user(ds, 1); }
std::vector<UserRatings> test_by_user(const Dataset& ds) { return by_user(ds, 0); }

double global_train_mean(const Dataset& ds) {
    if (!ds.has_split()) throw std::logic_error("dataset: split not performed");
    double sum = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < ds.ratings.size(); ++i) {
        if (!ds.in_train[i]) continue;
        sum += ds.ratings[i].rating;
        ++n;
    }
    return n ? sum / static_cast<double>(n) : 0.0;
}

Dataset make_synthetic(const SyntheticSpec& spec) {
    Rng rng = derive_rng(spec.seed, StreamPurpose::synthetic_data);

    std::vector<std::vector<double>> pu(spec.n_users), qi(spec.n_items);
    std::vector<double> bu(spec.n_users), bi(spec.n_items);
    const double fac = 1.0 / std::sqrt(static_cast<double>(spec.latent_dim));
    for (auto& v : pu) {
        v.resize(spec.latent_dim);
        for (auto& x : v) x = rng.next_gaussian() * fac;
    }
    for (auto& v : qi) {
        v.resize(spec.latent_dim);
        for (auto& x : v) x = rng.next_gaussian() * fac;
    }
    for (auto& x : bu) x = rng.next_gaussian() * 0.4;
    for (auto& x : bi) x = rng.next_gaussian() * 0.4;

    // Item popularity follows a Zipf-ish law so the rated-count distribution
    // is long-tailed like the MovieLens files.
    std::vector<double> cum(spec.n_items);
    double acc = 0;
    for (std::uint32_t i = 0; i < spec.n_items; ++i) {
        acc += 1.0 / std::pow(static_cast<double>(i + 1), 0.8);
        cum[i] = acc;
    }

    Dataset ds;
    ds.n_users = spec.n_users;
    ds.n_items = spec.n_items;
    ds.ratings.reserve(spec.n_ratings);
    std::vector<std::unordered_set<std::uint32_t>> seen(spec.n_users);

    // Every user gets a floor of ratings; the rest follow user activity.
    const std::uint32_t floor_per_user = 10;
    auto draw_item = [&](Rng& r) {
        double x = r.next_double01() * acc;
        auto it = std::lower_bound(cum.begin(), cum.end(), x);
        return static_cast<std::uint32_t>(it - cum.begin());
    };
    auto push = [&](std::uint32_t u) {
        for (int attempt = 0; attempt < 64; ++attempt) {
            std::uint32_t item = draw_item(rng);
            if (!seen[u].insert(item).second) continue;
            double mean = 3.6 + bu[u] + bi[item];
            for (std::uint32_t k = 0; k < spec.latent_dim; ++k) mean += pu[u][k] * qi[item][k];
            double noisy = mean + rng.next_gaussian() * spec.noise_sigma;
            double star = std::clamp(std::round(noisy), 1.0, 5.0);
            ds.ratings.push_back({u, item, star, ds.ratings.size()});
            return;
        }
    };

    for (std::uint32_t u = 0; u < spec.n_users; ++u)
        for (std::uint32_t k = 0; k < floor_per_user; ++k) push(u);
    while (ds.ratings.size() < spec.n_ratings)
        push(static_cast<std::uint32_t>(rng.below(spec.n_users)));

    return ds;
}

}  // namespace secemb::data
