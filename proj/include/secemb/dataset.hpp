#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "secemb/rng.hpp"

namespace secemb::data {

struct RatingRecord {
    std::uint32_t user;
    std::uint32_t item;
    double rating;
    std::uint64_t timestamp;
};

struct Dataset {
    std::uint32_t n_users = 0;
    std::uint32_t n_items = 0;
    std::vector<RatingRecord> ratings;
    // Parallel to `ratings` after split_train_test: 1 = train, 0 = test.
    std::vector<std::uint8_t> in_train;

    bool has_split() const { return in_train.size() == ratings.size(); }
};

// u.data layout: user<TAB>item<TAB>rating<TAB>timestamp with 1-based ids.
// Ids are reindexed to 0-based; when `expect_ml100k` the known table sizes
// are enforced.
Dataset load_movielens(const std::string& path, bool expect_ml100k = false);

// Per-user random split; deterministic under the seed.
void split_train_test(Rng& rng, Dataset& ds, double train_fraction = 0.8);

// Per-user views of the split.
struct UserRatings {
    std::vector<std::uint32_t> items;
    std::vector<double> values;
};
std::vector<UserRatings> train_by_user(const Dataset& ds);
std::vector<UserRatings> test_by_user(const Dataset& ds);

double global_train_mean(const Dataset& ds);

// Planted-model synthetic dataset with MovieLens-like shape: biased latent
// factors plus noise, ratings rounded to the 1..5 star grid. Used where no
// real data file is available.
struct SyntheticSpec {
    std::uint32_t n_users = 943;
    std::uint32_t n_items = 1682;
    std::uint32_t n_ratings = 100000;
    std::uint32_t latent_dim = 8;
    double noise_sigma = 0.55;
    std::uint64_t seed = 7;
};
Dataset make_synthetic(const SyntheticSpec& spec);

}  // namespace secemb::data
