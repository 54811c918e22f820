#include <doctest/doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "coral/topk.hpp"

using namespace coral;

namespace {

// Independent oracle: score every row, full sort, prefix.
std::vector<RowScore> brute_force(const std::vector<float>& matrix, std::size_t rows,
                                  std::size_t dim, const std::vector<float>& query,
                                  std::size_t k) {
    std::vector<RowScore> all;
    all.reserve(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        double acc = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            acc += static_cast<double>(matrix[r * dim + i]) * static_cast<double>(query[i]);
        }
        all.push_back({acc, r});
    }
    std::stable_sort(all.begin(), all.end(), [](const RowScore& a, const RowScore& b) {
        if (a.score != b.score) {
            return a.score > b.score;
        }
        return a.row < b.row;
    });
    if (all.size() > k) {
        all.resize(k);
    }
    return all;
}

std::vector<float> random_matrix(std::mt19937& rng, std::size_t rows, std::size_t dim) {
    std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
    std::vector<float> m(rows * dim);
    for (auto& x : m) {
        x = dist(rng);
    }
    return m;
}

} // namespace

TEST_CASE("serial kernel matches the brute-force oracle") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t rows = 1 + rng() % 300;
        const std::size_t dim = 1 + rng() % 48;
        const std::size_t k = 1 + rng() % 12;
        auto matrix = random_matrix(rng, rows, dim);
        auto query = random_matrix(rng, 1, dim);
        auto got = topk_dot_serial(matrix.data(), rows, dim, query.data(), k);
        auto want = brute_force(matrix, rows, dim, query, k);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i].row == want[i].row);
            CHECK(got[i].score == want[i].score);
        }
    }
}

TEST_CASE("parallel kernel is bit-identical to serial") {
    std::mt19937 rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t rows = 1 + rng() % 2000;
        const std::size_t dim = 1 + rng() % 64;
        const std::size_t k = 1 + rng() % 20;
        auto matrix = random_matrix(rng, rows, dim);
        auto query = random_matrix(rng, 1, dim);
        auto serial = topk_dot_serial(matrix.data(), rows, dim, query.data(), k);
        auto parallel = topk_dot_parallel(matrix.data(), rows, dim, query.data(), k);
        CHECK(serial == parallel);
    }
}

TEST_CASE("ties break by ascending row") {
    // All rows identical: scores tie exactly, so rows 0..k-1 win in order.
    const std::size_t rows = 10, dim = 4, k = 3;
    std::vector<float> matrix(rows * dim, 0.5f);
    std::vector<float> query(dim, 1.0f);
    auto got = topk_dot_parallel(matrix.data(), rows, dim, query.data(), k);
    REQUIRE(got.size() == 3);
    CHECK(got[0].row == 0);
    CHECK(got[1].row == 1);
    CHECK(got[2].row == 2);
}

TEST_CASE("k larger than rows returns all rows") {
    const std::size_t rows = 4, dim = 2;
    std::vector<float> matrix{1, 0, 0, 1, -1, 0, 0.5f, 0.5f};
    std::vector<float> query{1, 0};
    auto got = topk_dot_serial(matrix.data(), rows, dim, query.data(), 100);
    REQUIRE(got.size() == 4);
    CHECK(got[0].row == 0);
    CHECK(got[3].row == 2);
}

TEST_CASE("top-k is a prefix of top-(k+1)") {
    std::mt19937 rng(99);
    auto matrix = random_matrix(rng, 500, 16);
    auto query = random_matrix(rng, 1, 16);
    for (std::size_t k = 1; k < 12; ++k) {
        auto a = topk_dot_serial(matrix.data(), 500, 16, query.data(), k);
        auto b = topk_dot_serial(matrix.data(), 500, 16, query.data(), k + 1);
        REQUIRE(b.size() >= a.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i] == b[i]);
        }
    }
}

TEST_CASE("empty inputs") {
    std::vector<float> query{1.0f};
    CHECK(topk_dot_serial(nullptr, 0, 1, query.data(), 5).empty());
    CHECK(topk_dot_parallel(nullptr, 0, 1, query.data(), 5).empty());
}
