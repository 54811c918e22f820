// Compares the serial and OpenMP top-k kernels on random unit rows.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "coral/topk.hpp"

using namespace coral;

namespace {

std::vector<float> random_unit_rows(std::mt19937& rng, std::size_t rows, std::size_t dim) {
    std::normal_distribution<float> dist(0.0f, 1.0f);
    std::vector<float> m(rows * dim);
    for (std::size_t r = 0; r < rows; ++r) {
        double sq = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            m[r * dim + i] = dist(rng);
            sq += double(m[r * dim + i]) * m[r * dim + i];
        }
        const float inv = static_cast<float>(1.0 / std::sqrt(sq));
        for (std::size_t i = 0; i < dim; ++i) {
            m[r * dim + i] *= inv;
        }
    }
    return m;
}

double bench(const char* name,
             std::vector<RowScore> (*kernel)(const float*, std::size_t, std::size_t, const float*,
                                             std::size_t),
             const std::vector<float>& matrix, std::size_t rows, std::size_t dim,
             const std::vector<float>& query, std::size_t k, int reps) {
    // Warm-up.
    auto result = kernel(matrix.data(), rows, dim, query.data(), k);
    auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) {
        result = kernel(matrix.data(), rows, dim, query.data(), k);
    }
    auto stop = std::chrono::steady_clock::now();
    const double ms =
        std::chrono::duration_cast<std::chrono::microseconds>(stop - start).count() / 1000.0 /
        reps;
    std::printf("  %-10s %10.3f ms/query   (top score %.6f, row %zu)\n", name, ms,
                result.empty() ? 0.0 : result[0].score, result.empty() ? 0 : result[0].row);
    return ms;
}

} // namespace

int main(int argc, char** argv) {
    std::size_t rows = 200000;
    std::size_t dim = 256;
    std::size_t k = 5;
    int reps = 20;
    if (argc > 1) rows = std::strtoull(argv[1], nullptr, 10);
    if (argc > 2) dim = std::strtoull(argv[2], nullptr, 10);
    if (argc > 3) k = std::strtoull(argv[3], nullptr, 10);
    if (argc > 4) reps = std::atoi(argv[4]);

    std::printf("top-k kernel benchmark: rows=%zu dim=%zu k=%zu reps=%d\n", rows, dim, k, reps);
    std::mt19937 rng(1234);
    auto matrix = random_unit_rows(rng, rows, dim);
    auto query = random_unit_rows(rng, 1, dim);

    const double serial_ms = bench("serial", topk_dot_serial, matrix, rows, dim, query, k, reps);
    const double parallel_ms =
        bench("openmp", topk_dot_parallel, matrix, rows, dim, query, k, reps);

    auto a = topk_dot_serial(matrix.data(), rows, dim, query.data(), k);
    auto b = topk_dot_parallel(matrix.data(), rows, dim, query.data(), k);
    std::printf("  identical results: %s\n", a == b ? "yes" : "NO");
    if (parallel_ms > 0) {
        std::printf("  speedup: %.2fx\n", serial_ms / parallel_ms);
    }
    return a == b ? 0 : 1;
}
