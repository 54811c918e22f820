#pragma once

#include <cstddef>
#include <vector>

namespace coral {

struct RowScore {
    double score = 0.0;
    std::size_t row = 0;

    bool operator==(const RowScore&) const = default;
};

// (score desc, row asc): a strict total order since rows are unique.
bool row_score_better(const RowScore& a, const RowScore& b);

// Dot product with serial double accumulation. Both kernels score every row
// with this exact loop, which keeps their outputs bit-identical.
double dot_f32(const float* a, const float* b, std::size_t dim);

// Exact top-k rows of `matrix` (row-major rows x dim) by dot product with
// `query`. Serial reference implementation.
std::vector<RowScore> topk_dot_serial(const float* matrix, std::size_t rows, std::size_t dim,
                                      const float* query, std::size_t k);

// OpenMP kernel: rows are scored in parallel, per-thread candidates merged
// serially. Falls back to the serial kernel when built without OpenMP.
std::vector<RowScore> topk_dot_parallel(const float* matrix, std::size_t rows, std::size_t dim,
                                        const float* query, std::size_t k);

} // namespace coral
