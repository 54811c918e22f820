#include "coral/topk.hpp"

#include <algorithm>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace coral {

bool row_score_better(const RowScore& a, const RowScore& b) {
    if (a.score != b.score) {
        return a.score > b.score;
    }
    return a.row < b.row;
}

double dot_f32(const float* a, const float* b, std::size_t dim) {
    double acc = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    }
    return acc;
}

namespace {

// Keeps the k best candidates in heap order; worst kept element at the front.
class TopKHeap {
  public:
    explicit TopKHeap(std::size_t k) : k_(k) { heap_.reserve(k); }

    void offer(const RowScore& c) {
        if (heap_.size() < k_) {
            heap_.push_back(c);
            std::push_heap(heap_.begin(), heap_.end(), row_score_better);
        } else if (row_score_better(c, heap_.front())) {
            std::pop_heap(heap_.begin(), heap_.end(), row_score_better);
            heap_.back() = c;
            std::push_heap(heap_.begin(), heap_.end(), row_score_better);
        }
    }

    std::vector<RowScore> sorted() && {
        std::sort(heap_.begin(), heap_.end(), row_score_better);
        return std::move(heap_);
    }

    std::vector<RowScore>& raw() { return heap_; }

  private:
    std::size_t k_;
    std::vector<RowScore> heap_;
};

} // namespace

std::vector<RowScore> topk_dot_serial(const float* matrix, std::size_t rows, std::size_t dim,
                                      const float* query, std::size_t k) {
    if (k == 0 || rows == 0) {
        return {};
    }
    TopKHeap heap(k);
    for (std::size_t r = 0; r < rows; ++r) {
        heap.offer({dot_f32(matrix + r * dim, query, dim), r});
    }
    return std::move(heap).sorted();
}

std::vector<RowScore> topk_dot_parallel(const float* matrix, std::size_t rows, std::size_t dim,
                                        const float* query, std::size_t k) {
#ifndef _OPENMP
    return topk_dot_serial(matrix, rows, dim, query, k);
#else
    if (k == 0 || rows == 0) {
        return {};
    }
    std::vector<std::vector<RowScore>> local;
#pragma omp parallel
    {
#pragma omp single
        local.resize(static_cast<std::size_t>(omp_get_num_threads()));
        TopKHeap heap(k);
#pragma omp for schedule(static)
        for (long long r = 0; r < static_cast<long long>(rows); ++r) {
            const auto row = static_cast<std::size_t>(r);
            heap.offer({dot_f32(matrix + row * dim, query, dim), row});
        }
        local[static_cast<std::size_t>(omp_get_thread_num())] = std::move(heap.raw());
    }
    TopKHeap merged(k);
    for (const auto& cands : local) {
        for (const auto& c : cands) {
            merged.offer(c);
        }
    }
    return std::move(merged).sorted();
#endif
}

} // namespace coral
