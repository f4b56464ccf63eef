#include "hankelrec/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

namespace hankelrec::fft {

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

} // namespace

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) {
        p <<= 1;
    }
    return p;
}

Buffer::Buffer(std::size_t size) : size_(size) {
    data_ = reinterpret_cast<cplx*>(fftw_malloc(sizeof(fftw_complex) * std::max<std::size_t>(size, 1)));
    if (data_ == nullptr) {
        throw ResourceError("fftw_malloc failed");
    }
}

Buffer::~Buffer() {
    if (data_ != nullptr) {
        fftw_free(data_);
    }
}

Buffer::Buffer(Buffer&& other) noexcept
    : data_(std::exchange(other.data_, nullptr)), size_(std::exchange(other.size_, 0)) {}

Buffer& Buffer::operator=(Buffer&& other) noexcept {
    if (this != &other) {
        if (data_ != nullptr) {
            fftw_free(data_);
        }
        data_ = std::exchange(other.data_, nullptr);
        size_ = std::exchange(other.size_, 0);
    }
    return *this;
}

void Buffer::zero() { std::fill(data_, data_ + size_, cplx{0.0, 0.0}); }

Plan::Plan(std::vector<int> dims) : dims_(std::move(dims)) {
    size_ = 1;
    for (int d : dims_) {
        size_ *= static_cast<std::size_t>(d);
    }
    Buffer scratch(size_);
    auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
    const int rank = static_cast<int>(dims_.size());
    std::lock_guard<std::mutex> lock(planner_mutex());
    fwd_ = fftw_plan_dft(rank, dims_.data(), p, p, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft(rank, dims_.data(), p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (fwd_ == nullptr || bwd_ == nullptr) {
        throw ResourceError("FFTW planning failed");
    }
}

Plan::~Plan() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (fwd_ != nullptr) {
        fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
    }
    if (bwd_ != nullptr) {
        fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
    }
}

void Plan::forward(Buffer& buf) const {
    auto* p = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_execute_dft(static_cast<fftw_plan>(fwd_), p, p);
}

void Plan::backward(Buffer& buf) const {
    auto* p = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_execute_dft(static_cast<fftw_plan>(bwd_), p, p);
}

const Plan& plan_for(std::span<const int> dims) {
    static std::mutex cache_mutex;
    // Intentionally leaked: plans must outlive every static that may run a
    // transform during shutdown.
    static auto& cache = *new std::map<std::vector<int>, std::unique_ptr<Plan>>();
    std::vector<int> key(dims.begin(), dims.end());
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto it = cache.find(key);
    if (it == cache.end()) {
        it = cache.emplace(key, std::make_unique<Plan>(key)).first;
    }
    return *it->second;
}

} // namespace hankelrec::fft
