#pragma once

// Thin RAII layer over FFTW for the power-of-two transforms used by the
// Hankel operators.  Plans are created once per shape with FFTW_ESTIMATE
// (deterministic algorithm choice) and are immutable afterwards, so they may
// be executed concurrently on distinct buffers.

#include <cstddef>
#include <span>
#include <vector>

#include "hankelrec/common.hpp"

namespace hankelrec::fft {

std::size_t next_pow2(std::size_t n);

/// fftw_malloc-backed complex buffer.
class Buffer {
public:
    Buffer() = default;
    explicit Buffer(std::size_t size);
    ~Buffer();
    Buffer(const Buffer&) = delete;
    Buffer& operator=(const Buffer&) = delete;
    Buffer(Buffer&& other) noexcept;
    Buffer& operator=(Buffer&& other) noexcept;

    cplx* data() { return data_; }
    const cplx* data() const { return data_; }
    std::size_t size() const { return size_; }
    cplx& operator[](std::size_t i) { return data_[i]; }
    const cplx& operator[](std::size_t i) const { return data_[i]; }
    void zero();

private:
    cplx* data_ = nullptr;
    std::size_t size_ = 0;
};

/// In-place forward/backward transform pair for a fixed row-major shape.
class Plan {
public:
    explicit Plan(std::vector<int> dims);
    ~Plan();
    Plan(const Plan&) = delete;
    Plan& operator=(const Plan&) = delete;

    std::size_t size() const { return size_; }
    const std::vector<int>& dims() const { return dims_; }

    void forward(Buffer& buf) const;
    /// Unnormalised inverse transform.
    void backward(Buffer& buf) const;

private:
    std::vector<int> dims_;
    std::size_t size_ = 0;
    void* fwd_ = nullptr;
    void* bwd_ = nullptr;
};

/// Process-wide plan cache.  Returned references stay valid for the
/// lifetime of the program.
const Plan& plan_for(std::span<const int> dims);

} // namespace hankelrec::fft
