#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace relflow {

// Row-major 32-bit float matrix. This is the storage type for encoded record
// matrices, model parameters and checkpoint tensors; reductions over it are
// accumulated in 64 bits.
struct Tensor2 {
    int rows = 0;
    int cols = 0;
    std::vector<float> v;

    Tensor2() = default;
    Tensor2(int r, int c) : rows(r), cols(c), v(static_cast<size_t>(r) * c, 0.0f) {}

    float& at(int r, int c) { return v[static_cast<size_t>(r) * cols + c]; }
    float at(int r, int c) const { return v[static_cast<size_t>(r) * cols + c]; }
    size_t size() const { return v.size(); }

    bool same_shape(const Tensor2& o) const { return rows == o.rows && cols == o.cols; }

    void fill(float x) { std::fill(v.begin(), v.end(), x); }

    bool all_finite() const;
};

// Little-endian binary IO used by the checkpoint container.
void write_u32(std::ostream& os, uint32_t x);
void write_u64(std::ostream& os, uint64_t x);
void write_f32(std::ostream& os, float x);
uint32_t read_u32(std::istream& is);
uint64_t read_u64(std::istream& is);
float read_f32(std::istream& is);
void write_tensor(std::ostream& os, const std::string& name, const Tensor2& t);

}  // namespace relflow
