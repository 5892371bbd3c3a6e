#include "relflow/tensor.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace relflow {

bool Tensor2::all_finite() const {
    for (float x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint IO assumes a little-endian host");

template <typename T>
void write_raw(std::ostream& os, T x) {
    os.write(reinterpret_cast<const char*>(&x), sizeof x);
}

template <typename T>
T read_raw(std::istream& is) {
    T x{};
    is.read(reinterpret_cast<char*>(&x), sizeof x);
    if (!is) throw std::runtime_error("unexpected end of checkpoint stream");
    return x;
}

}  // namespace

void write_u32(std::ostream& os, uint32_t x) { write_raw(os, x); }
void write_u64(std::ostream& os, uint64_t x) { write_raw(os, x); }
void write_f32(std::ostream& os, float x) { write_raw(os, x); }
uint32_t read_u32(std::istream& is) { return read_raw<uint32_t>(is); }
uint64_t read_u64(std::istream& is) { return read_raw<uint64_t>(is); }
float read_f32(std::istream& is) { return read_raw<float>(is); }

void write_tensor(std::ostream& os, const std::string& name, const Tensor2& t) {
    write_u32(os, static_cast<uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_u32(os, static_cast<uint32_t>(t.rows));
    write_u32(os, static_cast<uint32_t>(t.cols));
    os.write(reinterpret_cast<const char*>(t.v.data()),
             static_cast<std::streamsize>(t.v.size() * sizeof(float)));
}

}  // namespace relflow
