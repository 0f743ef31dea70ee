#pragma once

#include "aggstream/error.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

namespace aggstream {

/// Little-endian append-only byte buffer for model files.
class BinaryWriter {
public:
    void u8(uint8_t v) { bytes_.push_back(v); }
    void u16(uint16_t v) { raw(&v, sizeof v); }
    void u32(uint32_t v) { raw(&v, sizeof v); }
    void u64(uint64_t v) { raw(&v, sizeof v); }
    void i32(int32_t v) { raw(&v, sizeof v); }
    void i64(int64_t v) { raw(&v, sizeof v); }
    void f64(double v) {
        uint64_t bits = std::bit_cast<uint64_t>(v);
        raw(&bits, sizeof bits);
    }
    void str(const std::string& s) {
        u32(static_cast<uint32_t>(s.size()));
        bytes_.insert(bytes_.end(), s.begin(), s.end());
    }

    const std::vector<uint8_t>& bytes() const { return bytes_; }
    std::vector<uint8_t> take() { return std::move(bytes_); }

private:
    void raw(const void* p, size_t n) {
        const auto* b = static_cast<const uint8_t*>(p);
        bytes_.insert(bytes_.end(), b, b + n);
    }

    std::vector<uint8_t> bytes_;
};

/// Bounds-checked reader; throws DecodeError on truncation.
class BinaryReader {
public:
    explicit BinaryReader(std::span<const uint8_t> bytes) : bytes_(bytes) {}

    uint8_t u8() { return take_raw<uint8_t>(); }
    uint16_t u16() { return take_raw<uint16_t>(); }
    uint32_t u32() { return take_raw<uint32_t>(); }
    uint64_t u64() { return take_raw<uint64_t>(); }
    int32_t i32() { return take_raw<int32_t>(); }
    int64_t i64() { return take_raw<int64_t>(); }
    double f64() { return std::bit_cast<double>(take_raw<uint64_t>()); }
    std::string str() {
        uint32_t n = u32();
        require(n);
        std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
        pos_ += n;
        return s;
    }

    size_t remaining() const { return bytes_.size() - pos_; }
    bool at_end() const { return pos_ == bytes_.size(); }

private:
    void require(size_t n) const {
        if (bytes_.size() - pos_ < n) throw DecodeError("truncated model payload");
    }
    template <typename T>
    T take_raw() {
        require(sizeof(T));
        T v;
        std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }

    std::span<const uint8_t> bytes_;
    size_t pos_ = 0;
};

} // namespace aggstream
