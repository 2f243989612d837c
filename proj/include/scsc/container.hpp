#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "scsc/network.hpp"
#include "scsc/tensor.hpp"
#include "scsc/training.hpp"

namespace scsc::io {

enum class Dtype : std::uint8_t { f32 = 0, f64 = 1 };

struct Entry {
    std::string name;
    Dtype dtype = Dtype::f64;
    Tensor tensor;
};

/// Bit-exact little-endian tensor file. Layout: 8-byte magic "SCSCTNS1",
/// u32 entry count, then per entry: u16 name length + UTF-8 name, u8 dtype
/// (0 = f32, 1 = f64), u8 rank, rank x u32 extents, row-major payload.
/// Entry names are unique within a file.
class TensorContainer {
public:
    void add(std::string name, Tensor tensor, Dtype dtype = Dtype::f64);
    bool has(const std::string& name) const;
    const Entry& entry(const std::string& name) const;
    const Tensor& tensor(const std::string& name) const;
    const std::vector<Entry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

    void write_file(const std::string& path) const;
    static TensorContainer read_file(const std::string& path);

private:
    std::vector<Entry> entries_;
};

/// Binary PGM (P5), 16-bit big-endian samples, maxval 65535, values
/// linearly mapped from [0, 1] and clamped. Accepts [M, N] or [1, M, N].
void write_pgm16(const Tensor& image, const std::string& path);

/// Checkpoint: one entry per parameter under its canonical name plus a
/// "config" record. Loading validates names, shapes and the total
/// parameter count.
void save_model(const net::ScscPnnModel& model, const std::string& path);
net::ScscPnnModel load_model(const std::string& path);

/// Dataset: entries sample<i>.H, sample<i>.L_up, sample<i>.P per sample.
void save_dataset(std::span<const train::SamplePair> samples, const std::string& path);
std::vector<train::SamplePair> load_dataset(const std::string& path);

/// Locale-independent shortest round-trip formatting for report files.
std::string format_number(double v);

} // namespace scsc::io
