#include "scsc/container.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>

namespace scsc::io {

namespace {

constexpr char kMagic[8] = {'S', 'C', 'S', 'C', 'T', 'N', 'S', '1'};

void put_bytes(std::string& buf, const void* data, std::size_t n) {
    buf.append(static_cast<const char*>(data), n);
}

void put_u16(std::string& buf, std::uint16_t v) {
    const unsigned char b[2] = {(unsigned char)(v & 0xff), (unsigned char)(v >> 8)};
    put_bytes(buf, b, 2);
}

void put_u32(std::string& buf, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = (unsigned char)((v >> (8 * i)) & 0xff);
    put_bytes(buf, b, 4);
}

void put_u64(std::string& buf, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = (unsigned char)((v >> (8 * i)) & 0xff);
    put_bytes(buf, b, 8);
}

struct Reader {
    const unsigned char* p;
    const unsigned char* end;

    void need(std::size_t n) const {
        if (std::size_t(end - p) < n) throw IoError("tensor container: truncated file");
    }
    std::uint16_t u16() {
        need(2);
        std::uint16_t v = std::uint16_t(p[0] | (p[1] << 8));
        p += 2;
        return v;
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t(p[i]) << (8 * i);
        p += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t(p[i]) << (8 * i);
        p += 8;
        return v;
    }
    std::uint8_t u8() {
        need(1);
        return *p++;
    }
    std::string bytes(std::size_t n) {
        need(n);
        std::string s(reinterpret_cast<const char*>(p), n);
        p += n;
        return s;
    }
};

} // namespace

void TensorContainer::add(std::string name, Tensor tensor, Dtype dtype) {
    if (name.empty() || name.size() > 0xffff) {
        throw IoError("tensor container: invalid entry name");
    }
    if (has(name)) throw IoError("tensor container: duplicate entry name '" + name + "'");
    entries_.push_back(Entry{std::move(name), dtype, std::move(tensor)});
}

bool TensorContainer::has(const std::string& name) const {
    return std::any_of(entries_.begin(), entries_.end(),
                       [&](const Entry& e) { return e.name == name; });
}

const Entry& TensorContainer::entry(const std::string& name) const {
    for (const Entry& e : entries_) {
        if (e.name == name) return e;
    }
    throw IoError("tensor container: no entry named '" + name + "'");
}

const Tensor& TensorContainer::tensor(const std::string& name) const {
    return entry(name).tensor;
}

void TensorContainer::write_file(const std::string& path) const {
    std::string buf;
    put_bytes(buf, kMagic, 8);
    put_u32(buf, std::uint32_t(entries_.size()));
    for (const Entry& e : entries_) {
        put_u16(buf, std::uint16_t(e.name.size()));
        put_bytes(buf, e.name.data(), e.name.size());
        buf.push_back(char(e.dtype));
        buf.push_back(char(e.tensor.rank()));
        for (std::size_t axis = 0; axis < e.tensor.rank(); ++axis) {
            put_u32(buf, std::uint32_t(e.tensor.extent(axis)));
        }
        if (e.dtype == Dtype::f64) {
            for (double v : e.tensor.values()) put_u64(buf, std::bit_cast<std::uint64_t>(v));
        } else {
            for (double v : e.tensor.values()) {
                put_u32(buf, std::bit_cast<std::uint32_t>(float(v)));
            }
        }
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out.write(buf.data(), std::streamsize(buf.size()));
    if (!out) throw IoError("write to '" + path + "' failed");
}

TensorContainer TensorContainer::read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    Reader r{reinterpret_cast<const unsigned char*>(buf.data()),
             reinterpret_cast<const unsigned char*>(buf.data()) + buf.size()};

    if (r.bytes(8) != std::string(kMagic, 8)) {
        throw IoError("'" + path + "' is not a tensor container (bad magic)");
    }
    const std::uint32_t count = r.u32();
    TensorContainer c;
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::uint16_t name_len = r.u16();
        std::string name = r.bytes(name_len);
        const std::uint8_t dt = r.u8();
        if (dt > 1) throw IoError("tensor container: unknown dtype code");
        const std::uint8_t rank = r.u8();
        if (rank < 1 || rank > 4) throw IoError("tensor container: rank out of range");
        Shape shape(rank);
        for (std::uint8_t axis = 0; axis < rank; ++axis) {
            shape[axis] = r.u32();
            if (shape[axis] == 0) throw IoError("tensor container: zero extent");
        }
        std::size_t numel = 1;
        for (auto e : shape) numel *= e;
        std::vector<double> values(numel);
        if (Dtype(dt) == Dtype::f64) {
            for (double& v : values) v = std::bit_cast<double>(r.u64());
        } else {
            for (double& v : values) v = double(std::bit_cast<float>(r.u32()));
        }
        c.add(std::move(name), Tensor::from_data(std::move(shape), std::move(values)),
              Dtype(dt));
    }
    if (r.p != r.end) throw IoError("tensor container: trailing bytes after last entry");
    return c;
}

void write_pgm16(const Tensor& image, const std::string& path) {
    const Tensor* img = &image;
    Tensor squeezed;
    if (image.rank() == 3) {
        if (image.extent(0) != 1) {
            throw DimensionError("write_pgm16: expected a single band");
        }
        squeezed = Tensor::from_data(Shape{image.extent(1), image.extent(2)},
                                     std::vector<double>(image.values().begin(),
                                                         image.values().end()));
        img = &squeezed;
    } else if (image.rank() != 2) {
        throw DimensionError("write_pgm16: expected rank 2 or [1, M, N]");
    }
    std::string buf = "P5\n" + std::to_string(img->extent(1)) + " " +
                      std::to_string(img->extent(0)) + "\n65535\n";
    for (double v : img->values()) {
        const double clamped = std::clamp(v, 0.0, 1.0);
        const auto q = std::uint16_t(std::lround(clamped * 65535.0));
        buf.push_back(char(q >> 8)); // network byte order per the PGM spec
        buf.push_back(char(q & 0xff));
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out.write(buf.data(), std::streamsize(buf.size()));
    if (!out) throw IoError("write to '" + path + "' failed");
}

void save_model(const net::ScscPnnModel& model, const std::string& path) {
    TensorContainer c;
    const auto& cfg = model.config;
    c.add("config",
          Tensor::from_data(Shape{5}, {double(cfg.pan_bands), double(cfg.ms_bands),
                                       double(cfg.filters), double(cfg.kernel_size),
                                       double(cfg.blocks)}));
    net::visit_components(
        const_cast<net::ScscPnnModel&>(model),
        [&](const std::string& name, const FilterBank& bank) {
            c.add(name, bank.kernels());
        },
        [&](const std::string& name, const net::ThresholdVector& gamma) {
            c.add(name, Tensor::from_data(Shape{gamma.size()}, gamma.values));
        });
    c.write_file(path);
}

net::ScscPnnModel load_model(const std::string& path) {
    const TensorContainer c = TensorContainer::read_file(path);
    const Tensor& cfg_t = c.tensor("config");
    if (cfg_t.rank() != 1 || cfg_t.numel() != 5) {
        throw IoError("checkpoint: malformed config record");
    }
    net::ModelConfig cfg;
    cfg.pan_bands = std::size_t(cfg_t[0]);
    cfg.ms_bands = std::size_t(cfg_t[1]);
    cfg.filters = std::size_t(cfg_t[2]);
    cfg.kernel_size = std::size_t(cfg_t[3]);
    cfg.blocks = std::size_t(cfg_t[4]);
    cfg.validate();

    net::ScscPnnModel model = net::make_model(cfg);
    long long loaded = 0;
    net::visit_components(
        model,
        [&](const std::string& name, FilterBank& bank) {
            const Tensor& t = c.tensor(name);
            if (t.shape() != bank.kernels().shape()) {
                throw IoError("checkpoint: entry '" + name + "' has the wrong shape");
            }
            bank.kernels() = t;
            loaded += (long long)t.numel();
        },
        [&](const std::string& name, net::ThresholdVector& gamma) {
            const Tensor& t = c.tensor(name);
            if (t.rank() != 1 || t.numel() != gamma.size()) {
                throw IoError("checkpoint: entry '" + name + "' has the wrong shape");
            }
            gamma.values.assign(t.values().begin(), t.values().end());
            loaded += (long long)t.numel();
        });
    if (loaded != net::count_params(cfg)) {
        throw IoError("checkpoint: parameter count does not match the config");
    }
    if (c.size() != std::size_t(1) + 3 * (3 * cfg.blocks + 2) + 3) {
        throw IoError("checkpoint: unexpected entry count");
    }
    return model;
}

namespace {

std::string sample_name(std::size_t i, const char* field) {
    return "sample" + std::to_string(i) + "." + field;
}

} // namespace

void save_dataset(std::span<const train::SamplePair> samples, const std::string& path) {
    TensorContainer c;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        c.add(sample_name(i, "H"), samples[i].hrms);
        c.add(sample_name(i, "L_up"), samples[i].lrms_up);
        c.add(sample_name(i, "P"), samples[i].pan);
    }
    c.write_file(path);
}

std::vector<train::SamplePair> load_dataset(const std::string& path) {
    const TensorContainer c = TensorContainer::read_file(path);
    if (c.size() % 3 != 0) throw IoError("dataset: entry count is not a multiple of 3");
    std::vector<train::SamplePair> samples(c.size() / 3);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        samples[i].hrms = c.tensor(sample_name(i, "H"));
        samples[i].lrms_up = c.tensor(sample_name(i, "L_up"));
        samples[i].pan = c.tensor(sample_name(i, "P"));
    }
    return samples;
}

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

} // namespace scsc::io
