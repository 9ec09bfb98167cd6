#include "hsiu/weights.hpp"

#include <cmath>
#include <cstring>
#include <functional>
#include <numeric>

#include "hsiu/cube_io.hpp"
#include "hsiu/errors.hpp"
#include "hsiu/rng.hpp"

namespace hsiu {

namespace {

std::string dims_string(const std::vector<std::uint32_t>& dims) {
    std::string s = "[";
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(dims[i]);
    }
    return s + "]";
}

std::size_t product(const std::vector<std::uint32_t>& dims) {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

constexpr char kMagic[4] = {'U', 'W', 'T', '1'};

class Reader {
public:
    explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

    std::uint32_t u32(const char* what) {
        need(4, what);
        const std::uint32_t v = le::get_u32(bytes_.data() + pos_);
        pos_ += 4;
        return v;
    }
    std::string text(std::size_t n, const char* what) {
        need(n, what);
        std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
        pos_ += n;
        return s;
    }
    float f32(const char* what) {
        need(4, what);
        const float v = le::get_f32(bytes_.data() + pos_);
        pos_ += 4;
        return v;
    }
    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    void need(std::size_t n, const char* what) {
        if (bytes_.size() - pos_ < n) {
            throw FormatError(std::string("UWT1: truncated while reading ") + what + " at byte " +
                              std::to_string(pos_));
        }
    }

    const std::vector<std::uint8_t>& bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

std::size_t WeightTensor::numel() const noexcept { return product(shape); }

void WeightStore::add(std::string name, WeightTensor tensor) {
    if (name.empty()) throw DomainError("weight name must be nonempty");
    if (index_.count(name)) throw DomainError("duplicate weight '" + name + "'");
    if (tensor.numel() != tensor.data.size()) {
        throw DomainError("weight '" + name + "' shape " + dims_string(tensor.shape) +
                          " does not match " + std::to_string(tensor.data.size()) + " values");
    }
    order_.push_back(name);
    index_.emplace(std::move(name), std::move(tensor));
}

void WeightStore::add_uniform(const std::string& name, std::vector<std::uint32_t> shape,
                              std::uint32_t fan_in, std::uint64_t seed) {
    if (fan_in == 0) throw DomainError("weight '" + name + "': fan_in must be positive");
    const double bound = 1.0 / std::sqrt(double(fan_in));
    const std::uint64_t stream = rng::fnv1a(name);
    WeightTensor t{std::move(shape), {}};
    t.data.resize(t.numel());
    for (std::size_t i = 0; i < t.data.size(); ++i) {
        t.data[i] = static_cast<float>(bound * (2.0 * rng::uniform(seed, stream, i) - 1.0));
    }
    add(name, std::move(t));
}

void WeightStore::add_constant(const std::string& name, std::vector<std::uint32_t> shape,
                               float value) {
    WeightTensor t{std::move(shape), {}};
    t.data.assign(t.numel(), value);
    add(name, std::move(t));
}

const WeightTensor& WeightStore::get(const std::string& name,
                                     const std::vector<std::uint32_t>& expected_shape) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw ShapeError("missing weight '" + name + "'");
    if (!expected_shape.empty() && it->second.shape != expected_shape) {
        throw ShapeError("weight '" + name + "' has shape " + dims_string(it->second.shape) +
                         ", expected " + dims_string(expected_shape));
    }
    return it->second;
}

WeightTensor& WeightStore::get_mutable(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end()) throw ShapeError("missing weight '" + name + "'");
    return it->second;
}

void WeightStore::merge(const WeightStore& other) {
    for (const auto& name : other.order_) {
        if (!contains(name)) add(name, other.index_.at(name));
    }
}

void WeightStore::zero_prefix(const std::string& prefix) {
    for (auto& [name, tensor] : index_) {
        if (name.compare(0, prefix.size(), prefix) == 0) {
            std::fill(tensor.data.begin(), tensor.data.end(), 0.0f);
        }
    }
}

std::vector<std::uint8_t> encode_weights(const WeightStore& store) {
    std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
    le::put_u32(out, static_cast<std::uint32_t>(store.size()));
    for (const auto& name : store.names()) {
        const auto& t = store.get(name);
        le::put_u32(out, static_cast<std::uint32_t>(name.size()));
        out.insert(out.end(), name.begin(), name.end());
        le::put_u32(out, static_cast<std::uint32_t>(t.shape.size()));
        for (auto d : t.shape) le::put_u32(out, d);
    }
    for (const auto& name : store.names()) {
        for (float v : store.get(name).data) {
            if (!std::isfinite(v)) throw FormatError("UWT1: weight '" + name + "' is not finite");
            le::put_f32(out, v);
        }
    }
    return out;
}

WeightStore decode_weights(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw FormatError("UWT1: bad magic");
    }
    const std::vector<std::uint8_t> body(bytes.begin() + 4, bytes.end());
    Reader in(body);
    const std::uint32_t count = in.u32("record count");
    std::vector<std::pair<std::string, std::vector<std::uint32_t>>> manifest;
    for (std::uint32_t r = 0; r < count; ++r) {
        const std::uint32_t len = in.u32("name length");
        std::string name = in.text(len, "name");
        const std::uint32_t rank = in.u32("rank");
        std::vector<std::uint32_t> dims(rank);
        for (auto& d : dims) d = in.u32("dims");
        manifest.emplace_back(std::move(name), std::move(dims));
    }
    std::size_t payload = 0;
    for (const auto& rec : manifest) payload += product(rec.second);
    if (in.remaining() != 4 * payload) {
        throw FormatError("UWT1: payload size mismatch, expected " + std::to_string(4 * payload) +
                          " bytes, got " + std::to_string(in.remaining()));
    }
    WeightStore store;
    for (auto& [name, dims] : manifest) {
        WeightTensor t{dims, std::vector<float>(product(dims))};
        for (float& v : t.data) {
            v = in.f32("payload");
            if (!std::isfinite(v)) throw FormatError("UWT1: weight '" + name + "' is not finite");
        }
        store.add(name, std::move(t));
    }
    return store;
}

void write_weights(const WeightStore& store, const std::filesystem::path& path) {
    le::write_file(path, encode_weights(store));
}

WeightStore read_weights(const std::filesystem::path& path) {
    return decode_weights(le::read_file(path));
}

}  // namespace hsiu
