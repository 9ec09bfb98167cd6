#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace hsiu {

/// Named float32 tensor.
struct WeightTensor {
    std::vector<std::uint32_t> shape;
    std::vector<float> data;

    std::size_t numel() const noexcept;
    friend bool operator==(const WeightTensor&, const WeightTensor&) = default;
};

/// Ordered collection of named parameter tensors, the in-memory form of a UWT1 file.
///
/// Declaration order is preserved so that serialization is stable.
class WeightStore {
public:
    /// Adds a tensor; throws DomainError on duplicate names or shape/data mismatch.
    void add(std::string name, WeightTensor tensor);

    /// Adds a tensor with entries uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
    /// Each tensor draws from its own counter stream keyed on (seed, name).
    void add_uniform(const std::string& name, std::vector<std::uint32_t> shape,
                     std::uint32_t fan_in, std::uint64_t seed);
    void add_constant(const std::string& name, std::vector<std::uint32_t> shape, float value);

    bool contains(const std::string& name) const { return index_.count(name) != 0; }

    /// Throws ShapeError if absent or if `expected_shape` is nonempty and differs.
    const WeightTensor& get(const std::string& name,
                            const std::vector<std::uint32_t>& expected_shape = {}) const;
    WeightTensor& get_mutable(const std::string& name);

    std::span<const float> values(const std::string& name,
                                  const std::vector<std::uint32_t>& expected_shape = {}) const {
        return get(name, expected_shape).data;
    }

    const std::vector<std::string>& names() const noexcept { return order_; }
    std::size_t size() const noexcept { return order_.size(); }

    /// Copies every tensor of `other` whose name is not already present.
    void merge(const WeightStore& other);

    /// Sets every tensor whose name starts with `prefix` to zero.
    void zero_prefix(const std::string& prefix);

    friend bool operator==(const WeightStore&, const WeightStore&) = default;

private:
    std::vector<std::string> order_;
    std::map<std::string, WeightTensor> index_;
};

// UWT1 layout, all little-endian:
//   "UWT1" | u32 record count R
//   R x { u32 name length | name bytes | u32 rank | rank x u32 dims }
//   then, for each record in order, numel f32 values.
std::vector<std::uint8_t> encode_weights(const WeightStore& store);
WeightStore decode_weights(const std::vector<std::uint8_t>& bytes);

void write_weights(const WeightStore& store, const std::filesystem::path& path);
WeightStore read_weights(const std::filesystem::path& path);

}  // namespace hsiu
