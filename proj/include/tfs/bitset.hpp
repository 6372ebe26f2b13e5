// tfs/bitset.hpp - bit sets over a fixed universe
#pragma once

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace tfs
{

/// Bit set over a fixed universe [0, size). Used for species sets and for
/// rows of the subsumption closure. Binary operations require both operands
/// to share the same universe size.
class Bitset
{
public:
  Bitset() = default;

  explicit Bitset(std::size_t nbits) : size_(nbits), blocks_((nbits + 63) / 64, 0) {}

  static Bitset of(std::size_t nbits, std::initializer_list<std::size_t> bits)
  {
    Bitset b(nbits);
    for (auto i : bits) b.set(i);
    return b;
  }

  [[nodiscard]] std::size_t size() const { return size_; }

  void set(std::size_t i)
  {
    assert(i < size_);
    blocks_[i >> 6] |= (std::uint64_t{1} << (i & 63));
  }

  void reset(std::size_t i)
  {
    assert(i < size_);
    blocks_[i >> 6] &= ~(std::uint64_t{1} << (i & 63));
  }

  [[nodiscard]] bool test(std::size_t i) const
  {
    assert(i < size_);
    return (blocks_[i >> 6] >> (i & 63)) & 1;
  }

  [[nodiscard]] std::size_t count() const
  {
    std::size_t n = 0;
    for (auto b : blocks_) n += static_cast<std::size_t>(__builtin_popcountll(b));
    return n;
  }

  [[nodiscard]] bool any() const
  {
    for (auto b : blocks_)
      if (b != 0) return true;
    return false;
  }

  [[nodiscard]] bool none() const { return !any(); }

  [[nodiscard]] bool is_singleton() const { return count() == 1; }

  /// Index of the lowest set bit; size() when empty.
  [[nodiscard]] std::size_t first() const
  {
    for (std::size_t w = 0; w < blocks_.size(); ++w) {
      if (blocks_[w] != 0) {
        return (w << 6) + static_cast<std::size_t>(__builtin_ctzll(blocks_[w]));
      }
    }
    return size_;
  }

  [[nodiscard]] std::vector<std::uint32_t> members() const
  {
    std::vector<std::uint32_t> out;
    out.reserve(count());
    for (std::size_t w = 0; w < blocks_.size(); ++w) {
      std::uint64_t b = blocks_[w];
      while (b != 0) {
        const auto bit = static_cast<std::size_t>(__builtin_ctzll(b));
        out.push_back(static_cast<std::uint32_t>((w << 6) + bit));
        b &= b - 1;
      }
    }
    return out;
  }

  Bitset& operator&=(const Bitset& o)
  {
    assert(size_ == o.size_);
    for (std::size_t w = 0; w < blocks_.size(); ++w) blocks_[w] &= o.blocks_[w];
    return *this;
  }

  Bitset& operator|=(const Bitset& o)
  {
    assert(size_ == o.size_);
    for (std::size_t w = 0; w < blocks_.size(); ++w) blocks_[w] |= o.blocks_[w];
    return *this;
  }

  [[nodiscard]] bool subset_of(const Bitset& o) const
  {
    assert(size_ == o.size_);
    for (std::size_t w = 0; w < blocks_.size(); ++w) {
      if ((blocks_[w] & ~o.blocks_[w]) != 0) return false;
    }
    return true;
  }

  [[nodiscard]] bool intersects(const Bitset& o) const
  {
    assert(size_ == o.size_);
    for (std::size_t w = 0; w < blocks_.size(); ++w) {
      if ((blocks_[w] & o.blocks_[w]) != 0) return true;
    }
    return false;
  }

  friend Bitset operator&(Bitset a, const Bitset& b)
  {
    a &= b;
    return a;
  }

  friend Bitset operator|(Bitset a, const Bitset& b)
  {
    a |= b;
    return a;
  }

  friend bool operator==(const Bitset& a, const Bitset& b)
  {
    return a.size_ == b.size_ && a.blocks_ == b.blocks_;
  }

  friend bool operator!=(const Bitset& a, const Bitset& b) { return !(a == b); }

private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> blocks_;
};

} // namespace tfs
