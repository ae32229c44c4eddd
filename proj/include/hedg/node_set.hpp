#pragma once

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <vector>

namespace hedg {

// Graphs address their nodes by dense indices 0..n-1 (canonical label order).
// A NodeSet is a fixed-capacity bitset over those indices; it is a cheap value
// type so set algebra in the separation and order searches stays allocation-free.
inline constexpr std::size_t kMaxNodes = 256;

class NodeSet {
public:
    static constexpr std::size_t kWords = kMaxNodes / 64;

    NodeSet() = default;
    NodeSet(std::initializer_list<std::size_t> idx) {
        for (auto i : idx) set(i);
    }

    static NodeSet range(std::size_t n) {
        NodeSet s;
        for (std::size_t w = 0; w < kWords && n > 0; ++w) {
            if (n >= 64) {
                s.words_[w] = ~std::uint64_t{0};
                n -= 64;
            } else {
                s.words_[w] = (std::uint64_t{1} << n) - 1;
                n = 0;
            }
        }
        return s;
    }
    static NodeSet single(std::size_t i) {
        NodeSet s;
        s.set(i);
        return s;
    }

    void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
    void reset(std::size_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
    bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }
    bool contains(std::size_t i) const { return i < kMaxNodes && test(i); }

    bool empty() const {
        for (auto w : words_)
            if (w) return false;
        return true;
    }
    std::size_t size() const {
        std::size_t c = 0;
        for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }
    // Index of the lowest member; kMaxNodes when empty.
    std::size_t first() const { return next(0); }
    // Lowest member >= i; kMaxNodes when there is none.
    std::size_t next(std::size_t i) const {
        if (i >= kMaxNodes) return kMaxNodes;
        std::size_t w = i >> 6;
        std::uint64_t bits = words_[w] & (~std::uint64_t{0} << (i & 63));
        while (true) {
            if (bits) return (w << 6) + static_cast<std::size_t>(std::countr_zero(bits));
            if (++w == kWords) return kMaxNodes;
            bits = words_[w];
        }
    }

    bool subset_of(const NodeSet& o) const {
        for (std::size_t w = 0; w < kWords; ++w)
            if (words_[w] & ~o.words_[w]) return false;
        return true;
    }
    bool intersects(const NodeSet& o) const {
        for (std::size_t w = 0; w < kWords; ++w)
            if (words_[w] & o.words_[w]) return true;
        return false;
    }

    NodeSet& operator|=(const NodeSet& o) {
        for (std::size_t w = 0; w < kWords; ++w) words_[w] |= o.words_[w];
        return *this;
    }
    NodeSet& operator&=(const NodeSet& o) {
        for (std::size_t w = 0; w < kWords; ++w) words_[w] &= o.words_[w];
        return *this;
    }
    NodeSet& operator-=(const NodeSet& o) {
        for (std::size_t w = 0; w < kWords; ++w) words_[w] &= ~o.words_[w];
        return *this;
    }
    friend NodeSet operator|(NodeSet a, const NodeSet& b) { return a |= b; }
    friend NodeSet operator&(NodeSet a, const NodeSet& b) { return a &= b; }
    friend NodeSet operator-(NodeSet a, const NodeSet& b) { return a -= b; }

    friend bool operator==(const NodeSet&, const NodeSet&) = default;
    // Canonical order: compare the sorted member lists lexicographically.
    friend bool operator<(const NodeSet& a, const NodeSet& b) {
        std::size_t i = a.first(), j = b.first();
        while (i != kMaxNodes && j != kMaxNodes) {
            if (i != j) return i < j;
            i = a.next(i + 1);
            j = b.next(j + 1);
        }
        return i == kMaxNodes && j != kMaxNodes;
    }

    std::vector<std::size_t> members() const {
        std::vector<std::size_t> out;
        for (auto i = first(); i != kMaxNodes; i = next(i + 1)) out.push_back(i);
        return out;
    }

    template <class F>
    void for_each(F&& f) const {
        for (auto i = first(); i != kMaxNodes; i = next(i + 1)) f(i);
    }

    std::size_t hash() const {
        std::size_t h = 0;
        for (auto w : words_) h = h * 1000003U ^ std::hash<std::uint64_t>{}(w);
        return h;
    }

    // Low 64 bits, convenient for enumerating subsets of small ground sets.
    std::uint64_t low_word() const { return words_[0]; }
    static NodeSet from_low_word(std::uint64_t w) {
        NodeSet s;
        s.words_[0] = w;
        return s;
    }

private:
    std::array<std::uint64_t, kWords> words_{};
};

struct NodeSetHash {
    std::size_t operator()(const NodeSet& s) const { return s.hash(); }
};

}  // namespace hedg
