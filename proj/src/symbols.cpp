#include "apspec/symbols.hpp"

#include <algorithm>
#include <limits>

#include "apspec/rng.hpp"

namespace apspec {

std::vector<int> SubstitutionRule::apply(const std::vector<int>& word) const {
    std::vector<int> out;
    out.reserve(word.size() * 2);
    for (int s : word) {
        const auto& im = images.at(static_cast<std::size_t>(s));
        out.insert(out.end(), im.begin(), im.end());
    }
    return out;
}

std::vector<int> SubstitutionRule::square_apply(const std::vector<int>& word) const {
    return apply(apply(word));
}

long long SubstitutionRule::supertile_length(int letter, int level) const {
    // Row vector of letter counts, advanced level times.
    std::vector<long long> counts(static_cast<std::size_t>(alphabet), 0);
    counts[static_cast<std::size_t>(letter)] = 1;
    for (int l = 0; l < level; ++l) {
        std::vector<long long> next(static_cast<std::size_t>(alphabet), 0);
        for (int s = 0; s < alphabet; ++s) {
            if (counts[static_cast<std::size_t>(s)] == 0) continue;
            for (int t : images[static_cast<std::size_t>(s)])
                next[static_cast<std::size_t>(t)] += counts[static_cast<std::size_t>(s)];
        }
        counts.swap(next);
    }
    long long total = 0;
    for (long long c : counts) total += c;
    return total;
}

void SubstitutionRule::validate() const {
    if (alphabet < 2) throw InvalidParameter("substitution alphabet too small");
    if (static_cast<int>(images.size()) != alphabet)
        throw InvalidParameter("substitution image count mismatch");
    for (const auto& im : images) {
        if (im.empty()) throw InvalidParameter("empty substitution image");
        for (int s : im)
            if (s < 0 || s >= alphabet)
                throw InvalidParameter("substitution image symbol out of range");
    }
    // Seed consistency for the two-sided fixed point of the square.
    std::vector<int> r = square_apply({right_seed});
    if (r.front() != right_seed)
        throw InvalidParameter("right seed is not a prefix fixed point");
    std::vector<int> l = square_apply({left_seed});
    if (l.back() != left_seed)
        throw InvalidParameter("left seed is not a suffix fixed point");
}

SubstitutionRule fibonacci_rule() {
    SubstitutionRule r;
    r.name = "FIBONACCI";
    r.alphabet = 2;
    r.images = {{0, 1}, {0}}; // a->ab, b->a
    r.right_seed = 0;         // sigma^2(a) = aba
    r.left_seed = 1;          // sigma^2(b) = ab
    r.validate();
    return r;
}

SubstitutionRule thue_morse_rule() {
    SubstitutionRule r;
    r.name = "THUE_MORSE";
    r.alphabet = 2;
    r.images = {{0, 1}, {1, 0}};
    r.right_seed = 0; // sigma^2(0) = 0110
    r.left_seed = 1;  // sigma^2(1) = 1001
    r.validate();
    return r;
}

SubstitutionRule period_doubling_rule() {
    SubstitutionRule r;
    r.name = "PERIOD_DOUBLING";
    r.alphabet = 2;
    r.images = {{0, 1}, {0, 0}}; // a->ab, b->aa
    r.right_seed = 0;            // sigma^2(a) = abaa
    r.left_seed = 1;             // sigma^2(b) = abab
    r.validate();
    return r;
}

FixedPointSource::FixedPointSource(SubstitutionRule rule, long long left_extent,
                                   long long right_extent)
    : SymbolSource(rule.alphabet), rule_(std::move(rule)) {
    rule_.validate();
    if (left_extent < 1 || right_extent < 1)
        throw InvalidParameter("fixed point extents must be positive");

    std::vector<int> right{rule_.right_seed};
    while (static_cast<long long>(right.size()) < right_extent)
        right = rule_.square_apply(right);
    right_.assign(right.begin(), right.end());

    std::vector<int> left{rule_.left_seed};
    while (static_cast<long long>(left.size()) < left_extent)
        left = rule_.square_apply(left);
    // Stored so that left_[j] is the symbol at position -(j+1).
    left_.assign(left.rbegin(), left.rend());
}

HashBernoulliSource::HashBernoulliSource(std::uint64_t seed, double p)
    : SymbolSource(2), seed_(seed), p_(p) {
    if (!(p > 0.0 && p < 1.0))
        throw InvalidParameter("Bernoulli parameter must be in (0,1)");
}

int HashBernoulliSource::symbol(long long pos) const {
    std::uint64_t h = splitmix64(seed_ ^ splitmix64(static_cast<std::uint64_t>(pos) +
                                                    0x9e3779b97f4a7c15ULL));
    double u = static_cast<double>(h >> 11) * 0x1.0p-53;
    return u < p_ ? 1 : 0;
}

long long HashBernoulliSource::min_pos() const {
    return std::numeric_limits<long long>::min() / 2;
}
long long HashBernoulliSource::max_pos() const {
    return std::numeric_limits<long long>::max() / 2;
}

BitCoordSource::BitCoordSource(std::uint64_t seed) : SymbolSource(2), seed_(seed) {
    ensure_bits(128);
}

BitCoordSource::BitCoordSource(const std::vector<int>& pattern)
    : SymbolSource(2), pattern_(pattern) {
    if (pattern_.empty()) throw InvalidParameter("empty digit pattern");
    ensure_bits(128);
}

int BitCoordSource::raw_bit(long long j) const {
    if (!pattern_.empty())
        return pattern_[static_cast<std::size_t>(j % static_cast<long long>(pattern_.size()))] & 1;
    std::uint64_t h = splitmix64(
        seed_ ^ splitmix64(static_cast<std::uint64_t>(j) + 0xd1b54a32d192ed03ULL));
    return static_cast<int>(h & 1u);
}

void BitCoordSource::ensure_bits(long long count) const {
    long long have = static_cast<long long>(words_.size()) * 64;
    if (count <= have) return;
    long long want = std::max(count, 2 * have);
    std::size_t words_needed = static_cast<std::size_t>((want + 63) / 64);
    std::size_t old = words_.size();
    words_.resize(words_needed, 0);
    for (std::size_t w = old; w < words_needed; ++w) {
        std::uint64_t word = 0;
        for (int i = 0; i < 64; ++i) {
            long long j = static_cast<long long>(w) * 64 + i;
            word = (word << 1) | static_cast<std::uint64_t>(raw_bit(j));
        }
        words_[w] = word; // MSB-first: bit j sits at position 63-(j-64w)
    }
}

std::uint64_t BitCoordSource::window64(long long j) const {
    if (j < 0) throw SampleFailure("negative orbit time for a digit stream");
    ensure_bits(j + 128);
    std::size_t w = static_cast<std::size_t>(j >> 6);
    int r = static_cast<int>(j & 63);
    if (r == 0) return words_[w];
    return (words_[w] << r) | (words_[w + 1] >> (64 - r));
}

int BitCoordSource::symbol(long long pos) const {
    if (pos < 1) throw SampleFailure("digit positions start at 1");
    long long j = pos - 1;
    ensure_bits(j + 1);
    std::size_t w = static_cast<std::size_t>(j >> 6);
    int off = static_cast<int>(j & 63);
    return static_cast<int>((words_[w] >> (63 - off)) & 1u);
}

long long BitCoordSource::max_pos() const {
    return std::numeric_limits<long long>::max() / 2;
}

PatchedSource::PatchedSource(std::shared_ptr<const SymbolSource> base,
                             std::vector<std::pair<long long, int>> patches)
    : SymbolSource(base->alphabet()), base_(std::move(base)),
      patches_(std::move(patches)) {}

int PatchedSource::symbol(long long pos) const {
    for (const auto& [p, s] : patches_)
        if (p == pos) return s;
    return base_->symbol(pos);
}

} // namespace apspec
