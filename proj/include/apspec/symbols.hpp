#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "apspec/errors.hpp"

namespace apspec {

// A primitive substitution on the alphabet {0, .., k-1}.
struct SubstitutionRule {
    std::string name;
    int alphabet = 2;
    std::vector<std::vector<int>> images; // images[s] = word replacing s

    // Seeds for the two-sided fixed point of the square of the rule:
    // square(right_seed) starts with right_seed, square(left_seed) ends with
    // left_seed, and (left_seed right_seed) is a legal two-letter word.
    int right_seed = 0;
    int left_seed = 0;

    std::vector<int> apply(const std::vector<int>& word) const;
    std::vector<int> square_apply(const std::vector<int>& word) const;

    // |sigma^level(letter)| from powers of the substitution matrix.
    long long supertile_length(int letter, int level) const;

    void validate() const;
};

SubstitutionRule fibonacci_rule();       // a->ab, b->a
SubstitutionRule thue_morse_rule();      // 0->01, 1->10
SubstitutionRule period_doubling_rule(); // a->ab, b->aa

// Read access to a fixed bi-infinite symbol sequence.  Sources are built
// eagerly for a declared horizon and are immutable afterwards.
class SymbolSource {
  public:
    virtual ~SymbolSource() = default;
    virtual int symbol(long long pos) const = 0;
    virtual long long min_pos() const = 0;
    virtual long long max_pos() const = 0;
    int alphabet() const { return alphabet_; }

  protected:
    explicit SymbolSource(int alphabet) : alphabet_(alphabet) {}
    int alphabet_;
};

// Two-sided fixed point of a primitive substitution, materialised on
// [-left_extent, right_extent).
class FixedPointSource final : public SymbolSource {
  public:
    FixedPointSource(SubstitutionRule rule, long long left_extent,
                     long long right_extent);

    int symbol(long long pos) const override {
        if (pos >= 0) {
            if (pos >= static_cast<long long>(right_.size()))
                throw SampleFailure("symbol position beyond fixed-point horizon");
            return right_[static_cast<std::size_t>(pos)];
        }
        long long j = -pos - 1;
        if (j >= static_cast<long long>(left_.size()))
            throw SampleFailure("symbol position beyond fixed-point horizon");
        return left_[static_cast<std::size_t>(j)];
    }

    long long min_pos() const override {
        return -static_cast<long long>(left_.size());
    }
    long long max_pos() const override {
        return static_cast<long long>(right_.size()) - 1;
    }

    const SubstitutionRule& rule() const { return rule_; }

  private:
    SubstitutionRule rule_;
    std::vector<std::int8_t> right_; // positions 0,1,2,...
    std::vector<std::int8_t> left_;  // positions -1,-2,... (reversed storage)
};

// I.i.d. Bernoulli(p) symbols addressed by position hash; the same (seed,pos)
// always yields the same symbol, so shifting is exact.
class HashBernoulliSource final : public SymbolSource {
  public:
    HashBernoulliSource(std::uint64_t seed, double p);

    int symbol(long long pos) const override;
    long long min_pos() const override;
    long long max_pos() const override;

  private:
    std::uint64_t seed_;
    double p_;
};

// Binary digit stream b_1 b_2 ... together with the real coordinates
// x(t) = 0.b_{t+1} b_{t+2} ...  Backing store for the doubling map: shifting
// the stream doubles the coordinate mod 1 exactly, with no digit loss after
// many iterations.  Digits are materialised lazily in 64-bit words; the lazy
// extension is not synchronised, so pre-extend via ensure_bits before sharing
// a point across threads.
class BitCoordSource final : public SymbolSource {
  public:
    explicit BitCoordSource(std::uint64_t seed);
    // Deterministic digits repeating the given pattern; exact binary rationals
    // (e.g. 1/3 = pattern {0,1}).
    explicit BitCoordSource(const std::vector<int>& pattern);

    int symbol(long long pos) const override; // pos >= 1: digit b_pos
    long long min_pos() const override { return 1; }
    long long max_pos() const override;

    // x(t) = 0.b_{t+1}...b_{t+53}, exact to one ulp of the truncated binary
    // expansion.
    double coordinate(long long t) const {
        std::uint64_t u = window64(t);
        return static_cast<double>(u >> 11) * 0x1.0p-53;
    }

    void ensure_bits(long long count) const;

  private:
    std::uint64_t window64(long long j) const; // bits j .. j+63, MSB-first
    int raw_bit(long long j) const;            // digit generator (0-based)

    std::uint64_t seed_ = 0;
    std::vector<int> pattern_; // empty: hash-addressed digits
    mutable std::vector<std::uint64_t> words_;
};

// A source with finitely many positions overridden; used by tests to build
// controlled nearby pairs for metric and continuity checks.
class PatchedSource final : public SymbolSource {
  public:
    PatchedSource(std::shared_ptr<const SymbolSource> base,
                  std::vector<std::pair<long long, int>> patches);

    int symbol(long long pos) const override;
    long long min_pos() const override { return base_->min_pos(); }
    long long max_pos() const override { return base_->max_pos(); }

  private:
    std::shared_ptr<const SymbolSource> base_;
    std::vector<std::pair<long long, int>> patches_;
};

} // namespace apspec
