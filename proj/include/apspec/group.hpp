#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "apspec/errors.hpp"

namespace apspec {

// The acting group: Z exactly, or R restricted to a uniform grid of step h.
enum class GroupKind { Integer, RealSampled };

inline std::string to_string(GroupKind k) {
    return k == GroupKind::Integer ? "INTEGER" : "REAL_SAMPLED";
}

// A group element is stored as an integer grid index so that addition and
// negation are exact; for RealSampled the value is index*step.
class GroupElement {
  public:
    GroupElement() : kind_(GroupKind::Integer), index_(0), step_(1.0) {}

    static GroupElement integer(long long n) {
        GroupElement t;
        t.kind_ = GroupKind::Integer;
        t.index_ = n;
        t.step_ = 1.0;
        return t;
    }

    static GroupElement real(long long index, double step) {
        if (!(step > 0.0)) throw InvalidParameter("grid step must be positive");
        GroupElement t;
        t.kind_ = GroupKind::RealSampled;
        t.index_ = index;
        t.step_ = step;
        return t;
    }

    // Snaps a real value onto the grid; rejects values off the grid beyond
    // 1e-12 relative tolerance.
    static GroupElement from_value(GroupKind kind, double value, double step) {
        if (kind == GroupKind::Integer) {
            double r = std::round(value);
            if (std::abs(value - r) > 1e-12 * std::max(1.0, std::abs(value)))
                throw GroupMismatch("non-integer value for an integer group");
            return integer(static_cast<long long>(r));
        }
        double q = value / step;
        double r = std::round(q);
        if (std::abs(q - r) > 1e-12 * std::max(1.0, std::abs(q)))
            throw GroupMismatch("value not on the sampling grid");
        return real(static_cast<long long>(r), step);
    }

    GroupKind kind() const { return kind_; }
    long long index() const { return index_; }
    double step() const { return step_; }
    double value() const {
        return kind_ == GroupKind::Integer ? static_cast<double>(index_)
                                           : static_cast<double>(index_) * step_;
    }

    GroupElement operator+(const GroupElement& o) const {
        require_same(o);
        GroupElement t = *this;
        t.index_ += o.index_;
        return t;
    }

    GroupElement operator-(const GroupElement& o) const {
        require_same(o);
        GroupElement t = *this;
        t.index_ -= o.index_;
        return t;
    }

    GroupElement operator-() const {
        GroupElement t = *this;
        t.index_ = -t.index_;
        return t;
    }

    bool operator==(const GroupElement& o) const {
        return kind_ == o.kind_ && index_ == o.index_;
    }

  private:
    void require_same(const GroupElement& o) const {
        if (kind_ != o.kind_)
            throw GroupMismatch("mixing group kinds in arithmetic");
        if (kind_ == GroupKind::RealSampled &&
            std::abs(step_ - o.step_) > 1e-12 * step_)
            throw GroupMismatch("mixing grid steps in arithmetic");
    }

    GroupKind kind_;
    long long index_;
    double step_;
};

// A contiguous, strictly sorted index range [lo, hi] on the group, always
// containing 0.  Symmetric grids (lo == -hi) permit the conjugate/symmetry
// extension used by the profile engine.
struct GroupGrid {
    GroupKind kind = GroupKind::Integer;
    double step = 1.0;     // value spacing; 1 for Integer
    long long lo = 0;
    long long hi = 0;

    static GroupGrid integers(long long lo, long long hi) {
        if (lo > 0 || hi < 0 || lo > hi)
            throw InvalidParameter("grid must contain 0 and satisfy lo<=hi");
        GroupGrid g;
        g.kind = GroupKind::Integer;
        g.step = 1.0;
        g.lo = lo;
        g.hi = hi;
        return g;
    }

    static GroupGrid integers_symmetric(long long T) { return integers(-T, T); }

    static GroupGrid reals(long long lo, long long hi, double h) {
        if (!(h > 0.0)) throw InvalidParameter("grid step must be positive");
        if (lo > 0 || hi < 0 || lo > hi)
            throw InvalidParameter("grid must contain 0 and satisfy lo<=hi");
        GroupGrid g;
        g.kind = GroupKind::RealSampled;
        g.step = h;
        g.lo = lo;
        g.hi = hi;
        return g;
    }

    // Symmetric real grid covering [-T, T] in group units.
    static GroupGrid reals_symmetric(double T, double h) {
        auto n = static_cast<long long>(std::floor(T / h + 1e-9));
        return reals(-n, n, h);
    }

    std::size_t size() const { return static_cast<std::size_t>(hi - lo + 1); }
    bool symmetric() const { return lo == -hi; }
    long long index_at(std::size_t i) const { return lo + static_cast<long long>(i); }
    std::size_t pos_of(long long idx) const {
        if (idx < lo || idx > hi) throw DomainMismatch("index outside grid");
        return static_cast<std::size_t>(idx - lo);
    }
    std::size_t zero_pos() const { return pos_of(0); }
    double value_at(std::size_t i) const {
        return kind == GroupKind::Integer
                   ? static_cast<double>(index_at(i))
                   : static_cast<double>(index_at(i)) * step;
    }
    GroupElement element_at(std::size_t i) const {
        return kind == GroupKind::Integer ? GroupElement::integer(index_at(i))
                                          : GroupElement::real(index_at(i), step);
    }
    bool same_layout(const GroupGrid& o) const {
        return kind == o.kind && lo == o.lo && hi == o.hi &&
               std::abs(step - o.step) <= 1e-12 * step;
    }
};

} // namespace apspec
