#pragma once

#include <array>
#include <memory>
#include <utility>
#include <variant>

#include "apspec/errors.hpp"
#include "apspec/symbols.hpp"

namespace apspec {

// Coordinates on a torus of dimension dim (each entry in [0,1)); dim == 0 is
// the one-point space.
struct ToralCoords {
    int dim = 1;
    std::array<double, 4> c{0.0, 0.0, 0.0, 0.0};
};

inline double wrap_unit(double x) {
    double r = x - std::floor(x);
    return r < 1.0 ? r : 0.0; // floor rounding can land exactly on 1.0
}

// Distance to the nearest integer.
inline double torus_distance(double a, double b) {
    double d = std::abs(a - b);
    d -= std::floor(d);
    return d <= 0.5 ? d : 1.0 - d;
}

// A shift-space point: a fixed symbol source observed from a movable origin.
// The group action only changes the offset, so acting is exact.
struct SymbolicPoint {
    std::shared_ptr<const SymbolSource> source;
    long long offset = 0;

    int at(long long k) const { return source->symbol(offset + k); }
};

struct SystemPoint;
using ProductPair = std::shared_ptr<const std::pair<SystemPoint, SystemPoint>>;

struct SystemPoint {
    std::variant<ToralCoords, SymbolicPoint, ProductPair> rep;

    SystemPoint() : rep(ToralCoords{}) {}
    explicit SystemPoint(ToralCoords t) : rep(std::move(t)) {}
    explicit SystemPoint(SymbolicPoint s) : rep(std::move(s)) {}
    explicit SystemPoint(ProductPair p) : rep(std::move(p)) {}

    static SystemPoint product(SystemPoint a, SystemPoint b) {
        return SystemPoint(std::make_shared<const std::pair<SystemPoint, SystemPoint>>(
            std::move(a), std::move(b)));
    }

    const ToralCoords& toral() const {
        if (const auto* t = std::get_if<ToralCoords>(&rep)) return *t;
        throw DomainMismatch("expected a toral point");
    }
    const SymbolicPoint& symbolic() const {
        if (const auto* s = std::get_if<SymbolicPoint>(&rep)) return *s;
        throw DomainMismatch("expected a symbolic point");
    }
    const std::pair<SystemPoint, SystemPoint>& parts() const {
        if (const auto* p = std::get_if<ProductPair>(&rep)) return **p;
        throw DomainMismatch("expected a product point");
    }
};

// Cylinder distance 2^-min{k>=0 : x_k != y_k or x_-k != y_-k}, truncated at
// window radius K; agreement across the whole window counts as 0.
inline double cylinder_distance(const SymbolicPoint& x, const SymbolicPoint& y,
                                int window_radius) {
    if (x.source.get() == y.source.get() && x.offset == y.offset) return 0.0;
    for (int k = 0; k <= window_radius; ++k) {
        if (x.at(k) != y.at(k) || x.at(-k) != y.at(-k))
            return std::ldexp(1.0, -k);
    }
    return 0.0;
}

} // namespace apspec
