#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "apspec/group.hpp"
#include "apspec/observable.hpp"
#include "apspec/point.hpp"

namespace apspec {

enum class SpectralType { Discrete, Mixed, Continuous, Unknown };

std::string to_string(SpectralType t);

// Construction request for a catalog system.  `params` carries the
// per-system knobs documented in docs/config-schema.md.
struct SystemConfig {
    std::string name;
    nlohmann::json params;

    static SystemConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

// A sampleable measure-preserving action: phase space, group, metric,
// invariant-measure sampler and an observable catalog.  Implementations are
// immutable after construction; samplers are pure functions of (seed, n).
class DynamicalSystem {
  public:
    virtual ~DynamicalSystem() = default;

    const std::string& name() const { return name_; }
    GroupKind group_kind() const { return group_kind_; }
    double grid_step() const { return step_; }
    bool invertible() const { return invertible_; }
    SpectralType known_spectral_type() const { return known_type_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

    virtual SystemPoint act(const GroupElement& t, const SystemPoint& x) const = 0;
    virtual double metric(const SystemPoint& a, const SystemPoint& b) const = 0;
    virtual std::vector<SystemPoint> sample(std::uint64_t seed, std::size_t n) const = 0;

    // Composite-midpoint nodes for 1-torus systems; empty when unsupported.
    virtual std::vector<SystemPoint> quadrature_nodes(std::size_t n) const {
        (void)n;
        return {};
    }

    // Closed-form autocorrelation sequence <f, T_n f> for n = 0..n_max when a
    // per-system exact route exists (substitution recursion etc.).
    virtual std::optional<std::vector<cplx>> exact_autocorrelation(
        const std::string& observable, long long n_max) const {
        (void)observable;
        (void)n_max;
        return std::nullopt;
    }

    const std::vector<Observable>& observables() const { return observables_; }
    const Observable& observable(const std::string& nm) const;
    const Observable& central_observable() const { return observable(central_); }
    const std::string& central_observable_name() const { return central_; }

    // Names and weights of the default separating family.
    const std::vector<std::pair<std::string, double>>& family_spec() const {
        return family_;
    }
    // Upper bound on the discarded tail sum_{n>N} c_n ||f_n||_inf.
    double family_tail_bound() const { return family_tail_; }

    GroupElement group_element(long long index) const {
        return group_kind_ == GroupKind::Integer ? GroupElement::integer(index)
                                                 : GroupElement::real(index, step_);
    }

  protected:
    DynamicalSystem(std::string name, GroupKind kind, double step, bool invertible,
                    SpectralType known)
        : name_(std::move(name)), group_kind_(kind), step_(step),
          invertible_(invertible), known_type_(known) {}

    std::string name_;
    GroupKind group_kind_;
    double step_;
    bool invertible_;
    SpectralType known_type_;
    std::vector<Observable> observables_;
    std::string central_;
    std::vector<std::pair<std::string, double>> family_;
    double family_tail_ = 0.0;
    std::vector<std::string> warnings_;
};

using SystemPtr = std::shared_ptr<const DynamicalSystem>;

// Catalog names are the stable public identifiers: CircleRotation,
// TorusTranslation, DoublingMap, BernoulliShift, SubstitutionSubshift,
// ProductSystem, OnePoint.
SystemPtr build_system(const SystemConfig& config);

struct CatalogEntry {
    std::string name;
    std::string parameters;
    std::string notes;
};
std::vector<CatalogEntry> catalog_entries();

std::vector<SystemPoint> orbit(const DynamicalSystem& system, const SystemPoint& x0,
                               const std::vector<GroupElement>& ts);

} // namespace apspec
