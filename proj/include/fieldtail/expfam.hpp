#pragma once

#include <string>

namespace fieldtail {

/// How the tilt eta = xi * theta enters the Bernoulli law.
enum class TiltConvention {
    /// eta is the natural parameter of the standardized variable W = (B - p0)/s,
    /// i.e. B is tilted by eta/s. This makes psi''(0) = 1.
    standardized,
    /// eta is the natural parameter of the raw Bernoulli B, as in the literal
    /// p1 = p0 / (p0 + (1 - p0) e^{-eta}). psi is then psi_std(s * eta), the
    /// cumulant function of B - p0, and psi''(0) = s^2 instead of 1.
    raw,
};

/// psi, psi', psi'' at one argument.
struct CumulantValues {
    double psi = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

/// Per-pixel cumulant function of the observation law.
class FamilySpec {
public:
    enum class Kind { standardized_bernoulli, standard_gaussian };

    static FamilySpec standard_gaussian();
    static FamilySpec standardized_bernoulli(double p0, TiltConvention tilt = TiltConvention::standardized);

    Kind kind() const { return kind_; }
    bool is_gaussian() const { return kind_ == Kind::standard_gaussian; }
    double p0() const { return p0_; }
    /// sqrt(p0 (1 - p0)); 1 for the Gaussian family.
    double scale() const { return scale_; }
    TiltConvention tilt() const { return tilt_; }

    /// psi^{(order)}(eta), order in {0, 1, 2}.
    double cumulant(double eta, int order) const;
    CumulantValues cumulants(double eta) const;

    std::string describe() const;

private:
    FamilySpec(Kind kind, double p0, TiltConvention tilt);

    Kind kind_;
    double p0_;
    double scale_;
    TiltConvention tilt_;
    double log_p0_ = 0.0;
    double log_q0_ = 0.0;
};

double cumulant(const FamilySpec& family, double eta, int order);

/// Success probability of a Bernoulli(p0) tilted by natural parameter eta:
/// p0 / (p0 + (1 - p0) e^{-eta}).
double tilted_success_prob(double p0, double eta);

TiltConvention parse_tilt_convention(const std::string& name);
std::string to_string(TiltConvention tilt);

}  // namespace fieldtail
