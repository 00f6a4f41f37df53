#include "fieldtail/expfam.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fieldtail {

FamilySpec::FamilySpec(Kind kind, double p0, TiltConvention tilt)
    : kind_(kind), p0_(p0), scale_(kind == Kind::standard_gaussian ? 1.0 : std::sqrt(p0 * (1.0 - p0))), tilt_(tilt) {
    if (kind == Kind::standardized_bernoulli) {
        log_p0_ = std::log(p0);
        log_q0_ = std::log1p(-p0);
    }
}

FamilySpec FamilySpec::standard_gaussian() { return FamilySpec(Kind::standard_gaussian, 0.0, TiltConvention::standardized); }

FamilySpec FamilySpec::standardized_bernoulli(double p0, TiltConvention tilt) {
    if (!(p0 > 0.0 && p0 < 1.0)) throw std::invalid_argument("Bernoulli p0 must lie in (0, 1)");
    return FamilySpec(Kind::standardized_bernoulli, p0, tilt);
}

double tilted_success_prob(double p0, double eta) {
    if (!(p0 > 0.0 && p0 < 1.0)) throw std::invalid_argument("tilted_success_prob: p0 must lie in (0, 1)");
    if (eta >= 0.0) return p0 / (p0 + (1.0 - p0) * std::exp(-eta));
    const double e = std::exp(eta);
    return p0 * e / (p0 * e + (1.0 - p0));
}

CumulantValues FamilySpec::cumulants(double eta) const {
    if (!std::isfinite(eta)) throw std::invalid_argument("cumulant: eta must be finite");
    if (kind_ == Kind::standard_gaussian) return {0.5 * eta * eta, eta, 1.0};

    const double s = scale_;
    const double q0 = 1.0 - p0_;
    // Standardized argument: the raw convention shrinks the tilt by s.
    const double z = tilt_ == TiltConvention::raw ? s * eta : eta;
    const double a = z / s;  // natural parameter of the raw Bernoulli
    // One exponential of -|a| gives both p1 and log(q0 + p0 e^a) without overflow.
    const double e = std::exp(-std::abs(a));
    double p1, log_mgf;
    if (a >= 0.0) {
        p1 = p0_ / (p0_ + q0 * e);
        log_mgf = a + log_p0_ + std::log1p(q0 / p0_ * e);
    } else {
        p1 = p0_ * e / (p0_ * e + q0);
        log_mgf = log_q0_ + std::log1p(p0_ / q0 * e);
    }
    CumulantValues out;
    out.psi = log_mgf - a * p0_;
    out.d1 = (p1 - p0_) / s;
    out.d2 = p1 * (1.0 - p1) / (s * s);
    if (tilt_ == TiltConvention::raw) {
        // Chain rule for psi_std(s * eta): this is the cumulant function of B - p0.
        out.d1 *= s;
        out.d2 *= s * s;
    }
    return out;
}

double FamilySpec::cumulant(double eta, int order) const {
    if (order < 0 || order > 2) throw std::invalid_argument("cumulant: order must be 0, 1 or 2");
    const CumulantValues c = cumulants(eta);
    return order == 0 ? c.psi : order == 1 ? c.d1 : c.d2;
}

double cumulant(const FamilySpec& family, double eta, int order) { return family.cumulant(eta, order); }

std::string FamilySpec::describe() const {
    if (is_gaussian()) return "standard-gaussian";
    std::ostringstream os;
    os << "standardized-bernoulli(p0=" << p0_ << ", tilt=" << to_string(tilt_) << ")";
    return os.str();
}

TiltConvention parse_tilt_convention(const std::string& name) {
    if (name == "standardized") return TiltConvention::standardized;
    if (name == "raw") return TiltConvention::raw;
    throw std::invalid_argument("unknown tilt convention '" + name + "'");
}

std::string to_string(TiltConvention tilt) { return tilt == TiltConvention::raw ? "raw" : "standardized"; }

}  // namespace fieldtail
