#include "platoon/affine.hpp"

#include <stdexcept>

namespace platoon {

AffineExpr AffineExpr::variable(std::size_t num_vars, std::size_t index, double scale) {
    if (index >= num_vars) throw std::invalid_argument("AffineExpr: variable index out of range");
    AffineExpr expr(num_vars);
    expr.coeffs_[index] = scale;
    return expr;
}

double AffineExpr::evaluate(std::span<const double> delta) const {
    if (delta.size() != coeffs_.size()) {
        throw std::invalid_argument("AffineExpr: evaluation point has wrong dimension");
    }
    double value = constant_;
    for (std::size_t t = 0; t < coeffs_.size(); ++t) value += coeffs_[t] * delta[t];
    return value;
}

AffineExpr& AffineExpr::operator+=(const AffineExpr& rhs) {
    if (rhs.coeffs_.size() != coeffs_.size()) {
        throw std::invalid_argument("AffineExpr: mismatched variable counts");
    }
    constant_ += rhs.constant_;
    for (std::size_t t = 0; t < coeffs_.size(); ++t) coeffs_[t] += rhs.coeffs_[t];
    return *this;
}

AffineExpr& AffineExpr::operator-=(const AffineExpr& rhs) {
    if (rhs.coeffs_.size() != coeffs_.size()) {
        throw std::invalid_argument("AffineExpr: mismatched variable counts");
    }
    constant_ -= rhs.constant_;
    for (std::size_t t = 0; t < coeffs_.size(); ++t) coeffs_[t] -= rhs.coeffs_[t];
    return *this;
}

AffineExpr& AffineExpr::operator*=(double f) {
    constant_ *= f;
    for (double& c : coeffs_) c *= f;
    return *this;
}

}  // namespace platoon
