#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace platoon {

/// constant + sum_t coeffs[t] * delta[t] over a fixed variable count.
class AffineExpr {
public:
    AffineExpr() = default;
    explicit AffineExpr(std::size_t num_vars, double constant = 0.0)
        : constant_(constant), coeffs_(num_vars, 0.0) {}

    static AffineExpr variable(std::size_t num_vars, std::size_t index, double scale = 1.0);

    double constant() const { return constant_; }
    std::span<const double> coeffs() const { return coeffs_; }
    std::size_t num_vars() const { return coeffs_.size(); }

    double evaluate(std::span<const double> delta) const;

    AffineExpr& operator+=(const AffineExpr& rhs);
    AffineExpr& operator-=(const AffineExpr& rhs);
    AffineExpr& operator+=(double c) {
        constant_ += c;
        return *this;
    }
    AffineExpr& operator-=(double c) {
        constant_ -= c;
        return *this;
    }
    AffineExpr& operator*=(double f);

    friend AffineExpr operator+(AffineExpr lhs, const AffineExpr& rhs) { return lhs += rhs; }
    friend AffineExpr operator-(AffineExpr lhs, const AffineExpr& rhs) { return lhs -= rhs; }
    friend AffineExpr operator+(AffineExpr lhs, double c) { return lhs += c; }
    friend AffineExpr operator-(AffineExpr lhs, double c) { return lhs -= c; }
    friend AffineExpr operator*(AffineExpr lhs, double f) { return lhs *= f; }
    friend AffineExpr operator*(double f, AffineExpr rhs) { return rhs *= f; }

private:
    double constant_ = 0.0;
    std::vector<double> coeffs_;
};

}  // namespace platoon
