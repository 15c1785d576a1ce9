#include "triopf/qexpr.hpp"

namespace triopf {

namespace {

// Expands scale * Re-or-Im(a * conj(b)) term by term. The real/imaginary
// selection happens through `pick`, applied to each complex product.
template <typename Pick>
void add_product(QuadExpr& target, const ComplexAffine& a, const ComplexAffine& b, double scale,
                 Pick pick) {
    target.constant += scale * pick(a.constant * std::conj(b.constant));
    for (const auto& [j, bc] : b.terms) {
        target.add_lin(j, scale * pick(a.constant * std::conj(bc)));
    }
    for (const auto& [i, ac] : a.terms) {
        target.add_lin(i, scale * pick(ac * std::conj(b.constant)));
    }
    for (const auto& [i, ac] : a.terms) {
        for (const auto& [j, bc] : b.terms) {
            target.add_quad(i, j, scale * pick(ac * std::conj(bc)));
        }
    }
}

} // namespace

void add_re_product(QuadExpr& target, const ComplexAffine& a, const ComplexAffine& b, double scale) {
    add_product(target, a, b, scale, [](Complex v) { return v.real(); });
}

void add_im_product(QuadExpr& target, const ComplexAffine& a, const ComplexAffine& b, double scale) {
    add_product(target, a, b, scale, [](Complex v) { return v.imag(); });
}

void add_abs2(QuadExpr& target, const ComplexAffine& a, double scale) {
    add_re_product(target, a, a, scale);
}

} // namespace triopf
