#include "oscihom/quadrature.hpp"

namespace oscihom {

namespace {

const double kG2x[] = {-0.5773502691896257, 0.5773502691896257};
const double kG2w[] = {1.0, 1.0};

const double kG4x[] = {-0.8611363115940526, -0.3399810435848563,
                       0.3399810435848563, 0.8611363115940526};
const double kG4w[] = {0.3478548451374538, 0.6521451548625461,
                       0.6521451548625461, 0.3478548451374538};

const double kG8x[] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                       -0.1834346424956498, 0.1834346424956498, 0.5255324099163290,
                       0.7966664774136267, 0.9602898564975363};
const double kG8w[] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                       0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                       0.2223810344533745, 0.1012285362903763};

} // namespace

namespace detail {

const double kKronrodX[15] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0,                0.207784955007898,
    0.405845151377397,  0.586087235467691,  0.741531185599394,
    0.864864423359769,  0.949107912342759,  0.991455371120813};

const double kKronrodW[15] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728, 0.204432940075298,
    0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529};

const double kGauss7W[7] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469, 0.381830050505119, 0.279705391489277,
    0.129484966168870};

} // namespace detail

GaussRule gauss_rule(int n) {
    switch (n) {
    case 2: return {kG2x, kG2w, 2};
    case 4: return {kG4x, kG4w, 4};
    case 8: return {kG8x, kG8w, 8};
    default: throw DomainError("unsupported Gauss rule order " + std::to_string(n));
    }
}

double pairwise_sum(const double* v, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    std::size_t half = n / 2;
    return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

} // namespace oscihom
