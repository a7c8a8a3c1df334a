#include "glab/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace glab {

namespace {

constexpr std::size_t kMaxPanels = 4000;
// below this relative accuracy the Kronrod-Gauss difference is roundoff
constexpr double kTolFloor = 64.0 * std::numeric_limits<double>::epsilon();

struct Panel {
    double a, b, value, error, l1;
    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel kronrod(const ScalarFn& f, double a, double b)
{
    Panel p{a, b, 0.0, 0.0, 0.0};
    // max_depth 0: one 31-point pass; boost reports the error on the [-1, 1] scale
    p.value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0,
                                                                           &p.error, &p.l1);
    p.error *= 0.5 * (b - a);
    return p;
}

}  // namespace

QuadResult integrate_adaptive(const ScalarFn& f, double a, double b, double rel_tol)
{
    if (!(b >= a)) {
        throw std::invalid_argument("integrate_adaptive: require a <= b");
    }
    if (a == b) {
        return {};
    }
    const double tol = std::max(rel_tol, kTolFloor);
    std::priority_queue<Panel> heap;
    heap.push(kronrod(f, a, b));
    double value = heap.top().value, error = heap.top().error, l1 = heap.top().l1;
    while (heap.size() < kMaxPanels && std::isfinite(value) && error > tol * l1) {
        const Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const Panel left = kronrod(f, worst.a, mid);
        const Panel right = kronrod(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        l1 += left.l1 + right.l1 - worst.l1;
        heap.push(left);
        heap.push(right);
    }
    // re-sum to drop the drift of the running updates
    QuadResult r;
    r.value = 0.0;
    r.error = 0.0;
    l1 = 0.0;
    for (; !heap.empty(); heap.pop()) {
        r.value += heap.top().value;
        r.error += heap.top().error;
        l1 += heap.top().l1;
    }
    r.converged = std::isfinite(r.value) && r.error <= tol * l1 * 1.0000001;
    return r;
}

QuadResult integrate_toward_zero(const ScalarFn& f, double a, double b, double rel_tol)
{
    if (!(a >= 0.0) || !(b > a)) {
        throw std::invalid_argument("integrate_toward_zero: require 0 <= a < b");
    }
    // Pieces [b/2^{k+1}, b/2^k] until the piece lies below a or stops mattering.
    QuadResult total;
    double hi = b;
    for (int k = 0; k < 1000 && hi > a; ++k) {
        const double lo = std::max(a, 0.5 * hi);
        const QuadResult piece = integrate_adaptive(f, lo, hi, rel_tol * 0.1);
        total.value += piece.value;
        total.error += piece.error;
        total.converged = total.converged && piece.converged;
        hi = lo;
        if (a == 0.0 && k > 4 && std::abs(piece.value) <= 1e-3 * rel_tol * std::abs(total.value)) {
            // remaining mass on [0, hi] is below tolerance: pieces decay geometrically
            total.error += std::abs(piece.value);
            break;
        }
        if (hi < 1e-300) {
            break;
        }
    }
    return total;
}

double gauss_legendre_composite(const ScalarFn& f, double a, double b, int panels)
{
    if (panels <= 0) {
        throw std::invalid_argument("gauss_legendre_composite: panels must be positive");
    }
    const double width = (b - a) / panels;
    double sum = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double lo = a + i * width;
        sum += boost::math::quadrature::gauss<double, 20>::integrate(f, lo, lo + width);
    }
    return sum;
}

}  // namespace glab
