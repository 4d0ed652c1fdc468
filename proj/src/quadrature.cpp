#include "mixlab/quadrature.hpp"

#include "mixlab/error.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

namespace mixlab::quad {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 15>;

constexpr std::size_t kMaxHeadPieces = 4000;

}  // namespace

Result integrate(const Integrand& f, double a, double b, double rel_tol, unsigned max_depth) {
    if (!std::isfinite(a) || !std::isfinite(b)) throw DomainError("integrate: limits must be finite");
    Result r;
    r.segments = 1;
    if (a == b) return r;

    // Global adaptive bisection over G7K15 panels: always split the panel
    // with the largest error estimate.  The stopping test has a round-off
    // floor proportional to the L1 mass, so integrands that cancel or sit on
    // a large constant do not refine forever.
    struct Piece {
        double lo, hi, value, error, l1;
        bool operator<(const Piece& o) const { return error < o.error; }
    };
    auto eval = [&f](double lo, double hi) {
        Piece p{lo, hi, 0.0, 0.0, 0.0};
        const Result r = panel(f, lo, hi);
        p.value = r.value;
        p.error = r.error;
        p.l1 = r.l1;
        return p;
    };

    const std::size_t max_pieces = std::size_t{1} << std::min(max_depth, 20u);
    std::priority_queue<Piece> heap;
    Piece first = eval(a, b);
    double value = first.value, error = first.error, l1 = first.l1;
    heap.push(first);
    auto done = [&] {
        const double floor = 50.0 * std::numeric_limits<double>::epsilon() * l1;
        return error <= std::max(rel_tol * std::fabs(value), floor);
    };
    while (!done() && heap.size() < max_pieces) {
        const Piece worst = heap.top();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (!(mid > worst.lo && mid < worst.hi)) break;  // interval exhausted
        heap.pop();
        const Piece left = eval(worst.lo, mid);
        const Piece right = eval(mid, worst.hi);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        l1 += left.l1 + right.l1 - worst.l1;
        heap.push(left);
        heap.push(right);
    }
    r.value = value;
    r.error = error;
    r.l1 = l1;
    if (!std::isfinite(r.value)) {
        std::ostringstream msg;
        msg << "integrate: non-finite result on [" << a << ", " << b << "]";
        throw NumericError(msg.str());
    }
    // Oscillatory integrands cancel; measure the error against the L1 mass too.
    const double scale = std::fmax(std::fabs(r.value), l1);
    if (r.error > 10.0 * rel_tol * scale && r.error > 1e-300) {
        std::ostringstream msg;
        msg << "integrate: no convergence on [" << a << ", " << b << "]: value=" << r.value
            << " error=" << r.error << " l1=" << l1 << " rel_tol=" << rel_tol << " pieces=" << heap.size();
        throw NumericError(msg.str());
    }
    return r;
}

Result panel(const Integrand& f, double a, double b) {
    // The rule is applied on [-1, 1] and rescaled here: the library reports the
    // non-adaptive error and L1 estimates in reference-interval units.
    const double mean = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    auto g = [&](double x) { return f(mean + half * x); };
    Result r;
    r.segments = 1;
    double err = 0.0, l1 = 0.0;
    r.value = half * GK::integrate(g, -1.0, 1.0, 0, 0.0, &err, &l1);
    r.error = std::fabs(half) * err;
    r.l1 = std::fabs(half) * l1;
    return r;
}

Result integrate_head(const Integrand& f, double x, double rel_tol) {
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("integrate_head: x must be positive and finite");
    Result total;
    double hi = x;
    double prev_piece = 0.0;
    double prev_ratio = 0.0;
    int stable = 0;
    for (std::size_t k = 0; k < kMaxHeadPieces; ++k) {
        const double lo = 0.5 * hi;
        const Result piece = integrate(f, lo, hi, 0.1 * rel_tol);
        total.value += piece.value;
        total.error += piece.error;
        total.l1 += piece.l1;
        ++total.segments;

        if (piece.value == 0.0 && prev_piece == 0.0 && k > 0) return total;
        if (std::fabs(piece.value) <= 1e-3 * rel_tol * std::fabs(total.value)) return total;

        if (k > 0 && prev_piece != 0.0) {
            const double ratio = piece.value / prev_piece;
            if (k > 1 && std::fabs(ratio - prev_ratio) <= 1e-9 * std::fabs(ratio)) {
                ++stable;
            } else {
                stable = 0;
            }
            prev_ratio = ratio;
            if (stable >= 2) {
                if (!(ratio < 1.0) || ratio <= 0.0) {
                    throw DomainError("integrate_head: pieces do not shrink toward 0, integrand not integrable");
                }
                // sum_{j>=1} piece * ratio^j
                total.value += piece.value * ratio / (1.0 - ratio);
                total.extrapolated = true;
                return total;
            }
        }
        prev_piece = piece.value;
        hi = lo;
    }
    throw NumericError("integrate_head: geometric splitting did not settle");
}

Result integrate_tail(const Integrand& f, double x, double rel_tol) {
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("integrate_tail: x must be positive and finite");
    Result total;
    const double cap = std::ldexp(x, 60);
    double lo = x;
    double hi = 2.0 * x;
    while (hi <= cap) {
        const Result inc = integrate(f, lo, hi, 0.1 * rel_tol);
        total.value += inc.value;
        total.error += inc.error;
        total.l1 += inc.l1;
        ++total.segments;
        if (std::fabs(inc.value) < rel_tol * std::fabs(total.value)) return total;
        lo = hi;
        hi *= 2.0;
    }
    std::ostringstream msg;
    msg << "integrate_tail: running sum not Cauchy up to 2^60 x (x=" << x << ", partial=" << total.value << ")";
    throw DomainError(msg.str());
}

}  // namespace mixlab::quad
