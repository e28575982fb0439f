#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

namespace crt {

struct ScalarMinResult {
    double x = 0.0;
    double value = 0.0;
    int iterations = 0;
};

// Brent's method for one-dimensional minimization on [a, b]: golden-section
// bracketing with parabolic interpolation steps when they are trustworthy.
template <class F>
ScalarMinResult brent_minimize(F&& f, double a, double b, int max_iters = 100,
                               double tol = 1e-10) {
    constexpr double kGold = 0.3819660112501051;
    double x, w, v, fx, fw, fv;
    x = w = v = a + kGold * (b - a);
    fx = fw = fv = f(x);
    double d = 0.0, e = 0.0;

    int iter = 0;
    for (; iter < max_iters; ++iter) {
        const double m = 0.5 * (a + b);
        const double tol1 = tol * std::abs(x) + 1e-15;
        const double tol2 = 2.0 * tol1;
        if (std::abs(x - m) <= tol2 - 0.5 * (b - a)) break;

        bool parabolic = false;
        if (std::abs(e) > tol1) {
            const double r = (x - w) * (fx - fv);
            double q = (x - v) * (fx - fw);
            double p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if (q > 0.0) p = -p;
            q = std::abs(q);
            const double e_old = e;
            e = d;
            if (std::abs(p) < std::abs(0.5 * q * e_old) && p > q * (a - x) &&
                p < q * (b - x)) {
                d = p / q;
                const double u = x + d;
                if (u - a < tol2 || b - u < tol2)
                    d = (m > x) ? tol1 : -tol1;
                parabolic = true;
            }
        }
        if (!parabolic) {
            e = (x < m) ? b - x : a - x;
            d = kGold * e;
        }

        const double u =
            (std::abs(d) >= tol1) ? x + d : x + ((d > 0.0) ? tol1 : -tol1);
        const double fu = f(u);
        if (fu <= fx) {
            if (u < x) b = x; else a = x;
            v = w; fv = fw;
            w = x; fw = fx;
            x = u; fx = fu;
        } else {
            if (u < x) a = u; else b = u;
            if (fu <= fw || w == x) {
                v = w; fv = fw;
                w = u; fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u; fv = fu;
            }
        }
    }
    return {x, fx, iter};
}

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

// Derivative-free Nelder-Mead in two dimensions. Infeasible regions are
// handled by returning +inf from the objective.
template <class F>
std::pair<Point2, double> nelder_mead_2d(F&& f, Point2 start, double step,
                                         int max_iters = 50) {
    std::array<Point2, 3> pts = {start, Point2{start.x + step, start.y},
                                 Point2{start.x, start.y + step}};
    std::array<double, 3> vals = {f(pts[0]), f(pts[1]), f(pts[2])};

    auto order = [&] {
        for (int i = 0; i < 2; ++i)
            for (int j = i + 1; j < 3; ++j)
                if (vals[j] < vals[i]) {
                    std::swap(vals[i], vals[j]);
                    std::swap(pts[i], pts[j]);
                }
    };
    order();

    for (int iter = 0; iter < max_iters; ++iter) {
        const Point2 centroid{0.5 * (pts[0].x + pts[1].x),
                              0.5 * (pts[0].y + pts[1].y)};
        auto along = [&](double t) {
            return Point2{centroid.x + t * (centroid.x - pts[2].x),
                          centroid.y + t * (centroid.y - pts[2].y)};
        };

        const Point2 refl = along(1.0);
        const double f_refl = f(refl);
        if (f_refl < vals[0]) {
            const Point2 expd = along(2.0);
            const double f_expd = f(expd);
            if (f_expd < f_refl) {
                pts[2] = expd; vals[2] = f_expd;
            } else {
                pts[2] = refl; vals[2] = f_refl;
            }
        } else if (f_refl < vals[1]) {
            pts[2] = refl; vals[2] = f_refl;
        } else {
            const Point2 contr = along(-0.5);
            const double f_contr = f(contr);
            if (f_contr < vals[2]) {
                pts[2] = contr; vals[2] = f_contr;
            } else {
                for (int i = 1; i < 3; ++i) {
                    pts[i] = {0.5 * (pts[i].x + pts[0].x),
                              0.5 * (pts[i].y + pts[0].y)};
                    vals[i] = f(pts[i]);
                }
            }
        }
        order();
    }
    return {pts[0], vals[0]};
}

}  // namespace crt
