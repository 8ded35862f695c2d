#include "fracbern/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>

namespace fracbern {

namespace {

// QUADPACK qk15 nodes: xgk[1], xgk[3], xgk[5] are the 7-point Gauss nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = std::numeric_limits<double>::min();

struct Segment {
    double a, b;
    QuadResult r;
    bool floored = false;  // error estimate sits at the round-off floor
    bool operator<(const Segment& o) const { return r.abs_err < o.r.abs_err; }
};

QuadResult gk15(const RealFunction& f, double a, double b, bool* floored) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double abs_half = std::abs(half);

    const double fc = f(center);
    double resg = fc * kWg[3];
    double resk = fc * kWgk[7];
    double resabs = std::abs(resk);
    std::array<double, 7> fv1{}, fv2{};

    for (int j = 0; j < 3; ++j) {
        const int jtw = 2 * j + 1;
        const double dx = half * kXgk[jtw];
        const double f1 = f(center - dx);
        const double f2 = f(center + dx);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        resg += kWg[j] * (f1 + f2);
        resk += kWgk[jtw] * (f1 + f2);
        resabs += kWgk[jtw] * (std::abs(f1) + std::abs(f2));
    }
    for (int j = 0; j < 4; ++j) {
        const int jtwm1 = 2 * j;
        const double dx = half * kXgk[jtwm1];
        const double f1 = f(center - dx);
        const double f2 = f(center + dx);
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        resk += kWgk[jtwm1] * (f1 + f2);
        resabs += kWgk[jtwm1] * (std::abs(f1) + std::abs(f2));
    }

    const double reskh = resk * 0.5;
    double resasc = kWgk[7] * std::abs(fc - reskh);
    for (int j = 0; j < 7; ++j)
        resasc += kWgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));

    QuadResult out;
    out.value = resk * half;
    resabs *= abs_half;
    resasc *= abs_half;
    double err = std::abs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    bool at_floor = false;
    if (resabs > kTiny / (50.0 * kEps)) {
        const double floor = 50.0 * kEps * resabs;
        at_floor = err <= floor;
        err = std::max(floor, err);
    }
    if (floored)
        *floored = at_floor;
    out.abs_err = err;
    out.evals = 15;
    return out;
}

Segment make_segment(const RealFunction& f, double a, double b) {
    Segment s{a, b, {}};
    s.r = gk15(f, a, b, &s.floored);
    return s;
}

} // namespace

QuadResult gauss_kronrod15(const RealFunction& f, double a, double b) { return gk15(f, a, b, nullptr); }

QuadResult integrate_adaptive(const RealFunction& f, double a, double b, double abs_tol, std::size_t max_evals) {
    if (a == b)
        return {};
    std::priority_queue<Segment> heap;
    Segment first = make_segment(f, a, b);
    double total = first.r.value;
    double err = first.r.abs_err;
    std::size_t evals = first.r.evals;
    heap.push(first);

    while (err > abs_tol && evals + 30 <= max_evals) {
        Segment worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        // Stop splitting once the interval can no longer be resolved in double precision.
        if (std::abs(worst.b - worst.a) < 1e3 * kEps * std::max(std::abs(worst.a), std::abs(worst.b)) + kTiny)
            break;
        // Splitting cannot reduce an error that is pure round-off.
        if (worst.floored)
            break;
        heap.pop();
        Segment left = make_segment(f, worst.a, mid);
        Segment right = make_segment(f, mid, worst.b);
        evals += 30;
        total += left.r.value + right.r.value - worst.r.value;
        err += left.r.abs_err + right.r.abs_err - worst.r.abs_err;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum to shed drift from the incremental updates.
    QuadResult out;
    out.evals = evals;
    while (!heap.empty()) {
        out.value += heap.top().r.value;
        out.abs_err += heap.top().r.abs_err;
        heap.pop();
    }
    out.converged = out.abs_err <= abs_tol;
    return out;
}

double wynn_limit(std::span<const double> s) {
    const std::size_t m = s.size();
    if (m == 0)
        return 0.0;
    if (m < 3)
        return s[m - 1];
    // prev = column k-1, cur = column k; column -1 is all zeros.
    std::vector<double> prev(m + 1, 0.0);
    std::vector<double> cur(s.begin(), s.end());
    double best = cur[m - 1];
    for (std::size_t k = 1; k < m; ++k) {
        std::vector<double> next(m - k);
        bool degenerate = false;
        for (std::size_t n = 0; n + k < m; ++n) {
            const double diff = cur[n + 1] - cur[n];
            if (std::abs(diff) <= kTiny * 1e10 || !std::isfinite(diff)) {
                degenerate = true;
                break;
            }
            next[n] = prev[n + 1] + 1.0 / diff;
        }
        if (degenerate)
            break;
        prev = std::move(cur);
        cur = std::move(next);
        if (k % 2 == 0 && std::isfinite(cur.back()))
            best = cur.back();
    }
    return best;
}

Extrapolation WynnEpsilon::push(double partial_sum) {
    sums_.push_back(partial_sum);
    if (sums_.size() > window_)
        sums_.erase(sums_.begin());
    const double est = extrapolate();
    history_.push_back(est);
    Extrapolation out{est, std::numeric_limits<double>::infinity()};
    const std::size_t h = history_.size();
    if (h >= 3) {
        out.abs_err = std::abs(est - history_[h - 2]) + std::abs(est - history_[h - 3]);
        out.abs_err = std::max(out.abs_err, 10.0 * kEps * std::abs(est));
    }
    return out;
}

double WynnEpsilon::extrapolate() const { return wynn_limit(sums_); }

} // namespace fracbern
