#include "fracbern/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <mutex>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>

namespace fracbern {

namespace {

using std::numbers::pi;

// The FFTW planner is not thread safe; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

std::size_t checked_size(int dim, std::size_t n) {
    if (dim < 1)
        throw std::invalid_argument("grid dimension must be positive");
    if (n < 2 || !std::has_single_bit(n))
        throw std::invalid_argument("samples per axis must be a power of two >= 2, got " + std::to_string(n));
    std::size_t total = 1;
    for (int a = 0; a < dim; ++a) {
        if (total > (std::size_t{1} << 40) / n)
            throw std::invalid_argument("grid too large");
        total *= n;
    }
    return total;
}

void transform(std::vector<Complex>& data, int dim, std::size_t n, int sign) {
    std::vector<int> shape(static_cast<std::size_t>(dim), static_cast<int>(n));
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft(dim, shape.data(), ptr, ptr, sign, FFTW_ESTIMATE);
    }
    if (!plan)
        throw std::runtime_error("FFTW planning failed");
    fftw_execute(plan);
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
}

// Flat index of the slot holding -k for every slot k.
std::vector<std::size_t> mirror_slots(int dim, std::size_t n) {
    const std::size_t total = checked_size(dim, n);
    std::vector<std::size_t> out(total);
    for (std::size_t i = 0; i < total; ++i) {
        std::size_t rem = i, mirrored = 0, stride = 1;
        for (int a = 0; a < dim; ++a) {
            const std::size_t digit = rem % n;
            rem /= n;
            mirrored += ((n - digit) % n) * stride;
            stride *= n;
        }
        out[i] = mirrored;
    }
    return out;
}

void put_u64(std::ostream& out, std::uint64_t v) {
    char bytes[8];
    for (int i = 0; i < 8; ++i)
        bytes[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    out.write(bytes, 8);
}

void put_u32(std::ostream& out, std::uint32_t v) {
    char bytes[4];
    for (int i = 0; i < 4; ++i)
        bytes[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    out.write(bytes, 4);
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_uint(std::istream& in, int width) {
    unsigned char bytes[8] = {};
    if (!in.read(reinterpret_cast<char*>(bytes), width))
        throw std::runtime_error("truncated grid stream");
    std::uint64_t v = 0;
    for (int i = width - 1; i >= 0; --i)
        v = (v << 8) | bytes[i];
    return v;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_uint(in, 8)); }

} // namespace

GridFunction::GridFunction(int dim, double box_len, std::size_t n, std::vector<Complex> values, bool is_real)
    : dim_(dim), box_len_(box_len), n_(n), values_(std::move(values)), is_real_(is_real) {
    if (!(box_len > 0.0))
        throw std::invalid_argument("box length must be positive");
    if (values_.size() != checked_size(dim, n))
        throw std::invalid_argument("grid value count does not match n^d");
    if (is_real_)
        for (auto& v : values_)
            v = Complex(v.real(), 0.0);
}

GridFunction GridFunction::sample(int dim, double box_len, std::size_t n,
                                  const std::function<double(std::span<const double>)>& f) {
    const std::size_t total = checked_size(dim, n);
    std::vector<Complex> vals(total);
    std::vector<double> x(static_cast<std::size_t>(dim));
    const double h = box_len / static_cast<double>(n);
    for (std::size_t i = 0; i < total; ++i) {
        std::size_t rem = i;
        for (int a = dim - 1; a >= 0; --a) {
            x[static_cast<std::size_t>(a)] = h * static_cast<double>(rem % n);
            rem /= n;
        }
        vals[i] = f(x);
    }
    return {dim, box_len, n, std::move(vals), true};
}

GridFunction GridFunction::constant(int dim, double box_len, std::size_t n, double c) {
    return {dim, box_len, n, std::vector<Complex>(checked_size(dim, n), Complex(c, 0.0)), true};
}

double GridFunction::cell_volume() const { return std::pow(box_len_ / static_cast<double>(n_), dim_); }

std::vector<double> GridFunction::point(std::size_t i) const {
    std::vector<double> x(static_cast<std::size_t>(dim_));
    const double h = box_len_ / static_cast<double>(n_);
    for (int a = dim_ - 1; a >= 0; --a) {
        x[static_cast<std::size_t>(a)] = h * static_cast<double>(i % n_);
        i /= n_;
    }
    return x;
}

long signed_index(std::size_t i, std::size_t n) {
    return i < n / 2 ? static_cast<long>(i) : static_cast<long>(i) - static_cast<long>(n);
}

double nyquist(const GridFunction& f) { return static_cast<double>(f.n()) / (2.0 * f.box_len()); }

std::vector<Complex> forward_dft(const GridFunction& f) {
    std::vector<Complex> c = f.values();
    transform(c, f.dim(), f.n(), FFTW_FORWARD);
    const double scale = 1.0 / static_cast<double>(c.size());
    for (auto& v : c)
        v *= scale;
    return c;
}

GridFunction inverse_dft(int dim, double box_len, std::size_t n, std::vector<Complex> coeffs, bool is_real) {
    if (coeffs.size() != checked_size(dim, n))
        throw std::invalid_argument("coefficient count does not match n^d");
    transform(coeffs, dim, n, FFTW_BACKWARD);
    return {dim, box_len, n, std::move(coeffs), is_real};
}

std::vector<double> frequency(const GridFunction& f, std::size_t flat) {
    std::vector<double> xi(static_cast<std::size_t>(f.dim()));
    for (int a = f.dim() - 1; a >= 0; --a) {
        xi[static_cast<std::size_t>(a)] = static_cast<double>(signed_index(flat % f.n(), f.n())) / f.box_len();
        flat /= f.n();
    }
    return xi;
}

std::vector<double> frequency_norms(int dim, double box_len, std::size_t n) {
    const std::size_t total = checked_size(dim, n);
    std::vector<double> out(total);
    for (std::size_t i = 0; i < total; ++i) {
        std::size_t rem = i;
        double s = 0.0;
        for (int a = 0; a < dim; ++a) {
            const double k = static_cast<double>(signed_index(rem % n, n)) / box_len;
            s += k * k;
            rem /= n;
        }
        out[i] = std::sqrt(s);
    }
    return out;
}

SpectralMultiplier SpectralMultiplier::radial(std::string label, std::function<double(double)> profile) {
    SpectralMultiplier m;
    m.label = std::move(label);
    m.symbol = [profile = std::move(profile)](std::span<const double> xi) {
        double s = 0.0;
        for (double v : xi)
            s += v * v;
        return Complex(profile(std::sqrt(s)), 0.0);
    };
    return m;
}

SpectralMultiplier fractional_laplacian(double alpha) {
    return SpectralMultiplier::radial("fractional_laplacian(alpha=" + std::to_string(alpha) + ")",
                                      [alpha](double r) { return r == 0.0 ? 0.0 : std::pow(2.0 * pi * r, alpha); });
}

SpectralMultiplier heat_semigroup(double alpha, double t) {
    if (!(t >= 0.0))
        throw std::invalid_argument("semigroup time must be nonnegative");
    return SpectralMultiplier::radial("heat_semigroup(alpha=" + std::to_string(alpha) + ",t=" + std::to_string(t) + ")",
                                      [alpha, t](double r) { return std::exp(-t * std::pow(2.0 * pi * r, alpha)); });
}

SpectralMultiplier perturbed_semigroup(double alpha, double t, double eps) {
    const BumpProfile phi1 = make_bump(BumpKind::perturb_phi1);
    return SpectralMultiplier::radial(
        "perturbed_semigroup(alpha=" + std::to_string(alpha) + ",t=" + std::to_string(t) +
            ",eps=" + std::to_string(eps) + ")",
        [alpha, t, eps, phi1](double r) { return std::exp(-t * (std::pow(2.0 * pi * r, alpha) + eps * phi1(r))); });
}

bool is_radial(const SpectralMultiplier& m, int dim, std::size_t probes, double rel_tol) {
    std::mt19937_64 rng(0x5eed);
    std::normal_distribution<double> normal;
    const std::size_t d = static_cast<std::size_t>(dim);
    for (std::size_t p = 0; p < probes; ++p) {
        std::vector<double> xi(d), rotated(d);
        double r2 = 0.0;
        for (auto& v : xi) {
            v = normal(rng);
            r2 += v * v;
        }
        // Same length, independent direction: a rotated copy of xi.
        double s2 = 0.0;
        for (auto& v : rotated) {
            v = normal(rng);
            s2 += v * v;
        }
        const double scale = std::sqrt(r2 / s2);
        for (auto& v : rotated)
            v *= scale;
        if (d == 1)
            rotated[0] = -xi[0];
        const Complex a = m.symbol(xi);
        const Complex b = m.symbol(rotated);
        if (std::abs(a - b) > rel_tol * std::max({std::abs(a), std::abs(b), 1e-300}))
            return false;
    }
    return true;
}

GridFunction apply_multiplier(const GridFunction& f, const SpectralMultiplier& m) {
    std::vector<Complex> c = forward_dft(f);
    std::vector<Complex> sym(c.size());
    for (std::size_t i = 0; i < c.size(); ++i)
        sym[i] = m.symbol(frequency(f, i));
    bool keeps_real = f.is_real();
    if (keeps_real) {
        const auto mirror = mirror_slots(f.dim(), f.n());
        for (std::size_t i = 0; i < c.size() && keeps_real; ++i)
            keeps_real = sym[i] == std::conj(sym[mirror[i]]);
    }
    for (std::size_t i = 0; i < c.size(); ++i)
        c[i] *= sym[i];
    return inverse_dft(f.dim(), f.box_len(), f.n(), std::move(c), keeps_real);
}

std::string to_string(LpKind kind) {
    switch (kind) {
    case LpKind::band: return "band";
    case LpKind::low: return "low";
    case LpKind::high: return "high";
    }
    return "band";
}

LpKind lp_kind_from_string(const std::string& name) {
    if (name == "band")
        return LpKind::band;
    if (name == "low")
        return LpKind::low;
    if (name == "high")
        return LpKind::high;
    throw std::invalid_argument("unknown projection kind '" + name + "'");
}

double lp_symbol(double r, double N, LpKind kind) {
    static const BumpProfile phi = make_bump(BumpKind::lp_phi);
    switch (kind) {
    case LpKind::band: return phi(r / N) - phi(2.0 * r / N);
    case LpKind::low: return phi(r / N);
    case LpKind::high: return 1.0 - phi(r / N);
    }
    return 0.0;
}

GridFunction lp_project(const GridFunction& f, double N, LpKind kind) {
    if (!(N > 0.0))
        throw std::invalid_argument("projection scale must be positive");
    if (2.0 * N > nyquist(f))
        throw std::invalid_argument("projection scale N = " + std::to_string(N) + " exceeds half the Nyquist limit " +
                                    std::to_string(0.5 * nyquist(f)));
    std::vector<Complex> c = forward_dft(f);
    const std::vector<double> norms = frequency_norms(f.dim(), f.box_len(), f.n());
    for (std::size_t i = 0; i < c.size(); ++i)
        c[i] *= lp_symbol(norms[i], N, kind);
    return inverse_dft(f.dim(), f.box_len(), f.n(), std::move(c), f.is_real());
}

double lebesgue_norm(const GridFunction& f, double q) {
    if (q == kInfNorm) {
        double m = 0.0;
        for (const auto& v : f.values())
            m = std::max(m, std::abs(v));
        return m;
    }
    if (!(q >= 1.0))
        throw std::invalid_argument("Lebesgue exponent must be >= 1");
    // Scale by the largest modulus so that large q does not overflow.
    double m = 0.0;
    for (const auto& v : f.values())
        m = std::max(m, std::abs(v));
    if (m == 0.0)
        return 0.0;
    double s = 0.0;
    for (const auto& v : f.values())
        s += std::pow(std::abs(v) / m, q);
    return m * std::pow(s * f.cell_volume(), 1.0 / q);
}

double fractional_pairing(const GridFunction& g, double alpha, double q) {
    if (!(q > 1.0) || q == kInfNorm)
        throw std::invalid_argument("pairing exponent must satisfy 1 < q < inf");
    if (!g.is_real())
        throw std::invalid_argument("pairing needs a real-valued function");
    const GridFunction h = apply_multiplier(g, fractional_laplacian(alpha));
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double gi = g.real(i);
        if (gi == 0.0)
            continue;
        s += h.real(i) * std::pow(std::abs(gi), q - 2.0) * gi;
    }
    return s * g.cell_volume();
}

double bernstein_pairing(const GridFunction& f, double N, const FractionalParams& params, double q) {
    params.validate();
    if (!(q > 1.0) || q == kInfNorm)
        throw std::invalid_argument("pairing exponent must satisfy 1 < q < inf");
    return fractional_pairing(lp_project(f, N, LpKind::band), params.alpha, q);
}

std::vector<double> maximal_radii(const GridFunction& f) {
    std::vector<double> radii;
    const int levels = std::bit_width(f.n()) - 1;
    for (int j = 1; j <= levels - 1; ++j)
        radii.push_back(f.box_len() * std::ldexp(1.0, -j));
    return radii;
}

GridFunction maximal_function(const GridFunction& f) {
    const std::size_t total = f.size();
    std::vector<Complex> modulus(total);
    for (std::size_t i = 0; i < total; ++i)
        modulus[i] = std::abs(f.values()[i]);
    const GridFunction abs_f(f.dim(), f.box_len(), f.n(), modulus, true);
    const std::vector<Complex> spec = forward_dft(abs_f);

    std::vector<double> best(total);
    for (std::size_t i = 0; i < total; ++i)
        best[i] = modulus[i].real();

    const double h = f.box_len() / static_cast<double>(f.n());
    // Squared offset length of every slot under the minimal-image convention.
    std::vector<double> offset2(total);
    for (std::size_t i = 0; i < total; ++i) {
        std::size_t rem = i;
        double s = 0.0;
        for (int a = 0; a < f.dim(); ++a) {
            const double m = h * static_cast<double>(signed_index(rem % f.n(), f.n()));
            s += m * m;
            rem /= f.n();
        }
        offset2[i] = s;
    }
    for (double radius : maximal_radii(f)) {
        const double r2 = radius * radius * (1.0 + 1e-12);
        std::vector<Complex> ball(total);
        double count = 0.0;
        for (std::size_t i = 0; i < total; ++i)
            if (offset2[i] <= r2) {
                ball[i] = 1.0;
                count += 1.0;
            }
        const GridFunction ball_fn(f.dim(), f.box_len(), f.n(), std::move(ball), true);
        std::vector<Complex> kernel = forward_dft(ball_fn);
        // Normalized DFT: circular convolution picks up a factor n^d.
        const double scale = static_cast<double>(total) / count;
        for (std::size_t i = 0; i < total; ++i)
            kernel[i] *= spec[i] * scale;
        const GridFunction avg = inverse_dft(f.dim(), f.box_len(), f.n(), std::move(kernel), true);
        for (std::size_t i = 0; i < total; ++i)
            best[i] = std::max(best[i], avg.real(i));
    }
    std::vector<Complex> out(best.begin(), best.end());
    return {f.dim(), f.box_len(), f.n(), std::move(out), true};
}

void write_grid(std::ostream& out, const GridFunction& f) {
    put_u32(out, static_cast<std::uint32_t>(f.dim()));
    put_f64(out, f.box_len());
    put_u32(out, static_cast<std::uint32_t>(f.n()));
    const char flag = f.is_real() ? 1 : 0;
    out.write(&flag, 1);
    for (const auto& v : f.values()) {
        put_f64(out, v.real());
        put_f64(out, v.imag());
    }
    if (!out)
        throw std::runtime_error("failed to write grid function");
}

GridFunction read_grid(std::istream& in) {
    const auto dim = static_cast<std::int32_t>(get_uint(in, 4));
    const double box_len = get_f64(in);
    const auto n = static_cast<std::int32_t>(get_uint(in, 4));
    if (dim < 1 || n < 2)
        throw std::runtime_error("corrupt grid header");
    const bool is_real = get_uint(in, 1) != 0;
    const std::size_t total = checked_size(dim, static_cast<std::size_t>(n));
    std::vector<Complex> vals(total);
    for (auto& v : vals) {
        const double re = get_f64(in);
        const double im = get_f64(in);
        v = Complex(re, im);
    }
    return {dim, box_len, static_cast<std::size_t>(n), std::move(vals), is_real};
}

void save_grid(const std::string& path, const GridFunction& f) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open " + path + " for writing");
    write_grid(out, f);
}

GridFunction load_grid(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path + " for reading");
    return read_grid(in);
}

} // namespace fracbern
