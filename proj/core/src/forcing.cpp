#include "maxdde/forcing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "maxdde/parameters.hpp"

namespace maxdde {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap(double t, double T) {
    double r = std::fmod(t, T);
    return r < 0.0 ? r + T : r;
}
}  // namespace

struct SineForcing::Impl {
    enum class Kind { OneMinusSin, SinPlusWindowedCos, Table } kind;
    double period = kTwoPi;
    // table data (periodic cubic Hermite with finite-difference slopes)
    std::vector<double> tt, ff, slope;
    std::vector<std::pair<double, double>> raw_samples;

    double value(double t) const {
        switch (kind) {
            case Kind::OneMinusSin:
                return 1.0 - std::sin(t);
            case Kind::SinPlusWindowedCos: {
                // max of cos over [t - 3pi/2, t]: 1 while a multiple of 2pi is
                // inside the window, otherwise attained at a window endpoint
                const double frac = wrap(t, kTwoPi);
                const double m = frac <= 1.5 * kPi
                                     ? 1.0
                                     : std::max(std::cos(t), std::cos(t - 1.5 * kPi));
                return -std::sin(t) + m;
            }
            case Kind::Table:
                return table_value(t);
        }
        return 0.0;
    }

    double derivative(double t) const {
        switch (kind) {
            case Kind::OneMinusSin:
                return -std::cos(t);
            case Kind::SinPlusWindowedCos: {
                const double dd = 1e-6;
                return (value(t + dd) - value(t - dd)) / (2.0 * dd);
            }
            case Kind::Table:
                return table_derivative(t);
        }
        return 0.0;
    }

    std::size_t cell(double& x) const {
        x = wrap(x - tt.front(), period);
        const double step = period / static_cast<double>(tt.size() - 1);
        auto i = static_cast<std::size_t>(x / step);
        if (i >= tt.size() - 1) i = tt.size() - 2;
        return i;
    }

    double table_value(double t) const {
        double x = t;
        const std::size_t i = cell(x);
        const double h01 = tt[i + 1] - tt[i];
        const double u = (x - (tt[i] - tt.front())) / h01;
        const double u2 = u * u, u3 = u2 * u;
        return (2 * u3 - 3 * u2 + 1) * ff[i] + (u3 - 2 * u2 + u) * h01 * slope[i] +
               (-2 * u3 + 3 * u2) * ff[i + 1] + (u3 - u2) * h01 * slope[i + 1];
    }

    double table_derivative(double t) const {
        double x = t;
        const std::size_t i = cell(x);
        const double h01 = tt[i + 1] - tt[i];
        const double u = (x - (tt[i] - tt.front())) / h01;
        const double u2 = u * u;
        return ((6 * u2 - 6 * u) * ff[i] + (3 * u2 - 4 * u + 1) * h01 * slope[i] +
                (-6 * u2 + 6 * u) * ff[i + 1] + (3 * u2 - 2 * u) * h01 * slope[i + 1]) /
               h01;
    }
};

SineForcing SineForcing::one_minus_sin() {
    auto impl = std::make_shared<Impl>();
    impl->kind = Impl::Kind::OneMinusSin;
    return SineForcing(std::move(impl));
}

SineForcing SineForcing::sin_plus_windowed_cos() {
    auto impl = std::make_shared<Impl>();
    impl->kind = Impl::Kind::SinPlusWindowedCos;
    return SineForcing(std::move(impl));
}

SineForcing SineForcing::table(const std::vector<std::pair<double, double>>& samples,
                               double period) {
    if (samples.size() < 8) throw Error("table forcing: need at least 8 samples");
    if (!(period > 0.0)) throw Error("table forcing: period must be positive");
    auto sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    for (const auto& [t, f] : sorted)
        if (!std::isfinite(t) || !std::isfinite(f))
            throw Error("table forcing: non-finite sample");
    if (sorted.back().first - sorted.front().first > period)
        throw Error("table forcing: samples span more than one period");

    auto impl = std::make_shared<Impl>();
    impl->kind = Impl::Kind::Table;
    impl->period = period;
    impl->raw_samples = sorted;
    // close the period: last node = first node + period
    const std::size_t n = sorted.size();
    impl->tt.reserve(n + 1);
    impl->ff.reserve(n + 1);
    for (const auto& [t, f] : sorted) {
        impl->tt.push_back(t);
        impl->ff.push_back(f);
    }
    impl->tt.push_back(sorted.front().first + period);
    impl->ff.push_back(sorted.front().second);
    // periodic central-difference slopes
    const std::size_t m = impl->tt.size();
    impl->slope.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t il = (i == 0) ? m - 2 : i - 1;
        const std::size_t ir = (i == m - 1) ? 1 : i + 1;
        double dtl = impl->tt[i] - impl->tt[il];
        double dtr = impl->tt[ir] - impl->tt[i];
        if (i == 0) dtl = impl->tt[m - 1] - impl->tt[m - 2];
        if (i == m - 1) dtr = impl->tt[1] - impl->tt[0];
        impl->slope[i] = (impl->ff[ir] - impl->ff[il]) / (dtl + dtr);
    }
    return SineForcing(std::move(impl));
}

double SineForcing::period() const { return impl_->period; }
double SineForcing::value(double t) const { return impl_->value(t); }
double SineForcing::derivative(double t) const { return impl_->derivative(t); }

std::string SineForcing::type_name() const {
    switch (impl_->kind) {
        case Impl::Kind::OneMinusSin: return "one_minus_sin";
        case Impl::Kind::SinPlusWindowedCos: return "sin_plus_windowed_cos";
        case Impl::Kind::Table: return "table";
    }
    return "?";
}

const std::vector<std::pair<double, double>>& SineForcing::samples() const {
    return impl_->raw_samples;
}

bool SineForcing::is_sine_like(int grid) const {
    // exactly two sign changes of midpoint differences around one full cycle;
    // near-zero differences (flat extrema, the period seam) are skipped
    const double T = impl_->period;
    const double step = T / grid;
    std::vector<int> signs;
    signs.reserve(grid);
    for (int i = 0; i < grid; ++i) {
        const double t = (i + 0.5) * step;
        const double d = value(t) - value(t - step);
        if (std::abs(d) <= 1e-11 * (1.0 + std::abs(value(t)))) continue;
        const int s = d > 0.0 ? 1 : -1;
        if (signs.empty() || signs.back() != s) signs.push_back(s);
    }
    if (signs.size() < 2) return false;
    int changes = signs.size() - 1;
    if (signs.front() != signs.back()) ++changes;  // the cyclic wrap
    return changes == 2;
}

}  // namespace maxdde
