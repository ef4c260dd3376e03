#include "maxdde/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace maxdde {

namespace {

struct Image {
    double lo, hi;
};

// image bounds of R over [lo, hi]: dense grid + golden refinement of extrema;
// also verifies the branch index is constant (continuity inside the interval)
Image image_of(const ReturnMap& rm, double lo, double hi, int grid) {
    double vmin = 1e300, vmax = -1e300, amin = lo, amax = lo;
    int j0 = -1;
    for (int i = 0; i < grid; ++i) {
        const double p = lo + (hi - lo) * i / (grid - 1);
        const auto s = rm.eval(p);
        if (j0 < 0) j0 = s.branch_j;
        else if (s.branch_j != j0)
            throw Error("covering: branch index jumps inside source interval [" +
                        std::to_string(lo) + ", " + std::to_string(hi) + "]");
        if (s.R < vmin) { vmin = s.R; amin = p; }
        if (s.R > vmax) { vmax = s.R; amax = p; }
    }
    const double cell = (hi - lo) / (grid - 1);
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    auto refine = [&](double center, bool maximize) {
        double a = std::max(lo, center - cell), b = std::min(hi, center + cell);
        double c = b - gr * (b - a), d = a + gr * (b - a);
        double gc = rm(c), gd = rm(d);
        for (int it = 0; it < 40 && b - a > 1e-11; ++it) {
            const bool left = maximize ? (gc > gd) : (gc < gd);
            if (left) { b = d; d = c; gd = gc; c = b - gr * (b - a); gc = rm(c); }
            else { a = c; c = d; gc = gd; d = a + gr * (b - a); gd = rm(d); }
        }
        return rm(0.5 * (a + b));
    };
    vmin = std::min(vmin, refine(amin, false));
    vmax = std::max(vmax, refine(amax, true));
    return {vmin, vmax};
}

double bisect_decreasing(const ReturnMap& rm, double target, double lo, double hi) {
    // R strictly decreasing on [lo, hi]; returns x with R(x) = target
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        ((rm(mid) > target) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

std::array<std::pair<double, double>, 3> IntervalTriple::intervals() const {
    return {{{p0, alpha}, {alpha, kappa}, {p1, R0}}};
}

IntervalTriple build_intervals(const ReturnMap& rm, const ChaosOptions& opts) {
    IntervalTriple iv;
    iv.R0 = rm(0.0);
    const double K = rm.problem().ftilde_max();

    const auto discs = rm.find_discontinuities(0.02 * K, 0.95 * K, 240);
    if (discs.empty()) throw Error("build_intervals: no discontinuity located");
    iv.p1 = discs.front().p;

    if (!(rm(0.9) > 0.9))
        throw Error("build_intervals: R(0.9) <= 0.9; leftmost fixed point outside (0.9, p1)");
    if (!(rm(iv.p1 - 1e-4) < iv.p1 - 1e-4))
        throw Error("build_intervals: no fixed-point bracket left of p1");
    {
        double lo = 0.9, hi = iv.p1 - 1e-4;
        for (int it = 0; it < 70; ++it) {
            const double mid = 0.5 * (lo + hi);
            ((rm(mid) > mid) ? lo : hi) = mid;
        }
        iv.alpha = 0.5 * (lo + hi);
    }

    const auto q0 = rm.q0_root();
    if (!q0)
        throw Error("build_intervals: no interior critical point; cannot bracket p0");
    const double pc = q0->p;
    const double pb1 = rm.beta1().p;
    if (!(rm(pc) > iv.R0))
        throw Error("build_intervals: R(p_c) <= R(0); no p0 bracket exists");
    if (!(rm(pb1) < iv.R0))
        throw Error("build_intervals: R(ftilde(beta1)) >= R(0); no p0 bracket exists");
    iv.p0 = bisect_decreasing(rm, iv.R0, pc, pb1);

    // largest grid point below p1 with verified R(kappa) < p0 - margin
    const int n = 2001;
    iv.kappa = 0.0;
    for (int k = 1; k < n; ++k) {
        const double p = iv.p1 - (iv.p1 - iv.alpha) * k / (n - 1);
        if (rm(p) < iv.p0 - opts.kappa_margin) { iv.kappa = p; break; }
    }
    if (!(iv.kappa > iv.alpha))
        throw Error("build_intervals: no kappa with R(kappa) < p0 - margin");
    return iv;
}

std::array<CoveringRelation, 3> verify_coverings(const ReturnMap& rm,
                                                 const IntervalTriple& iv,
                                                 const ChaosOptions& opts) {
    const Image im1 = image_of(rm, iv.p0, iv.alpha, opts.image_grid);
    const Image im2 = image_of(rm, iv.alpha, iv.kappa, opts.image_grid);
    const Image im3 = image_of(rm, iv.p1, iv.R0, opts.image_grid);

    auto depth = [](double e, const Image& im) {
        return std::min(e - im.lo, im.hi - e);
    };

    std::array<CoveringRelation, 3> rel;
    // I2 u I3 inside R(I1): alpha and R0 are pinned to the image bounds
    rel[0].source = 1;
    rel[0].targets = {2, 3};
    rel[0].image_lo = im1.lo;
    rel[0].image_hi = im1.hi;
    rel[0].margin = std::min(depth(iv.kappa, im1), depth(iv.p1, im1));
    rel[0].pinned_residual =
        std::max(std::abs(im1.lo - iv.alpha), std::abs(im1.hi - iv.R0));

    // I1 inside R(I2): alpha pinned (fixed point), p0 free
    rel[1].source = 2;
    rel[1].targets = {1};
    rel[1].image_lo = im2.lo;
    rel[1].image_hi = im2.hi;
    rel[1].margin = depth(iv.p0, im2);
    rel[1].pinned_residual = std::abs(im2.hi - iv.alpha);

    // I2 u I3 inside R(I3): R0 pinned (R(p1) = R(0)); alpha, kappa, p1 free
    rel[2].source = 3;
    rel[2].targets = {2, 3};
    rel[2].image_lo = im3.lo;
    rel[2].image_hi = im3.hi;
    rel[2].margin = std::min({depth(iv.alpha, im3), depth(iv.kappa, im3),
                              depth(iv.p1, im3)});
    rel[2].pinned_residual = std::abs(im3.hi - iv.R0);

    for (auto& r : rel)
        r.ok = r.margin >= opts.margin_min && r.pinned_residual <= opts.pin_tol;
    return rel;
}

namespace {

std::array<std::array<long long, 3>, 3> mat_mul(
    const std::array<std::array<long long, 3>, 3>& x,
    const std::array<std::array<long long, 3>, 3>& y) {
    std::array<std::array<long long, 3>, 3> z{};
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k)
            for (int j = 0; j < 3; ++j) z[i][j] += x[i][k] * y[k][j];
    return z;
}

}  // namespace

ChaosCertificate markov_certificate(const ReturnMap& rm, const IntervalTriple& iv,
                                    const std::array<CoveringRelation, 3>& rel,
                                    const ChaosOptions& opts) {
    (void)rm;
    for (int i = 0; i < 3; ++i) {
        if (!rel[i].ok) {
            std::ostringstream os;
            os << "certificate refused: covering relation ";
            os << (i == 0 ? "I2 u I3 c R(I1)" : i == 1 ? "I1 c R(I2)" : "I2 u I3 c R(I3)");
            os << " failed (margin = " << rel[i].margin
               << ", pinned residual = " << rel[i].pinned_residual
               << ", threshold = " << opts.margin_min << ")";
            throw Error(os.str());
        }
    }
    ChaosCertificate cert;
    cert.intervals = iv;
    cert.relations = rel;
    cert.adjacency = {{{0, 1, 1}, {1, 0, 0}, {0, 1, 1}}};

    std::array<std::array<long long, 3>, 3> A{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) A[i][j] = cert.adjacency[i][j];
    auto P = A;
    cert.transitive_power = 0;
    cert.orbit_counts.clear();
    for (int n = 1; n <= 8; ++n) {
        if (n > 1) P = mat_mul(P, A);
        cert.orbit_counts.push_back(P[0][0] + P[1][1] + P[2][2]);
        if (cert.transitive_power == 0) {
            bool all = true;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    if (P[i][j] <= 0) all = false;
            if (all) cert.transitive_power = n;
        }
    }

    // spectral radius by power iteration
    std::array<double, 3> x{1.0, 1.0, 1.0};
    double rho = 0.0;
    for (int it = 0; it < 500; ++it) {
        std::array<double, 3> y{};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) y[i] += cert.adjacency[i][j] * x[j];
        double norm = std::max({y[0], y[1], y[2]});
        if (norm <= 0.0) break;
        for (auto& v : y) v /= norm;
        if (std::abs(norm - rho) < 1e-15 && it > 8) { rho = norm; break; }
        rho = norm;
        x = y;
    }
    cert.spectral_radius = rho;
    cert.entropy_lower = std::log(rho);
    return cert;
}

namespace {

struct Branch {
    double lo, hi;     // domain
    double Rlo, Rhi;   // R at the endpoints (decreasing: Rlo > Rhi)
};

// preimage of [c, d] under R restricted to branch (strictly decreasing)
std::optional<std::pair<double, double>> preimage(const ReturnMap& rm, const Branch& br,
                                                  double c, double d) {
    const double cc = std::max(c, br.Rhi), dd = std::min(d, br.Rlo);
    if (cc > dd + 1e-12) return std::nullopt;
    const double xl = (dd >= br.Rlo) ? br.lo : bisect_decreasing(rm, dd, br.lo, br.hi);
    const double xr = (cc <= br.Rhi) ? br.hi : bisect_decreasing(rm, cc, br.lo, br.hi);
    if (xl > xr) return std::nullopt;
    return std::make_pair(xl, xr);
}

bool same_orbit(const std::vector<double>& a, const std::vector<double>& b) {
    for (double x : a) {
        bool found = false;
        for (double y : b)
            if (std::abs(x - y) < 1e-6 * (1.0 + std::abs(x))) found = true;
        if (!found) return false;
    }
    return true;
}

}  // namespace

std::vector<PeriodicOrbit> locate_periodic_orbits(const ReturnMap& rm,
                                                  const ChaosCertificate& cert,
                                                  int max_period) {
    const auto ivs = cert.intervals.intervals();
    std::array<Branch, 3> br{};
    for (int i = 0; i < 3; ++i) {
        br[i] = {ivs[i].first, ivs[i].second, rm(ivs[i].first), rm(ivs[i].second)};
        if (!(br[i].Rlo > br[i].Rhi))
            throw Error("locate_periodic_orbits: R not decreasing on I" +
                        std::to_string(i + 1));
    }
    const auto& A = cert.adjacency;

    std::vector<PeriodicOrbit> orbits;
    // word realizations are always kept (the census weighs them per rotation);
    // scan results are merged only if they add a new orbit
    auto push_word = [&](PeriodicOrbit&& o) { orbits.push_back(std::move(o)); };
    auto push_scan = [&](PeriodicOrbit&& o) {
        for (const auto& e : orbits)
            if (!o.points.empty() && !e.points.empty() && same_orbit(o.points, e.points))
                return;
        orbits.push_back(std::move(o));
    };

    // canonical (lexicographically least rotation) cyclic words per length
    for (int n = 1; n <= max_period; ++n) {
        std::vector<std::vector<int>> words;
        std::vector<int> w(n);
        auto gen = [&](auto&& self, int k) -> void {
            if (k == n) {
                if (!A[w[n - 1]][w[0]]) return;
                for (int r = 1; r < n; ++r) {
                    std::vector<int> rot(n);
                    for (int i = 0; i < n; ++i) rot[i] = w[(i + r) % n];
                    if (rot < w) return;  // keep canonical rotation only
                }
                words.push_back(w);
                return;
            }
            for (int s = 0; s < 3; ++s) {
                if (k > 0 && !A[w[k - 1]][s]) continue;
                w[k] = s;
                self(self, k + 1);
            }
        };
        gen(gen, 0);

        for (const auto& word : words) {
            PeriodicOrbit o;
            o.n = n;
            o.word.assign(word.begin(), word.end());
            for (auto& s : o.word) ++s;  // report 1-based interval indices
            o.rotations = n;
            for (int d = 1; d < n; ++d) {  // shift symmetry shrinks the count
                if (n % d) continue;
                bool sym = true;
                for (int i = 0; i < n; ++i)
                    if (word[i] != word[(i + d) % n]) sym = false;
                if (sym) { o.rotations = d; break; }
            }

            // nested preimage: S_k = I_{w_k} cap R|^-1(S_{k+1})
            std::pair<double, double> S{br[word[n - 1]].lo, br[word[n - 1]].hi};
            bool dead = false;
            for (int k = n - 2; k >= 0; --k) {
                auto pre = preimage(rm, br[word[k]], S.first, S.second);
                if (!pre) { dead = true; break; }
                S = *pre;
            }
            if (dead) { o.unresolved = true; push_word(std::move(o)); continue; }

            auto Rn = [&](double p) {
                double x = p;
                for (int k = 0; k < n; ++k) x = rm(x);
                return x;
            };
            double glo = Rn(S.first) - S.first, ghi = Rn(S.second) - S.second;
            double root;
            if (glo * ghi > 0.0) {
                // no interior crossing: accept an endpoint realization when an
                // endpoint is itself a fixed point of R^n (shared-endpoint case)
                if (std::abs(ghi) < 1e-6) root = S.second;
                else if (std::abs(glo) < 1e-6) root = S.first;
                else { o.unresolved = true; push_word(std::move(o)); continue; }
            } else {
                double lo = S.first, hi = S.second;
                for (int it = 0; it < 60 && hi - lo > 1e-12; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    (((Rn(mid) - mid > 0.0) == (glo > 0.0)) ? lo : hi) = mid;
                }
                root = 0.5 * (lo + hi);
            }

            double x = root;
            int jsum = 0;
            for (int k = 0; k < n; ++k) {
                o.points.push_back(x);
                const auto s = rm.eval(x);
                jsum += s.branch_j;
                x = s.R;
            }
            o.minimal_period = n;
            for (int d = 1; d < n; ++d)
                if (n % d == 0 &&
                    std::abs(o.points[d % n] - root) < 1e-6 * (1.0 + std::abs(root))) {
                    o.minimal_period = d;
                    break;
                }
            o.degenerate = o.minimal_period < o.rotations;
            o.period_in_T = 0;
            {
                double xx = root;
                for (int k = 0; k < o.minimal_period; ++k) {
                    const auto s = rm.eval(xx);
                    o.period_in_T += s.branch_j;
                    xx = s.R;
                }
            }
            push_word(std::move(o));
        }
    }

    // merge full-branch scans so periodic points outside the word structure
    // (or straddling it) are reported too
    const double hull_lo = std::max(1e-3, cert.intervals.p0 * 0.5);
    const double hull_hi = std::min(rm.problem().ftilde_max() * 0.995,
                                    cert.intervals.R0 + 0.4);
    for (int n = 1; n <= max_period; ++n) {
        for (const auto& fp : rm.fixed_points(n, hull_lo, hull_hi, 240)) {
            if (fp.minimal_period != n) continue;
            PeriodicOrbit o;
            o.n = n;
            o.minimal_period = n;
            o.period_in_T = fp.period_in_T;
            double x = fp.p;
            for (int k = 0; k < n; ++k) {
                o.points.push_back(x);
                x = rm(x);
            }
            push_scan(std::move(o));
        }
    }
    return orbits;
}

int word_census(const std::vector<PeriodicOrbit>& orbits, int n) {
    int count = 0;
    for (const auto& o : orbits)
        if (!o.word.empty() && !o.unresolved && o.n == n) count += o.rotations;
    return count;
}

ChaosCertificate certify(const ReturnMap& rm, const ChaosOptions& opts) {
    const IntervalTriple iv = build_intervals(rm, opts);
    const auto rel = verify_coverings(rm, iv, opts);
    ChaosCertificate cert = markov_certificate(rm, iv, rel, opts);
    cert.located_orbits = locate_periodic_orbits(rm, cert, opts.max_period);
    return cert;
}

std::string summarize(const ChaosCertificate& cert) {
    std::ostringstream os;
    const auto& iv = cert.intervals;
    os << "intervals: I1=[" << iv.p0 << ", " << iv.alpha << "]  I2=[" << iv.alpha
       << ", " << iv.kappa << "]  I3=[" << iv.p1 << ", " << iv.R0 << "]\n";
    const char* names[3] = {"I2uI3 c R(I1)", "I1 c R(I2)", "I2uI3 c R(I3)"};
    for (int i = 0; i < 3; ++i)
        os << "covering " << names[i] << ": margin " << cert.relations[i].margin
           << " (pinned residual " << cert.relations[i].pinned_residual << ")\n";
    os << "adjacency rows:";
    for (const auto& row : cert.adjacency)
        os << " [" << row[0] << row[1] << row[2] << "]";
    os << "\ntransitive power: " << cert.transitive_power
       << "\nentropy lower bound: " << cert.entropy_lower
       << " (spectral radius " << cert.spectral_radius << ")\norbit counts Tr A^n:";
    for (auto c : cert.orbit_counts) os << " " << c;
    os << "\nlocated orbits:\n";
    for (const auto& o : cert.located_orbits) {
        os << "  n=" << o.n;
        if (!o.word.empty()) {
            os << " word=";
            for (int s : o.word) os << s;
        }
        if (o.unresolved) {
            os << " UNRESOLVED\n";
            continue;
        }
        if (o.degenerate) os << " (endpoint realization)";
        os << " minimal=" << o.minimal_period << " periodT=" << o.period_in_T
           << " points=";
        for (double p : o.points) os << p << " ";
        os << "\n";
    }
    return os.str();
}

}  // namespace maxdde
