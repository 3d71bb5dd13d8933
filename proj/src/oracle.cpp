#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "tunnelion/csv.hpp"
#include "tunnelion/errors.hpp"
#include "tunnelion/numerics.hpp"
#include "tunnelion/oracle.hpp"

namespace tunnelion {

GaussianPacketSpec GaussianPacketSpec::from_energy(double eps0, double rel_width, double x0) {
    if (!(eps0 > 0.0)) throw DomainError("packet energy must be positive");
    if (!(rel_width > 0.0 && rel_width < 0.25)) throw DomainError("relative momentum width must be in (0, 0.25)");
    GaussianPacketSpec s;
    s.x0 = x0;
    s.p0 = std::sqrt(2.0 * eps0);
    s.dp = rel_width * s.p0;
    return s;
}

void GaussianPacketSpec::validate(const BarrierModel& b) const {
    if (!(p0 > 0.0 && dp > 0.0 && dp < 0.25 * p0)) throw DomainError("packet needs p0 > 0 and 0 < dp << p0");
    if (b.shape() == Shape::Square || b.shape() == Shape::Linear || b.shape() == Shape::Parabolic) {
        if (!(energy() + p0 * dp < b.V0())) {
            std::ostringstream os;
            os << "packet energy range reaches the barrier top: eps0 + p0 dp = " << energy() + p0 * dp
               << ", V0 = " << b.V0();
            throw DomainError(os.str());
        }
    }
    if (!(x0 + 6.0 * width_x() < 0.0)) throw DomainError("packet overlaps the barrier at t = 0");
}

double predicted_arrival(double tau, const GaussianPacketSpec& spec) { return tau - spec.x0 / spec.p0; }

namespace {

struct Node {
    double p, w;  // w includes the Gaussian amplitude
};

std::vector<Node> packet_nodes(const GaussianPacketSpec& s, double span, std::size_t panels) {
    using GL = boost::math::quadrature::gauss<double, 8>;
    const auto& xs = GL::abscissa();
    const auto& ws = GL::weights();
    const double lo = s.p0 - span * s.dp, hi = s.p0 + span * s.dp;
    if (!(lo > 0.0)) throw DomainError("packet momentum range reaches p <= 0");
    const double h = (hi - lo) / static_cast<double>(panels);
    const double amp = 1.0 / (std::sqrt(2.0 * kPi) * std::pow(2.0 * kPi * s.dp * s.dp, 0.25));
    std::vector<Node> nodes;
    auto add = [&](double p, double w) {
        const double d = (p - s.p0) / s.dp;
        nodes.push_back({p, w * 0.5 * h * amp * std::exp(-0.25 * d * d)});
    };
    for (std::size_t k = 0; k < panels; ++k) {
        const double mid = lo + (static_cast<double>(k) + 0.5) * h;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (xs[i] == 0.0) {
                add(mid, ws[i]);
            } else {
                add(mid - 0.5 * h * xs[i], ws[i]);
                add(mid + 0.5 * h * xs[i], ws[i]);
            }
        }
    }
    return nodes;
}

// Steady states at every node with the e^{-i p x0} shift folded in.
std::vector<std::vector<cplx>> node_states(const SteadyProblem& pr, const GaussianPacketSpec& s,
                                           const std::vector<Node>& nodes, std::span<const double> x) {
    std::vector<std::vector<cplx>> u(nodes.size());
    SteadyOptions so;
    so.refine_phase = false;
    parallel_for(nodes.size(), [&](std::size_t j) {
        const SteadyState st = pr.solve(0.5 * nodes[j].p * nodes[j].p, s.p_z, x, so);
        const cplx shift = nodes[j].w * std::exp(cplx(0.0, -nodes[j].p * s.x0));
        u[j].resize(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) u[j][i] = shift * st.u[i];
    });
    return u;
}

std::vector<double> density_row(const std::vector<Node>& nodes, const std::vector<std::vector<cplx>>& u,
                                double t, std::size_t nx) {
    std::vector<cplx> psi(nx, cplx(0.0, 0.0));
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        const cplx ph = std::exp(cplx(0.0, -0.5 * nodes[j].p * nodes[j].p * t));
        const auto& uj = u[j];
        for (std::size_t i = 0; i < nx; ++i) psi[i] += ph * uj[i];
    }
    std::vector<double> d(nx);
    for (std::size_t i = 0; i < nx; ++i) d[i] = std::norm(psi[i]);
    return d;
}

}  // namespace

PacketDensity propagate_packet(const SteadyProblem& pr, const GaussianPacketSpec& spec,
                               std::span<const double> t, std::span<const double> x,
                               const PacketQuadrature& q) {
    if (!pr.is_scattering()) throw UnsupportedError("packet propagation needs a scattering problem");
    spec.validate(pr.barrier());
    if (x.size() < 2 || t.empty()) throw DomainError("packet grids must be non-empty");
    if (!std::is_sorted(x.begin(), x.end())) throw DomainError("x grid must be ascending");
    if (q.panels == 0 || !(q.span >= 4.0)) throw DomainError("packet quadrature needs panels > 0 and span >= 4");

    PacketDensity d;
    d.spec = spec;
    d.x.assign(x.begin(), x.end());
    d.t.assign(t.begin(), t.end());
    const std::vector<Node> nodes = packet_nodes(spec, q.span, q.panels);
    d.nodes = nodes.size();
    d.core_nodes = static_cast<std::size_t>(std::count_if(
        nodes.begin(), nodes.end(), [&](const Node& n) { return std::abs(n.p - spec.p0) <= 4.0 * spec.dp; }));
    const auto u = node_states(pr, spec, nodes, x);

    const std::size_t nx = x.size(), nt = t.size();
    d.density.resize(nt * nx);
    d.norm.resize(nt);
    parallel_for(nt, [&](std::size_t it) {
        const std::vector<double> row = density_row(nodes, u, t[it], nx);
        std::copy(row.begin(), row.end(), d.density.begin() + static_cast<std::ptrdiff_t>(it * nx));
        double s = 0.0;
        for (std::size_t i = 1; i < nx; ++i) s += 0.5 * (row[i] + row[i - 1]) * (x[i] - x[i - 1]);
        d.norm[it] = s;
    });

    if (q.check) {
        const std::vector<Node> fine = packet_nodes(spec, q.span, 2 * q.panels);
        const auto uf = node_states(pr, spec, fine, x);
        const std::size_t probe[] = {0, nt / 2, nt - 1};
        double peak = 0.0;
        for (double v : d.density) peak = std::max(peak, v);
        for (std::size_t it : probe) {
            const std::vector<double> row = density_row(fine, uf, t[it], nx);
            for (std::size_t i = 0; i < nx; ++i)
                d.quadrature_change = std::max(d.quadrature_change, std::abs(row[i] - d.at(it, i)));
        }
        d.quadrature_change /= peak;
        if (d.quadrature_change > q.check_tol) {
            std::ostringstream os;
            os << "packet quadrature under-resolved: doubling the nodes changes the density by "
               << d.quadrature_change << " of its maximum";
            throw ConvergenceError(os.str());
        }
    }
    return d;
}

PeakTrack track_peak(const PacketDensity& d, double lo, double hi, double rel_threshold) {
    const auto& x = d.x;
    const auto first = static_cast<std::size_t>(std::lower_bound(x.begin(), x.end(), lo) - x.begin());
    const auto last = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), hi) - x.begin());
    if (last < first + 3) throw DomainError("peak region holds fewer than three grid points");

    PeakTrack pt;
    pt.trajectory.provenance = Provenance::packet_peak;
    const double shift = d.spec.x0 / d.spec.p0;
    for (std::size_t it = 0; it < d.t.size(); ++it) {
        const auto row = d.row(it);
        std::size_t best = first;
        for (std::size_t i = first; i < last; ++i)
            if (row[i] > row[best]) best = i;

        PeakSample s;
        s.t = d.t[it];
        for (std::size_t i = first + 1; i + 1 < last; ++i)
            if (row[i] > row[i - 1] && row[i] >= row[i + 1] && row[i] >= rel_threshold * row[best])
                s.maxima.push_back(x[i]);
        s.multimodal = s.maxima.size() > 1;
        s.at_edge = best == first || best + 1 == last;
        s.x = s.at_edge ? x[best]
                        : parabola_vertex(x[best - 1], row[best - 1], x[best], row[best], x[best + 1], row[best + 1]);
        pt.any_multimodal = pt.any_multimodal || s.multimodal;
        if (!s.at_edge) {
            pt.trajectory.x.push_back(s.x);
            pt.trajectory.tau.push_back(s.t + shift);
        }
        pt.samples.push_back(std::move(s));
    }
    return pt;
}

void write_density_csv(const std::filesystem::path& path, const PacketDensity& d) {
    CsvWriter w(path, {"x", "t", "density"});
    for (std::size_t it = 0; it < d.t.size(); ++it)
        for (std::size_t i = 0; i < d.x.size(); ++i) w.row({d.x[i], d.t[it], d.at(it, i)});
}

}  // namespace tunnelion
