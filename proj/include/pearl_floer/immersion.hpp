/**
 * Geometry pipeline for immersed Lagrangians in C^n.
 *
 * An immersion is described chart by chart.  Every chart carries local
 * coordinates in R^n; the position and differential callbacks receive a
 * ChartPoint (chart, patch, coordinates).  Two chart kinds exist:
 *
 *  - BoxChart: a box in R^n, optionally periodic per axis.  Sampled on a
 *    full tensor grid.  Callbacks must be periodic along periodic axes.
 *  - SuspensionChart: the sphere S^n written as (s, x) with s in [0, 1]
 *    and x in S^{n-1}.  It is covered by two patches, south (y = s x) and
 *    north (y = (1 - s) x), so both poles are ordinary points.  The
 *    meridian direction is resolved with `resolution` steps and the
 *    S^{n-1} factor by the cross-polytope directions +-e_j; latitude edges
 *    close loops between them.
 *
 * Passes: sample_immersion builds frames, compute_primitive integrates
 * iota^* sigma along a spanning tree, compute_grading lifts the Det^2 phase
 * and find_double_points locates and classifies transverse self-crossings.
 */
#ifndef PEARL_FLOER_IMMERSION_HPP
#define PEARL_FLOER_IMMERSION_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <deque>
#include <queue>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "floer_complex.hpp"
#include "geom_kernel.hpp"
#include "parallel.hpp"

namespace pearl {

inline constexpr int kSouth = 0;
inline constexpr int kNorth = 1;
inline constexpr int kMinResolution = 4;
inline constexpr int kDefaultResolution = 64;
inline constexpr double kTolExact = 1e-6;
inline constexpr double kTolIndex = 1e-4;

struct ChartPoint
{
    int chart = 0;
    int patch = 0;
    RVector coords;
};

struct BoxChart
{
    std::vector<double> lo;
    std::vector<double> hi;
    std::vector<bool> periodic;
};

struct SuspensionChart
{
};

struct Chart
{
    std::string name;
    std::variant<BoxChart, SuspensionChart> domain;
};

using PositionFn = std::function<CVector(const ChartPoint&)>;
// Column k is d iota applied to the k-th local coordinate vector.
using DifferentialFn = std::function<CMatrix(const ChartPoint&)>;

struct ImmersionSpec
{
    AmbientSpace ambient{1};
    std::vector<Chart> charts;
    PositionFn position;
    DifferentialFn differential; // empty: central finite differences
    int resolution = kDefaultResolution;
    double fd_h = 1e-6;        // relative finite-difference step
    int quad_substeps = 0;     // trapezoid intervals per mesh edge; 0 = 16384 / resolution
    double tol_frame = kTolFrame;

    int dim() const { return ambient.dim(); }

    int substeps() const
    {
        if (quad_substeps > 0)
            return quad_substeps;
        return std::max(16, (16384 + resolution - 1) / std::max(1, resolution));
    }
};

// ---------------------------------------------------------------------------
// Chart geometry

namespace detail {

inline double wrap_half(double x) { return x - std::round(x); }

inline const Chart& chart_of(const ImmersionSpec& spec, const ChartPoint& p)
{
    if (p.chart < 0 || static_cast<std::size_t>(p.chart) >= spec.charts.size())
        throw Error(ErrorKind::InvalidArgument, "chart index out of range");
    return spec.charts[static_cast<std::size_t>(p.chart)];
}

inline bool is_suspension(const Chart& c) { return std::holds_alternative<SuspensionChart>(c.domain); }

// Height s in [0, 1] of a suspension point.
inline double suspension_height(const ChartPoint& p)
{
    const double r = p.coords.norm();
    return p.patch == kSouth ? r : 1.0 - r;
}

inline ChartPoint to_patch(const Chart& chart, const ChartPoint& p, int patch)
{
    if (p.patch == patch)
        return p;
    if (!is_suspension(chart))
        throw Error(ErrorKind::InvalidArgument, "box charts have a single patch");
    const double r = p.coords.norm();
    if (r == 0.0)
        throw Error(ErrorKind::InvalidArgument, "a pole has no coordinates in the opposite patch");
    ChartPoint q = p;
    q.patch = patch;
    q.coords = p.coords * ((1.0 - r) / r);
    return q;
}

// Period-aware embedding of local coordinates; chordal distances here are
// parameter distances.
inline RVector canonical_coords(const Chart& chart, const ChartPoint& p)
{
    if (is_suspension(chart)) {
        const double r = p.coords.norm();
        const double s = suspension_height(p);
        RVector out(p.coords.size() + 1);
        out(0) = std::cos(std::numbers::pi * s);
        const double scale = r > 0.0 ? std::sin(std::numbers::pi * s) / r : 0.0;
        out.tail(p.coords.size()) = p.coords * scale;
        return out;
    }
    const auto& box = std::get<BoxChart>(chart.domain);
    std::vector<double> v;
    for (Eigen::Index d = 0; d < p.coords.size(); ++d) {
        const auto k = static_cast<std::size_t>(d);
        if (box.periodic[k]) {
            const double period = box.hi[k] - box.lo[k];
            const double angle = 2.0 * std::numbers::pi * (p.coords(d) - box.lo[k]) / period;
            v.push_back(period / (2.0 * std::numbers::pi) * std::cos(angle));
            v.push_back(period / (2.0 * std::numbers::pi) * std::sin(angle));
        } else {
            v.push_back(p.coords(d));
        }
    }
    return Eigen::Map<RVector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline bool in_domain(const Chart& chart, const ChartPoint& p)
{
    if (!p.coords.allFinite())
        return false;
    if (is_suspension(chart))
        return p.coords.norm() < 1.0 - 1e-12;
    const auto& box = std::get<BoxChart>(chart.domain);
    for (Eigen::Index d = 0; d < p.coords.size(); ++d) {
        const auto k = static_cast<std::size_t>(d);
        if (box.periodic[k])
            continue;
        const double slack = 1e-9 * (box.hi[k] - box.lo[k]);
        if (p.coords(d) < box.lo[k] - slack || p.coords(d) > box.hi[k] + slack)
            return false;
    }
    return true;
}

// Periodic axes wrapped into [lo, hi); suspension points moved to the
// patch in which they are closest to the pole.
inline ChartPoint normalized(const Chart& chart, ChartPoint p, double switch_radius = 0.5)
{
    if (is_suspension(chart)) {
        if (p.coords.norm() > switch_radius)
            p = to_patch(chart, p, p.patch == kSouth ? kNorth : kSouth);
        return p;
    }
    const auto& box = std::get<BoxChart>(chart.domain);
    for (Eigen::Index d = 0; d < p.coords.size(); ++d) {
        const auto k = static_cast<std::size_t>(d);
        if (!box.periodic[k])
            continue;
        const double period = box.hi[k] - box.lo[k];
        p.coords(d) = box.lo[k] + std::fmod(std::fmod(p.coords(d) - box.lo[k], period) + period, period);
    }
    return p;
}

// Both endpoints in one patch, with periodic coordinates of b unwrapped
// next to a, so the straight segment between them is a short path.
inline std::pair<ChartPoint, ChartPoint> common_path(const Chart& chart, const ChartPoint& a, const ChartPoint& b)
{
    if (a.chart != b.chart)
        throw Error(ErrorKind::InvalidArgument, "path endpoints lie in different charts");
    if (is_suspension(chart)) {
        int patch;
        if (a.coords.norm() == 0.0)
            patch = a.patch;
        else if (b.coords.norm() == 0.0)
            patch = b.patch;
        else
            patch = 0.5 * (suspension_height(a) + suspension_height(b)) <= 0.5 ? kSouth : kNorth;
        return {to_patch(chart, a, patch), to_patch(chart, b, patch)};
    }
    const auto& box = std::get<BoxChart>(chart.domain);
    ChartPoint bb = b;
    for (Eigen::Index d = 0; d < b.coords.size(); ++d) {
        const auto k = static_cast<std::size_t>(d);
        if (!box.periodic[k])
            continue;
        const double period = box.hi[k] - box.lo[k];
        bb.coords(d) = a.coords(d) + period * wrap_half((b.coords(d) - a.coords(d)) / period);
    }
    return {a, bb};
}

inline std::string describe(const Chart& chart, const ChartPoint& p)
{
    std::ostringstream os;
    os << chart.name << "[patch " << p.patch << "](";
    for (Eigen::Index d = 0; d < p.coords.size(); ++d)
        os << (d ? ", " : "") << p.coords(d);
    os << ")";
    return os.str();
}

} // namespace detail

// ---------------------------------------------------------------------------
// Evaluation

class ImmersionEvaluator
{
public:
    explicit ImmersionEvaluator(const ImmersionSpec& spec) : spec_(spec)
    {
        if (!spec_.position)
            throw Error(ErrorKind::InvalidArgument, "immersion has no position callback");
    }

    const ImmersionSpec& spec() const noexcept { return spec_; }

    CVector position(const ChartPoint& p) const { return spec_.position(p); }

    CMatrix differential(const ChartPoint& p) const
    {
        const int n = spec_.dim();
        if (spec_.differential) {
            CMatrix d = spec_.differential(p);
            if (d.rows() != n || d.cols() != n)
                throw Error(ErrorKind::DimensionMismatch, "differential callback must return n x n");
            return d;
        }
        CMatrix d(n, n);
        for (int k = 0; k < n; ++k) {
            const double h = spec_.fd_h * std::max(1.0, std::abs(p.coords(k)));
            ChartPoint plus = p, minus = p;
            plus.coords(k) += h;
            minus.coords(k) -= h;
            d.col(k) = (position(plus) - position(minus)) / (2.0 * h);
        }
        return d;
    }

    CVector directional(const ChartPoint& p, const RVector& dir) const
    {
        if (spec_.differential)
            return differential(p) * dir.cast<Complex>();
        const double len = dir.norm();
        if (len == 0.0)
            return CVector::Zero(spec_.dim());
        const double h = spec_.fd_h * std::max(1.0, p.coords.norm());
        ChartPoint plus = p, minus = p;
        plus.coords += (h / len) * dir;
        minus.coords -= (h / len) * dir;
        return (position(plus) - position(minus)) * (len / (2.0 * h));
    }

    LagrangianFrame frame(const ChartPoint& p) const
    {
        try {
            return make_unitary_frame(differential(p), spec_.tol_frame);
        } catch (const Error& e) {
            const auto& chart = detail::chart_of(spec_, p);
            throw Error(e.kind(), std::string(e.what()) + " at " + detail::describe(chart, p), e.value());
        }
    }

    // Composite trapezoid rule for iota^* sigma along the straight segment
    // from -> to (same chart and patch).
    double path_integral(const ChartPoint& from, const ChartPoint& to) const
    {
        const int m = spec_.substeps();
        const RVector delta = to.coords - from.coords;
        double sum = 0.0;
        ChartPoint p = from;
        for (int j = 0; j <= m; ++j) {
            p.coords = from.coords + (static_cast<double>(j) / m) * delta;
            const double f = AmbientSpace::sigma(position(p), directional(p, delta));
            sum += (j == 0 || j == m) ? 0.5 * f : f;
        }
        return sum / m;
    }

private:
    const ImmersionSpec& spec_;
};

// ---------------------------------------------------------------------------
// Mesh

struct MeshSample
{
    ChartPoint where;
    CVector point;
    LagrangianFrame frame;
    double phase = 0.0; // det_squared_phase of the frame
    double h = std::numeric_limits<double>::quiet_NaN();
    double theta = std::numeric_limits<double>::quiet_NaN();
};

struct MeshEdge
{
    std::size_t a = 0;
    std::size_t b = 0;
    ChartPoint from; // a, expressed in the integration patch
    ChartPoint to;   // b, same patch, unwrapped
    bool resolving = true; // counts toward local mesh spacing
};

struct ImmersionMesh
{
    std::shared_ptr<const ImmersionSpec> spec;
    std::vector<MeshSample> samples;
    std::vector<MeshEdge> edges;
    std::vector<double> chart_cell; // parameter step per chart
    bool has_primitive = false;
    bool has_grading = false;
    double max_exactness_residual = 0.0;
    double max_theta_jump = 0.0;
    std::size_t loop_count = 0;
};

enum class TreeOrder
{
    BreadthFirst,
    DepthFirst,
};

namespace detail {

struct PendingSample
{
    ChartPoint where;
};

inline void layout_box(const ImmersionSpec& spec, int chart_index, const BoxChart& box,
                       std::vector<ChartPoint>& points, std::vector<MeshEdge>& edges, double& cell)
{
    const int n = spec.dim();
    const int r = spec.resolution;
    if (static_cast<int>(box.lo.size()) != n || static_cast<int>(box.hi.size()) != n ||
        static_cast<int>(box.periodic.size()) != n)
        throw Error(ErrorKind::DimensionMismatch, "box chart must have n axes");
    std::vector<std::size_t> counts(static_cast<std::size_t>(n));
    double total = 1.0;
    cell = 0.0;
    for (int d = 0; d < n; ++d) {
        const auto k = static_cast<std::size_t>(d);
        if (!(box.hi[k] > box.lo[k]))
            throw Error(ErrorKind::InvalidArgument, "box chart axis has empty range");
        counts[k] = box.periodic[k] ? static_cast<std::size_t>(r) : static_cast<std::size_t>(r) + 1;
        total *= static_cast<double>(counts[k]);
        cell = std::max(cell, (box.hi[k] - box.lo[k]) / r);
    }
    if (total > 4.0e6)
        throw Error(ErrorKind::InvalidArgument, "box grid too large; lower the resolution");

    const std::size_t base = points.size();
    const auto count = static_cast<std::size_t>(total);
    std::vector<std::size_t> idx(static_cast<std::size_t>(n));
    auto coords_of = [&](const std::vector<std::size_t>& ii) {
        RVector y(n);
        for (int d = 0; d < n; ++d) {
            const auto k = static_cast<std::size_t>(d);
            y(d) = box.lo[k] + (box.hi[k] - box.lo[k]) * static_cast<double>(ii[k]) / r;
        }
        return y;
    };
    auto linear = [&](const std::vector<std::size_t>& ii) {
        std::size_t lin = 0;
        for (int d = n - 1; d >= 0; --d)
            lin = lin * counts[static_cast<std::size_t>(d)] + ii[static_cast<std::size_t>(d)];
        return lin;
    };
    for (std::size_t lin = 0; lin < count; ++lin) {
        std::size_t rem = lin;
        for (int d = 0; d < n; ++d) {
            idx[static_cast<std::size_t>(d)] = rem % counts[static_cast<std::size_t>(d)];
            rem /= counts[static_cast<std::size_t>(d)];
        }
        points.push_back({chart_index, 0, coords_of(idx)});
    }
    for (std::size_t lin = 0; lin < count; ++lin) {
        std::size_t rem = lin;
        for (int d = 0; d < n; ++d) {
            idx[static_cast<std::size_t>(d)] = rem % counts[static_cast<std::size_t>(d)];
            rem /= counts[static_cast<std::size_t>(d)];
        }
        for (int d = 0; d < n; ++d) {
            const auto k = static_cast<std::size_t>(d);
            auto nb = idx;
            RVector to = points[base + lin].coords;
            const double step = (box.hi[k] - box.lo[k]) / r;
            if (idx[k] + 1 < counts[k]) {
                nb[k] = idx[k] + 1;
            } else if (box.periodic[k]) {
                nb[k] = 0;
            } else {
                continue;
            }
            to(d) += step;
            MeshEdge e;
            e.a = base + lin;
            e.b = base + linear(nb);
            e.from = points[e.a];
            e.to = {chart_index, 0, to};
            edges.push_back(std::move(e));
        }
    }
}

inline void layout_suspension(const ImmersionSpec& spec, int chart_index, const Chart& chart,
                              std::vector<ChartPoint>& points, std::vector<MeshEdge>& edges, double& cell)
{
    const int n = spec.dim();
    const int r = spec.resolution;
    cell = std::numbers::pi / r;
    const std::size_t base = points.size();
    const std::size_t dirs = 2 * static_cast<std::size_t>(n);

    auto direction = [&](std::size_t k) {
        RVector x = RVector::Zero(n);
        x(static_cast<Eigen::Index>(k / 2)) = (k % 2 == 0) ? 1.0 : -1.0;
        return x;
    };
    auto ring_point = [&](int level, std::size_t k) {
        const double s = static_cast<double>(level) / r;
        return s <= 0.5 ? ChartPoint{chart_index, kSouth, s * direction(k)}
                        : ChartPoint{chart_index, kNorth, (1.0 - s) * direction(k)};
    };

    points.push_back({chart_index, kSouth, RVector::Zero(n)});
    for (int level = 1; level < r; ++level)
        for (std::size_t k = 0; k < dirs; ++k)
            points.push_back(ring_point(level, k));
    points.push_back({chart_index, kNorth, RVector::Zero(n)});

    const std::size_t south = base;
    const std::size_t north = points.size() - 1;
    auto ring_index = [&](int level, std::size_t k) {
        return base + 1 + static_cast<std::size_t>(level - 1) * dirs + k;
    };
    auto add_edge = [&](std::size_t a, std::size_t b, bool resolving) {
        auto [from, to] = common_path(chart, points[a], points[b]);
        edges.push_back({a, b, std::move(from), std::move(to), resolving});
    };

    for (std::size_t k = 0; k < dirs; ++k) {
        std::size_t prev = south;
        for (int level = 1; level < r; ++level) {
            add_edge(prev, ring_index(level, k), true);
            prev = ring_index(level, k);
        }
        add_edge(prev, north, true);
    }
    for (int level = 1; level < r; ++level)
        for (std::size_t k = 0; k < dirs; ++k)
            for (std::size_t j = k + 1; j < dirs; ++j)
                if (j / 2 != k / 2)
                    add_edge(ring_index(level, k), ring_index(level, j), false);
}

struct SpanningTree
{
    std::vector<std::size_t> order;                   // visit order, root first
    std::vector<std::optional<std::size_t>> parent_edge; // per sample
    std::vector<bool> in_tree;                        // per edge
};

inline SpanningTree spanning_tree(const ImmersionMesh& mesh, std::size_t root, TreeOrder order)
{
    const std::size_t n = mesh.samples.size();
    if (root >= n)
        throw Error(ErrorKind::InvalidArgument, "basepoint out of range");
    std::vector<std::vector<std::size_t>> adj(n);
    for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
        adj[mesh.edges[e].a].push_back(e);
        adj[mesh.edges[e].b].push_back(e);
    }
    SpanningTree t;
    t.parent_edge.assign(n, std::nullopt);
    t.in_tree.assign(mesh.edges.size(), false);
    std::vector<bool> seen(n, false);
    std::deque<std::size_t> frontier{root};
    seen[root] = true;
    while (!frontier.empty()) {
        std::size_t u;
        if (order == TreeOrder::BreadthFirst) {
            u = frontier.front();
            frontier.pop_front();
        } else {
            u = frontier.back();
            frontier.pop_back();
        }
        t.order.push_back(u);
        for (std::size_t e : adj[u]) {
            const std::size_t v = mesh.edges[e].a == u ? mesh.edges[e].b : mesh.edges[e].a;
            if (seen[v])
                continue;
            seen[v] = true;
            t.parent_edge[v] = e;
            t.in_tree[e] = true;
            frontier.push_back(v);
        }
    }
    if (t.order.size() != n)
        throw Error(ErrorKind::InvalidArgument, "mesh is not connected");
    return t;
}

} // namespace detail

inline ImmersionMesh sample_immersion(ImmersionSpec spec_in)
{
    auto spec = std::make_shared<const ImmersionSpec>(std::move(spec_in));
    if (spec->resolution < kMinResolution)
        throw Error(ErrorKind::InvalidArgument, "resolution below the minimum of " + std::to_string(kMinResolution));
    if (spec->charts.empty())
        throw Error(ErrorKind::InvalidArgument, "immersion has no charts");

    ImmersionMesh mesh;
    mesh.spec = spec;
    std::vector<ChartPoint> points;
    for (std::size_t c = 0; c < spec->charts.size(); ++c) {
        double cell = 0.0;
        const auto& chart = spec->charts[c];
        if (detail::is_suspension(chart))
            detail::layout_suspension(*spec, static_cast<int>(c), chart, points, mesh.edges, cell);
        else
            detail::layout_box(*spec, static_cast<int>(c), std::get<BoxChart>(chart.domain), points, mesh.edges,
                               cell);
        mesh.chart_cell.push_back(cell);
    }

    const ImmersionEvaluator eval(*spec);
    std::vector<std::optional<MeshSample>> slots(points.size());
    parallel_for(points.size(), [&](std::size_t i) {
        auto frame = eval.frame(points[i]);
        const double phase = det_squared_phase(frame);
        slots[i].emplace(MeshSample{points[i], eval.position(points[i]), std::move(frame), phase});
    });
    mesh.samples.reserve(points.size());
    for (auto& s : slots)
        mesh.samples.push_back(std::move(*s));
    return mesh;
}

/**
 * h by trapezoidal integration of iota^* sigma along a spanning tree from
 * the basepoint (h = 0 there).  Every non-tree edge closes a loop whose
 * integral is the residual; NotExact if any exceeds tol_exact.
 */
inline ImmersionMesh compute_primitive(ImmersionMesh mesh, std::size_t basepoint, double tol_exact = kTolExact,
                                       TreeOrder order = TreeOrder::BreadthFirst)
{
    const ImmersionEvaluator eval(*mesh.spec);
    std::vector<double> integral(mesh.edges.size());
    parallel_for(mesh.edges.size(),
                 [&](std::size_t e) { integral[e] = eval.path_integral(mesh.edges[e].from, mesh.edges[e].to); });

    const auto tree = detail::spanning_tree(mesh, basepoint, order);
    mesh.samples[basepoint].h = 0.0;
    for (std::size_t v : tree.order) {
        if (!tree.parent_edge[v])
            continue;
        const auto& e = mesh.edges[*tree.parent_edge[v]];
        mesh.samples[v].h = (e.b == v) ? mesh.samples[e.a].h + integral[*tree.parent_edge[v]]
                                       : mesh.samples[e.b].h - integral[*tree.parent_edge[v]];
    }

    double worst = 0.0;
    std::size_t loops = 0;
    for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
        if (tree.in_tree[e])
            continue;
        ++loops;
        const auto& edge = mesh.edges[e];
        worst = std::max(worst, std::abs(mesh.samples[edge.a].h + integral[e] - mesh.samples[edge.b].h));
    }
    mesh.max_exactness_residual = worst;
    mesh.loop_count = loops;
    if (worst > tol_exact)
        throw Error(ErrorKind::NotExact, "loop integral of iota^* sigma is " + std::to_string(worst), worst);
    mesh.has_primitive = true;
    return mesh;
}

/**
 * theta by lifting the Det^2 phase along a spanning tree, each edge taking
 * the jump of absolute value below 1/2.  A non-tree edge whose lift
 * disagrees closes a loop with nonzero integer holonomy: NotGraded.
 */
inline ImmersionMesh compute_grading(ImmersionMesh mesh, std::size_t basepoint,
                                     TreeOrder order = TreeOrder::BreadthFirst)
{
    const auto tree = detail::spanning_tree(mesh, basepoint, order);
    auto& s = mesh.samples;
    s[basepoint].theta = s[basepoint].phase;
    double max_jump = 0.0;
    for (std::size_t v : tree.order) {
        if (!tree.parent_edge[v])
            continue;
        const auto& e = mesh.edges[*tree.parent_edge[v]];
        const std::size_t u = e.a == v ? e.b : e.a;
        const double jump = detail::wrap_half(s[v].phase - s[u].phase);
        max_jump = std::max(max_jump, std::abs(jump));
        s[v].theta = s[u].theta + jump;
    }
    for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
        if (tree.in_tree[e])
            continue;
        const auto& edge = mesh.edges[e];
        const double jump = detail::wrap_half(s[edge.b].phase - s[edge.a].phase);
        max_jump = std::max(max_jump, std::abs(jump));
        const double defect = s[edge.a].theta + jump - s[edge.b].theta;
        const long holonomy = std::lround(defect);
        if (holonomy != 0)
            throw Error(ErrorKind::NotGraded,
                        "Det^2 phase has holonomy " + std::to_string(holonomy) + " around a mesh loop",
                        static_cast<double>(holonomy));
    }
    mesh.max_theta_jump = max_jump;
    mesh.has_grading = true;
    return mesh;
}

// ---------------------------------------------------------------------------
// Double points

struct DoublePointOptions
{
    double refine_tol = 1e-10;
    double tol_index = kTolIndex;
    double tol_transverse = kTolTransverse;
    double exclusion_cells = 3.0;
    int max_newton = 40;
    double newton_step_tol = 1e-12;
};

struct DoublePointRecord
{
    std::string id;         // generator id of this ordered lift
    std::string partner_id; // the reversed lift
    std::string p_id;
    std::string q_id;
    std::size_t geometric_index = 0;
    ChartPoint p;
    ChartPoint q;
    CVector point;
    KahlerAngles angles;
    double h_p = 0.0;
    double h_q = 0.0;
    double theta_p = 0.0;
    double theta_q = 0.0;
    double action = 0.0; // h(q) - h(p)
    double index_raw = 0.0;
    int index = 0;
    double residual = 0.0;
};

namespace detail {

struct Root
{
    CVector point;
    ChartPoint a;
    ChartPoint b;
};

inline RVector realify(const CVector& z)
{
    RVector v(2 * z.size());
    v.head(z.size()) = z.real();
    v.tail(z.size()) = z.imag();
    return v;
}

inline std::optional<Root> newton_refine(const ImmersionEvaluator& eval, ChartPoint a, ChartPoint b,
                                         const DoublePointOptions& opt)
{
    const auto& spec = eval.spec();
    const int n = spec.dim();
    const auto& ca = chart_of(spec, a);
    const auto& cb = chart_of(spec, b);
    for (int it = 0; it < opt.max_newton; ++it) {
        const RVector f = realify(eval.position(a) - eval.position(b));
        const CMatrix da = eval.differential(a);
        const CMatrix db = eval.differential(b);
        RMatrix j(2 * n, 2 * n);
        j.topLeftCorner(n, n) = da.real();
        j.bottomLeftCorner(n, n) = da.imag();
        j.topRightCorner(n, n) = -db.real();
        j.bottomRightCorner(n, n) = -db.imag();
        // Minimum-norm step, so tangential contacts still converge (linearly).
        const Eigen::CompleteOrthogonalDecomposition<RMatrix> cod(j);
        const RVector step = cod.solve(-f);
        if (!step.allFinite())
            return std::nullopt;
        a.coords += step.head(n);
        b.coords += step.tail(n);
        if (!in_domain(ca, a) || !in_domain(cb, b))
            return std::nullopt;
        a = normalized(ca, a, 0.6);
        b = normalized(cb, b, 0.6);
        if (step.lpNorm<Eigen::Infinity>() < opt.newton_step_tol)
            break;
    }
    const CVector za = eval.position(a);
    if ((za - eval.position(b)).norm() > opt.refine_tol)
        return std::nullopt;
    return Root{za, normalized(ca, a), normalized(cb, b)};
}

inline double parameter_distance(const ImmersionSpec& spec, const ChartPoint& a, const ChartPoint& b)
{
    if (a.chart != b.chart)
        return std::numeric_limits<double>::infinity();
    const auto& c = chart_of(spec, a);
    return (canonical_coords(c, a) - canonical_coords(c, b)).norm();
}

// h and theta at an arbitrary point, continued from the nearest sample.
inline std::pair<double, double> local_primitive_and_grading(const ImmersionMesh& mesh,
                                                             const ImmersionEvaluator& eval, const ChartPoint& p)
{
    const auto& spec = *mesh.spec;
    const auto& chart = chart_of(spec, p);
    std::size_t best = mesh.samples.size();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < mesh.samples.size(); ++i) {
        const auto& w = mesh.samples[i].where;
        if (w.chart != p.chart)
            continue;
        const double d = parameter_distance(spec, w, p);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    if (best == mesh.samples.size())
        throw Error(ErrorKind::InvalidArgument, "no sample in the chart of a double point preimage");
    const auto& s = mesh.samples[best];
    auto [from, to] = common_path(chart, s.where, p);
    const double h = s.h + eval.path_integral(from, to);
    const double phase = det_squared_phase(eval.frame(p));
    const double theta = s.theta + wrap_half(phase - s.phase);
    return {h, theta};
}

} // namespace detail

/**
 * Broad phase: samples are hashed on a fixed 1-Lipschitz projection of
 * R^{2n} to at most three dimensions; pairs closer than a multiple of the
 * local mesh spacing and at least `exclusion_cells` parameter cells apart
 * become candidates.  Candidates are refined by Newton iteration on
 * iota(a) - iota(b) = 0, merged, and classified.
 */
inline std::vector<DoublePointRecord> find_double_points(const ImmersionMesh& mesh,
                                                         const DoublePointOptions& opt = {})
{
    if (!mesh.has_primitive || !mesh.has_grading)
        throw Error(ErrorKind::InvalidArgument, "compute the primitive and the grading first");
    const auto& spec = *mesh.spec;
    const int n = spec.dim();
    const ImmersionEvaluator eval(spec);
    const auto& samples = mesh.samples;
    const std::size_t count = samples.size();

    std::vector<double> spacing(count, 0.0);
    for (const auto& e : mesh.edges) {
        if (!e.resolving)
            continue;
        const double len = (samples[e.a].point - samples[e.b].point).norm();
        spacing[e.a] = std::max(spacing[e.a], len);
        spacing[e.b] = std::max(spacing[e.b], len);
    }
    const double reach = 1.5 * std::sqrt(static_cast<double>(n));
    const double max_spacing = *std::max_element(spacing.begin(), spacing.end());
    const double cell = std::max(reach * max_spacing, 1e-300);

    // Orthonormal rows, fixed seed.
    const int dims = std::min(3, 2 * n);
    RMatrix proj(dims, 2 * n);
    {
        std::mt19937_64 rng(0x5eed);
        std::normal_distribution<double> g;
        for (int i = 0; i < dims; ++i) {
            RVector row(2 * n);
            for (int k = 0; k < 2 * n; ++k)
                row(k) = g(rng);
            for (int j = 0; j < i; ++j)
                row -= row.dot(proj.row(j).transpose()) * proj.row(j).transpose();
            proj.row(i) = row.normalized().transpose();
        }
    }
    using Key = std::array<long, 3>;
    struct KeyHash
    {
        std::size_t operator()(const Key& k) const noexcept
        {
            return static_cast<std::size_t>(k[0] * 73856093L ^ k[1] * 19349663L ^ k[2] * 83492791L);
        }
    };
    std::vector<RVector> real_points(count);
    std::vector<Key> keys(count);
    std::unordered_map<Key, std::vector<std::size_t>, KeyHash> grid;
    for (std::size_t i = 0; i < count; ++i) {
        real_points[i] = detail::realify(samples[i].point);
        const RVector y = proj * real_points[i];
        Key k{0, 0, 0};
        for (int d = 0; d < dims; ++d)
            k[static_cast<std::size_t>(d)] = static_cast<long>(std::floor(y(d) / cell));
        keys[i] = k;
        grid[k].push_back(i);
    }

    std::vector<std::pair<std::size_t, std::size_t>> candidates;
    for (std::size_t i = 0; i < count; ++i) {
        const Key& k = keys[i];
        const long r1 = dims > 1 ? 1 : 0;
        const long r2 = dims > 2 ? 1 : 0;
        for (long a = -1; a <= 1; ++a)
            for (long b = -r1; b <= r1; ++b)
                for (long c = -r2; c <= r2; ++c) {
                    auto it = grid.find({k[0] + a, k[1] + b, k[2] + c});
                    if (it == grid.end())
                        continue;
                    for (std::size_t j : it->second) {
                        if (j <= i)
                            continue;
                        const double dist = (real_points[i] - real_points[j]).norm();
                        if (dist > reach * std::max(spacing[i], spacing[j]))
                            continue;
                        const auto& wi = samples[i].where;
                        const auto& wj = samples[j].where;
                        if (wi.chart == wj.chart &&
                            detail::parameter_distance(spec, wi, wj) <
                                opt.exclusion_cells * mesh.chart_cell[static_cast<std::size_t>(wi.chart)])
                            continue;
                        candidates.emplace_back(i, j);
                    }
                }
    }
    std::sort(candidates.begin(), candidates.end());

    std::vector<std::optional<detail::Root>> roots(candidates.size());
    parallel_for(candidates.size(), [&](std::size_t c) {
        auto root = detail::newton_refine(eval, samples[candidates[c].first].where,
                                          samples[candidates[c].second].where, opt);
        if (!root)
            return;
        if (root->a.chart == root->b.chart &&
            detail::parameter_distance(spec, root->a, root->b) <
                opt.exclusion_cells * mesh.chart_cell[static_cast<std::size_t>(root->a.chart)])
            return; // collapsed onto the diagonal
        roots[c] = std::move(root);
    });

    struct Cluster
    {
        CVector point;
        std::vector<ChartPoint> preimages;
    };
    const double merge_tol = std::max(1e-7, 100.0 * opt.refine_tol);
    const double same_preimage = 1e-6;
    std::vector<Cluster> clusters;
    for (auto& root : roots) {
        if (!root)
            continue;
        Cluster* target = nullptr;
        for (auto& c : clusters)
            if ((c.point - root->point).norm() <= merge_tol) {
                target = &c;
                break;
            }
        if (!target) {
            clusters.push_back({root->point, {}});
            target = &clusters.back();
        }
        for (const auto* pre : {&root->a, &root->b}) {
            const bool known = std::any_of(target->preimages.begin(), target->preimages.end(), [&](const ChartPoint& q) {
                return detail::parameter_distance(spec, q, *pre) <= same_preimage;
            });
            if (!known)
                target->preimages.push_back(*pre);
        }
    }

    std::vector<DoublePointRecord> records;
    for (std::size_t k = 0; k < clusters.size(); ++k) {
        auto& cl = clusters[k];
        if (cl.preimages.size() > 2)
            throw Error(ErrorKind::TripleOrWorse,
                        std::to_string(cl.preimages.size()) + " preimages meet at one ambient point",
                        static_cast<double>(cl.preimages.size()));
        auto order_key = [&](const ChartPoint& p) {
            const RVector c = detail::canonical_coords(detail::chart_of(spec, p), p);
            std::vector<double> key{static_cast<double>(p.chart)};
            key.insert(key.end(), c.data(), c.data() + c.size());
            return key;
        };
        std::sort(cl.preimages.begin(), cl.preimages.end(),
                  [&](const ChartPoint& x, const ChartPoint& y) { return order_key(x) < order_key(y); });

        const auto& p = cl.preimages[0];
        const auto& q = cl.preimages[1];
        const auto fp = eval.frame(p);
        const auto fq = eval.frame(q);
        if (!transversality_check(fp, fq, opt.tol_transverse))
            throw Error(ErrorKind::NonTransverseDoublePoint, "tangent planes at a double point share a direction");
        const auto [hp, tp] = detail::local_primitive_and_grading(mesh, eval, p);
        const auto [hq, tq] = detail::local_primitive_and_grading(mesh, eval, q);

        const std::string base = std::to_string(k);
        const std::string p_id = "L" + base + ".0";
        const std::string q_id = "L" + base + ".1";
        const std::string fwd = "R" + base + ".01";
        const std::string bwd = "R" + base + ".10";

        auto make = [&](const ChartPoint& x, const ChartPoint& y, const LagrangianFrame& fx, const LagrangianFrame& fy,
                        double hx, double hy, double tx, double ty, const std::string& xid, const std::string& yid,
                        const std::string& id, const std::string& partner) {
            DoublePointRecord r;
            r.id = id;
            r.partner_id = partner;
            r.p_id = xid;
            r.q_id = yid;
            r.geometric_index = k;
            r.p = x;
            r.q = y;
            r.point = cl.point;
            r.angles = kahler_angles(fx, fy, opt.tol_transverse);
            r.h_p = hx;
            r.h_q = hy;
            r.theta_p = tx;
            r.theta_q = ty;
            r.action = hy - hx;
            const auto idx = index_of_pair(tx, ty, r.angles, n);
            r.index_raw = idx.raw;
            r.index = idx.rounded;
            r.residual = idx.residual;
            if (r.residual > opt.tol_index)
                throw Error(ErrorKind::IndexNotIntegral,
                            "index of " + id + " is " + std::to_string(idx.raw) + ", not an integer", r.residual);
            return r;
        };
        records.push_back(make(p, q, fp, fq, hp, hq, tp, tq, p_id, q_id, fwd, bwd));
        records.push_back(make(q, p, fq, fp, hq, hp, tq, tp, q_id, p_id, bwd, fwd));
    }
    return records;
}

// Number of geometric double points (records come in ordered couples).
inline std::size_t geometric_count(const std::vector<DoublePointRecord>& records) { return records.size() / 2; }

// ---------------------------------------------------------------------------
// Datum skeleton

struct MorseCritical
{
    std::string id;
    int index = 0;
};

struct MorseData
{
    std::vector<MorseCritical> criticals;
    std::vector<DifferentialEntry> trajectories; // d_CC entries, from x to x' with ind x' = ind x + 1
};

/**
 * Generators are the critical points followed by the ordered double-point
 * lifts; only the Morse block of the differential is filled in.
 */
inline FloerDatum emit_datum(const ImmersionMesh& mesh, const std::vector<DoublePointRecord>& records,
                             const MorseData& morse)
{
    FloerDatum d;
    d.ambient_dim = mesh.spec->dim();
    for (const auto& c : morse.criticals)
        d.generators.push_back({c.id, GeneratorKind::Crit, c.index, std::nullopt, std::nullopt});
    for (const auto& r : records)
        d.generators.push_back({r.id, GeneratorKind::Pair, r.index, r.action, r.partner_id});
    d.differential = morse.trajectories;
    const auto report = validate_datum(d);
    if (!report.ok())
        throw Error(ErrorKind::ValidationFailed, report.summary());
    return d;
}

} // namespace pearl

#endif
