#include "splitsec/leakage.hpp"

#include <algorithm>
#include <cmath>

#include "splitsec/error.hpp"

namespace splitsec {

namespace {

double plogp(double p) { return p > 0 ? -p * std::log2(p) : 0.0; }

double binary_entropy(std::uint64_t a, std::uint64_t b)
{
    const double n = static_cast<double>(a + b);
    if (n == 0)
        return 0;
    return plogp(static_cast<double>(a) / n) + plogp(static_cast<double>(b) / n);
}

} // namespace

JointDistribution joint_distribution(const NetlistGraph &graph, const Placement &placement, int bin_width,
                                     bool include_pads)
{
    if (bin_width < 1)
        throw ConfigError("bin width must be at least 1");
    if (placement.sites.size() != graph.size())
        throw Error("placement does not match the netlist");

    std::vector<GateId> vertices;
    for (const Gate &g : graph.gates()) {
        if (!include_pads && is_pad_kind(g.kind))
            continue;
        if (!placement.sites[g.id].placed())
            throw Error("gate '" + g.name + "' is not placed");
        vertices.push_back(g.id);
    }
    if (vertices.size() < 2)
        throw Error("leakage needs at least two placed vertices");

    std::vector<std::uint64_t> connected, unconnected;
    std::vector<std::uint64_t> mark(graph.size(), 0);
    std::uint64_t stamp = 0;
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        const GateId u = vertices[i];
        const Site su = placement.sites[u];
        ++stamp;
        for (GateId w : graph.neighbors(u))
            mark[w] = stamp;
        for (std::size_t j = i + 1; j < vertices.size(); ++j) {
            const GateId v = vertices[j];
            const auto bin = static_cast<std::size_t>(manhattan(su, placement.sites[v]) / bin_width);
            if (bin >= connected.size()) {
                connected.resize(bin + 1, 0);
                unconnected.resize(bin + 1, 0);
            }
            ++(mark[v] == stamp ? connected : unconnected)[bin];
        }
    }

    JointDistribution joint;
    joint.bin_width = bin_width;
    for (std::size_t b = 0; b < connected.size(); ++b) {
        if (connected[b] + unconnected[b] == 0)
            continue;
        joint.bins.push_back({static_cast<long>(b), connected[b], unconnected[b]});
        joint.total_pairs += connected[b] + unconnected[b];
    }
    return joint;
}

double entropy(std::span<const double> probabilities)
{
    double sum = 0, h = 0;
    for (double p : probabilities) {
        if (p < 0)
            throw Error("negative probability");
        sum += p;
        h += plogp(p);
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw Error("probabilities do not sum to 1");
    return h;
}

double conditional_entropy(const JointDistribution &joint)
{
    if (joint.total_pairs == 0)
        throw Error("empty joint distribution");
    const double n = static_cast<double>(joint.total_pairs);
    double h = 0;
    for (const DistanceBin &b : joint.bins)
        h += static_cast<double>(b.total()) / n * binary_entropy(b.connected, b.unconnected);
    return h;
}

LeakageReport mutual_information(const JointDistribution &joint)
{
    std::uint64_t connected = 0, unconnected = 0;
    for (const DistanceBin &b : joint.bins) {
        connected += b.connected;
        unconnected += b.unconnected;
    }
    LeakageReport r;
    r.h_x = binary_entropy(connected, unconnected);
    r.mi = std::clamp(r.h_x - conditional_entropy(joint), 0.0, r.h_x);
    r.h_x_given_d = r.h_x - r.mi;
    r.normalized_mi = r.h_x > 0 ? r.mi / r.h_x : 0.0;
    return r;
}

double reverse_mutual_information(const JointDistribution &joint)
{
    if (joint.total_pairs == 0)
        throw Error("empty joint distribution");
    const double n = static_cast<double>(joint.total_pairs);
    std::uint64_t connected = 0, unconnected = 0;
    double h_d = 0;
    for (const DistanceBin &b : joint.bins) {
        connected += b.connected;
        unconnected += b.unconnected;
        h_d += plogp(static_cast<double>(b.total()) / n);
    }
    // H[D|X] = sum_x p(x) H[D | X = x]
    double h_d_given_x = 0;
    for (auto [count, pick] : {std::pair{connected, &DistanceBin::connected},
                               std::pair{unconnected, &DistanceBin::unconnected}}) {
        if (count == 0)
            continue;
        double h = 0;
        for (const DistanceBin &b : joint.bins)
            h += plogp(static_cast<double>(b.*pick) / static_cast<double>(count));
        h_d_given_x += static_cast<double>(count) / n * h;
    }
    return h_d - h_d_given_x;
}

double mi_reduction_percent(double mi_protected, double mi_original)
{
    if (mi_original == 0)
        return 0;
    return 100.0 * (1.0 - mi_protected / mi_original);
}

std::string joint_distribution_csv(const JointDistribution &joint)
{
    std::string out = "bin,connected,unconnected\n";
    for (const DistanceBin &b : joint.bins)
        out += std::to_string(b.index) + "," + std::to_string(b.connected) + "," + std::to_string(b.unconnected) + "\n";
    return out;
}

} // namespace splitsec
