#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "layout.hpp"
#include "netlist.hpp"

namespace splitsec {

struct DistanceBin {
    long index = 0;
    std::uint64_t connected = 0;
    std::uint64_t unconnected = 0;

    std::uint64_t total() const { return connected + unconnected; }
};

// Joint histogram of pair connectivity X against binned Manhattan distance D.
struct JointDistribution {
    int bin_width = 1;
    std::vector<DistanceBin> bins; // non-empty bins, ascending index
    std::uint64_t total_pairs = 0;
};

// All quantities in bits.
struct LeakageReport {
    double h_x = 0;
    double h_x_given_d = 0;
    double mi = 0;
    double normalized_mi = 0;
};

// Counts every unordered pair of placed vertices. Pads take part unless
// include_pads is false. Throws Error for bin_width < 1 or fewer than 2 vertices.
JointDistribution joint_distribution(const NetlistGraph &graph, const Placement &placement, int bin_width,
                                     bool include_pads = true);

// -sum p log2 p. Throws Error on a negative entry or a sum off 1 by more than 1e-9.
double entropy(std::span<const double> probabilities);

double conditional_entropy(const JointDistribution &joint);
LeakageReport mutual_information(const JointDistribution &joint);

// I(D;X) = H[D] - H[D|X], computed from the other conditioning direction.
double reverse_mutual_information(const JointDistribution &joint);

// 100 * (1 - protected / original); 0 when original is 0.
double mi_reduction_percent(double mi_protected, double mi_original);

// "bin,connected,unconnected" rows
std::string joint_distribution_csv(const JointDistribution &joint);

} // namespace splitsec
