#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "splitsec/layout.hpp"
#include "splitsec/netlist.hpp"

namespace fixtures {

std::filesystem::path data_dir();
splitsec::NetlistGraph full_adder();

struct DagShape {
    std::size_t inputs = 4;
    std::size_t gates = 20;
    std::size_t outputs = 3;
};

// Random combinational netlist in .bench form. Every gate reads from earlier
// signals only, so the result is acyclic by construction.
std::string random_bench(const DagShape &shape, std::uint64_t seed);
splitsec::NetlistGraph random_dag(const DagShape &shape, std::uint64_t seed);

// Placement with explicit sites and no fences, for metric and attack tests.
splitsec::Placement at_sites(const splitsec::NetlistGraph &graph, std::vector<splitsec::Site> sites);

// Every gate on a distinct uniformly random site of a width x height grid.
splitsec::Placement random_layout(const splitsec::NetlistGraph &graph, int width, int height, std::uint64_t seed);

} // namespace fixtures
