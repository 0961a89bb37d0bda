#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "mivspool/graph.hpp"

namespace mivspool {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Dataset {
    std::string name;
    std::vector<Graph> graphs;
    int class_count = 0;
};

// Reads the flat-file benchmark layout: <name>_A.txt (1-based "i, j" pairs),
// <name>_graph_indicator.txt, <name>_graph_labels.txt, plus optional
// <name>_node_labels.txt / <name>_node_attributes.txt. Node features are the
// attributes when present, else a one-hot of node labels, else constant 1.
// Graph labels are remapped to dense [0, class_count).
Dataset load_tud(const std::filesystem::path& dir, const std::string& name);

// Erdos-Renyi G(n, p), deterministic per seed, constant-1 features.
Graph gen_random_graph(Vertex n, double p, std::uint64_t seed);

enum class Family { path, cycle, star, complete, grid };

Graph gen_family(Family kind, Vertex n);
Graph gen_grid(Vertex rows, Vertex cols);

struct DatasetStats {
    int graph_count = 0;
    int class_count = 0;
    double mean_vertices = 0, std_vertices = 0;
    double mean_edges = 0, std_edges = 0;
};
DatasetStats dataset_stats(const Dataset& ds);

}  // namespace mivspool
