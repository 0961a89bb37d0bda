#include "mivspool/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <utility>

#include "mivspool/rng.hpp"

namespace mivspool {

namespace {

// Non-blank lines with trailing CR stripped; throws IoError on open failure.
std::vector<std::string> read_lines(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot open " + file.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        lines.push_back(line);
    }
    return lines;
}

// Comma- or whitespace-separated doubles.
std::vector<double> parse_floats(const std::string& line, const std::filesystem::path& file) {
    std::vector<double> out;
    const char* p = line.c_str();
    while (*p) {
        while (*p == ' ' || *p == '\t' || *p == ',') ++p;
        if (!*p) break;
        char* end = nullptr;
        double v = std::strtod(p, &end);
        if (end == p) throw IoError("bad numeric token in " + file.string() + ": '" + line + "'");
        out.push_back(v);
        p = end;
    }
    return out;
}

// Comma- or whitespace-separated integers; rejects fractional tokens.
std::vector<long long> parse_ints(const std::string& line, const std::filesystem::path& file) {
    std::vector<long long> out;
    const char* p = line.c_str();
    while (*p) {
        while (*p == ' ' || *p == '\t' || *p == ',') ++p;
        if (!*p) break;
        char* end = nullptr;
        long long v = std::strtoll(p, &end, 10);
        if (end == p || (*end != '\0' && *end != ' ' && *end != '\t' && *end != ','))
            throw IoError("bad integer token in " + file.string() + ": '" + line + "'");
        out.push_back(v);
        p = end;
    }
    return out;
}

long long parse_single_int(const std::string& line, const std::filesystem::path& file) {
    auto vals = parse_ints(line, file);
    if (vals.size() != 1)
        throw IoError("expected one integer per line in " + file.string() + ": '" + line + "'");
    return vals[0];
}

}  // namespace

Dataset load_tud(const std::filesystem::path& dir, const std::string& name) {
    namespace fs = std::filesystem;
    auto file = [&](const char* suffix) { return dir / (name + suffix); };

    const fs::path indicator_path = file("_graph_indicator.txt");
    auto indicator_lines = read_lines(indicator_path);
    const std::size_t n_total = indicator_lines.size();
    if (n_total == 0) throw IoError("empty graph indicator: " + indicator_path.string());

    std::vector<int> graph_of(n_total);
    int graph_count = 0;
    for (std::size_t v = 0; v < n_total; ++v) {
        long long gid = parse_single_int(indicator_lines[v], indicator_path);
        if (gid < 1) throw IoError("graph indicator must be >= 1 in " + indicator_path.string());
        graph_of[v] = static_cast<int>(gid) - 1;
        graph_count = std::max(graph_count, static_cast<int>(gid));
    }
    std::vector<Vertex> local(n_total);
    std::vector<Vertex> sizes(graph_count, 0);
    for (std::size_t v = 0; v < n_total; ++v) local[v] = sizes[graph_of[v]]++;

    const fs::path labels_path = file("_graph_labels.txt");
    auto label_lines = read_lines(labels_path);
    if (label_lines.size() != static_cast<std::size_t>(graph_count))
        throw IoError(labels_path.string() + " has " + std::to_string(label_lines.size()) +
                      " labels for " + std::to_string(graph_count) + " graphs");
    std::vector<long long> raw_labels(graph_count);
    for (int gi = 0; gi < graph_count; ++gi)
        raw_labels[gi] = parse_single_int(label_lines[gi], labels_path);
    std::vector<long long> uniq = raw_labels;
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    std::map<long long, int> dense_label;
    for (std::size_t c = 0; c < uniq.size(); ++c) dense_label[uniq[c]] = static_cast<int>(c);

    // node features: attributes beat one-hot labels beat constant 1
    const fs::path attr_path = file("_node_attributes.txt");
    const fs::path nlabel_path = file("_node_labels.txt");
    std::vector<std::vector<double>> attrs;
    std::vector<int> node_labels_raw;
    if (fs::exists(attr_path)) {
        auto attr_lines = read_lines(attr_path);
        if (attr_lines.size() != n_total)
            throw IoError(attr_path.string() + " row count does not match vertex count");
        attrs.reserve(n_total);
        for (auto& l : attr_lines) attrs.push_back(parse_floats(l, attr_path));
        for (auto& row : attrs)
            if (row.size() != attrs.front().size())
                throw IoError("ragged attribute rows in " + attr_path.string());
    }
    if (fs::exists(nlabel_path)) {
        auto nl_lines = read_lines(nlabel_path);
        if (nl_lines.size() != n_total)
            throw IoError(nlabel_path.string() + " row count does not match vertex count");
        node_labels_raw.reserve(n_total);
        for (auto& l : nl_lines)
            node_labels_raw.push_back(static_cast<int>(parse_single_int(l, nlabel_path)));
    }
    std::map<int, int> label_col;
    if (attrs.empty() && !node_labels_raw.empty()) {
        std::vector<int> lv = node_labels_raw;
        std::sort(lv.begin(), lv.end());
        lv.erase(std::unique(lv.begin(), lv.end()), lv.end());
        for (std::size_t c = 0; c < lv.size(); ++c) label_col[lv[c]] = static_cast<int>(c);
    }

    const fs::path edges_path = file("_A.txt");
    auto edge_lines = read_lines(edges_path);
    std::vector<std::vector<std::pair<Vertex, Vertex>>> edges(graph_count);
    for (auto& l : edge_lines) {
        auto pair = parse_ints(l, edges_path);
        if (pair.size() != 2) throw IoError("expected 'i, j' in " + edges_path.string() + ": '" + l + "'");
        long long i = pair[0], j = pair[1];
        if (i < 1 || j < 1 || i > static_cast<long long>(n_total) || j > static_cast<long long>(n_total))
            throw IoError("edge endpoint out of range in " + edges_path.string() + ": '" + l + "'");
        const std::size_t u = static_cast<std::size_t>(i) - 1, v = static_cast<std::size_t>(j) - 1;
        if (graph_of[u] != graph_of[v])
            throw IoError("edge crosses graphs in " + edges_path.string() + ": '" + l + "'");
        edges[graph_of[u]].emplace_back(local[u], local[v]);
    }

    Dataset ds;
    ds.name = name;
    ds.class_count = static_cast<int>(uniq.size());
    ds.graphs.reserve(graph_count);
    std::vector<std::vector<std::size_t>> vertices_of(graph_count);
    for (std::size_t v = 0; v < n_total; ++v) vertices_of[graph_of[v]].push_back(v);
    for (int gi = 0; gi < graph_count; ++gi) {
        const Vertex n = sizes[gi];
        if (n == 0) throw IoError("graph " + std::to_string(gi + 1) + " has no vertices");
        Matrix feat;
        std::vector<int> nlabels;
        if (!attrs.empty()) {
            feat = Matrix(n, attrs.front().size());
            for (std::size_t v : vertices_of[gi])
                std::copy(attrs[v].begin(), attrs[v].end(), feat.row(local[v]).begin());
        } else if (!node_labels_raw.empty()) {
            feat = Matrix(n, label_col.size());
            for (std::size_t v : vertices_of[gi])
                feat.at(local[v], label_col.at(node_labels_raw[v])) = 1.0;
        } else {
            feat = constant_features(n);
        }
        if (!node_labels_raw.empty()) {
            nlabels.resize(n);
            for (std::size_t v : vertices_of[gi]) nlabels[local[v]] = node_labels_raw[v];
        }
        ds.graphs.push_back(build_graph(n, edges[gi], std::move(feat), std::move(nlabels),
                                         dense_label.at(raw_labels[gi])));
    }
    return ds;
}

Graph gen_random_graph(Vertex n, double p, std::uint64_t seed) {
    if (n < 0) throw std::invalid_argument("vertex count must be nonnegative");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("edge probability outside [0, 1]");
    std::vector<std::pair<Vertex, Vertex>> edges;
    if (p >= 1.0) {
        for (Vertex v = 1; v < n; ++v)
            for (Vertex w = 0; w < v; ++w) edges.emplace_back(v, w);
    } else if (p > 0.0) {
        // geometric jumps over the strictly-lower-triangular pair sequence
        rng::Stream st(seed);
        const double logq = std::log1p(-p);
        std::int64_t v = 1, w = -1;
        while (v < n) {
            const double r = st.next01();
            w += 1 + static_cast<std::int64_t>(std::floor(std::log1p(-r) / logq));
            while (w >= v && v < n) {
                w -= v;
                ++v;
            }
            if (v < n) edges.emplace_back(static_cast<Vertex>(v), static_cast<Vertex>(w));
        }
    }
    return build_graph(n, edges, constant_features(n));
}

Graph gen_family(Family kind, Vertex n) {
    if (n < 1) throw std::invalid_argument("family graphs need n >= 1");
    std::vector<std::pair<Vertex, Vertex>> edges;
    switch (kind) {
    case Family::path:
        for (Vertex v = 0; v + 1 < n; ++v) edges.emplace_back(v, v + 1);
        break;
    case Family::cycle:
        if (n < 3) throw std::invalid_argument("cycle needs n >= 3");
        for (Vertex v = 0; v + 1 < n; ++v) edges.emplace_back(v, v + 1);
        edges.emplace_back(n - 1, 0);
        break;
    case Family::star:
        for (Vertex v = 1; v < n; ++v) edges.emplace_back(0, v);
        break;
    case Family::complete:
        for (Vertex u = 0; u < n; ++u)
            for (Vertex v = u + 1; v < n; ++v) edges.emplace_back(u, v);
        break;
    case Family::grid: {
        // most balanced factorization: rows = largest divisor <= sqrt(n)
        Vertex r = 1;
        for (Vertex d = 1; static_cast<std::int64_t>(d) * d <= n; ++d)
            if (n % d == 0) r = d;
        return gen_grid(r, n / r);
    }
    }
    return build_graph(n, edges, constant_features(n));
}

Graph gen_grid(Vertex rows, Vertex cols) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("grid needs positive extents");
    const Vertex n = rows * cols;
    std::vector<std::pair<Vertex, Vertex>> edges;
    auto id = [cols](Vertex r, Vertex c) { return r * cols + c; };
    for (Vertex r = 0; r < rows; ++r)
        for (Vertex c = 0; c < cols; ++c) {
            if (c + 1 < cols) edges.emplace_back(id(r, c), id(r, c + 1));
            if (r + 1 < rows) edges.emplace_back(id(r, c), id(r + 1, c));
        }
    return build_graph(n, edges, constant_features(n));
}

DatasetStats dataset_stats(const Dataset& ds) {
    DatasetStats st;
    st.graph_count = static_cast<int>(ds.graphs.size());
    st.class_count = ds.class_count;
    if (ds.graphs.empty()) return st;
    double sv = 0, sv2 = 0, se = 0, se2 = 0;
    for (const Graph& g : ds.graphs) {
        const double nv = g.n;
        const double ne = static_cast<double>(g.edge_count());
        sv += nv;
        sv2 += nv * nv;
        se += ne;
        se2 += ne * ne;
    }
    const double m = static_cast<double>(ds.graphs.size());
    st.mean_vertices = sv / m;
    st.std_vertices = std::sqrt(std::max(0.0, sv2 / m - st.mean_vertices * st.mean_vertices));
    st.mean_edges = se / m;
    st.std_edges = std::sqrt(std::max(0.0, se2 / m - st.mean_edges * st.mean_edges));
    return st;
}

}  // namespace mivspool
