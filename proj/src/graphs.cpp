#include "tpc/graphs.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "tpc/errors.hpp"

namespace tpc::graphs {

Graph::Graph(std::size_t n) : n_(n), adj_(n * n, 0) {
  if (n == 0 || n > 0xffff) throw InvalidArgument("graph size must be in [1, 65535]");
}

Graph Graph::from_edges(std::size_t n, std::span<const std::pair<Vertex, Vertex>> edges) {
  Graph g(n);
  for (auto [u, v] : edges) g.add_edge(u, v);
  return g;
}

void Graph::check_pair(Vertex u, Vertex v) const {
  if (u >= n_ || v >= n_) throw InvalidArgument("vertex out of range");
  if (u == v) throw InvalidArgument("self-loops are not allowed");
}

void Graph::add_edge(Vertex u, Vertex v) {
  check_pair(u, v);
  adj_[u * n_ + v] = adj_[v * n_ + u] = 1;
}

void Graph::remove_edge(Vertex u, Vertex v) {
  check_pair(u, v);
  adj_[u * n_ + v] = adj_[v * n_ + u] = 0;
}

void Graph::toggle_edge(Vertex u, Vertex v) {
  if (has_edge(u, v))
    remove_edge(u, v);
  else
    add_edge(u, v);
}

std::size_t Graph::edge_count() const {
  return static_cast<std::size_t>(std::count(adj_.begin(), adj_.end(), 1)) / 2;
}

std::vector<std::size_t> Graph::degrees() const {
  std::vector<std::size_t> out(n_, 0);
  for (std::size_t u = 0; u < n_; ++u)
    for (std::size_t v = 0; v < n_; ++v) out[u] += adj_[u * n_ + v];
  return out;
}

std::vector<std::size_t> Graph::degree_sequence() const {
  auto out = degrees();
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<Vertex, Vertex>> Graph::edges() const {
  std::vector<std::pair<Vertex, Vertex>> out;
  for (Vertex u = 0; u < n_; ++u)
    for (Vertex v = u + 1; v < n_; ++v)
      if (has_edge(u, v)) out.emplace_back(u, v);
  return out;
}

Permutation::Permutation(std::vector<Vertex> mapping) : map_(std::move(mapping)) {
  if (map_.empty()) throw InvalidArgument("permutation must be non-empty");
  std::vector<bool> seen(map_.size(), false);
  for (Vertex v : map_) {
    if (v >= map_.size() || seen[v]) throw InvalidArgument("mapping is not a bijection");
    seen[v] = true;
  }
}

Permutation Permutation::identity(std::size_t n) {
  std::vector<Vertex> m(n);
  std::iota(m.begin(), m.end(), 0);
  return Permutation(std::move(m));
}

Graph apply_perm(const Graph& g, const Permutation& pi) {
  if (g.size() != pi.size()) throw InvalidArgument("permutation size does not match graph");
  Graph out(g.size());
  for (auto [u, v] : g.edges()) out.add_edge(pi(u), pi(v));
  return out;
}

Permutation compose(const Permutation& pi, const Permutation& sigma) {
  if (pi.size() != sigma.size()) throw InvalidArgument("permutation sizes differ");
  std::vector<Vertex> m(pi.size());
  for (Vertex v = 0; v < m.size(); ++v) m[v] = pi(sigma(v));
  return Permutation(std::move(m));
}

Permutation invert(const Permutation& pi) {
  std::vector<Vertex> m(pi.size());
  for (Vertex v = 0; v < m.size(); ++v) m[pi(v)] = v;
  return Permutation(std::move(m));
}

Permutation random_perm(std::size_t n, RandomStream& rng) {
  if (n == 0) throw InvalidArgument("random_perm: n must be positive");
  std::vector<Vertex> m(n);
  std::iota(m.begin(), m.end(), 0);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(m[i], m[rng.below(i + 1)]);
  return Permutation(std::move(m));
}

namespace {

// Backtracking search for isomorphisms g -> h. Vertices of g are assigned in
// order of decreasing degree; a candidate image must match degree and be
// consistent with every earlier assignment.
class IsoSearch {
 public:
  IsoSearch(const Graph& g, const Graph& h, std::size_t limit)
      : g_(g), h_(h), limit_(limit), gdeg_(g.degrees()), hdeg_(h.degrees()), image_(g.size()), used_(g.size(), false) {
    order_.resize(g.size());
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(), [&](Vertex a, Vertex b) { return gdeg_[a] > gdeg_[b]; });
  }

  void run() { extend(0); }
  std::size_t found() const { return found_; }
  const std::optional<Permutation>& first() const { return first_; }

 private:
  void extend(std::size_t depth) {
    if (found_ >= limit_) return;
    if (depth == order_.size()) {
      if (!first_) first_ = Permutation(image_);
      ++found_;
      return;
    }
    const Vertex u = order_[depth];
    for (Vertex v = 0; v < h_.size(); ++v) {
      if (used_[v] || hdeg_[v] != gdeg_[u]) continue;
      bool ok = true;
      for (std::size_t k = 0; k < depth && ok; ++k) {
        const Vertex w = order_[k];
        ok = g_.has_edge(u, w) == h_.has_edge(v, image_[w]);
      }
      if (!ok) continue;
      image_[u] = v;
      used_[v] = true;
      extend(depth + 1);
      used_[v] = false;
      if (found_ >= limit_) return;
    }
  }

  const Graph& g_;
  const Graph& h_;
  std::size_t limit_;
  std::vector<std::size_t> gdeg_;
  std::vector<std::size_t> hdeg_;
  std::vector<Vertex> order_;
  std::vector<Vertex> image_;
  std::vector<bool> used_;
  std::size_t found_ = 0;
  std::optional<Permutation> first_;
};

void check_bound(const Graph& g, const Graph& h) {
  if (g.size() > kOracleBound || h.size() > kOracleBound)
    throw OracleBoundExceeded("instance too large for oracle (n > " + std::to_string(kOracleBound) + ")");
}

bool invariants_match(const Graph& g, const Graph& h) {
  return g.size() == h.size() && g.edge_count() == h.edge_count() && g.degree_sequence() == h.degree_sequence();
}

}  // namespace

std::optional<Permutation> find_isomorphism(const Graph& g, const Graph& h) {
  check_bound(g, h);
  if (!invariants_match(g, h)) return std::nullopt;
  IsoSearch search(g, h, 1);
  search.run();
  return search.first();
}

std::size_t count_isomorphisms(const Graph& g, const Graph& h, std::size_t limit) {
  check_bound(g, h);
  if (limit == 0 || !invariants_match(g, h)) return 0;
  IsoSearch search(g, h, limit);
  search.run();
  return search.found();
}

bool is_rigid(const Graph& g) { return count_isomorphisms(g, g, 2) == 1; }

Graph random_graph(std::size_t n, double edge_prob, RandomStream& rng) {
  if (!(edge_prob >= 0.0 && edge_prob <= 1.0)) throw InvalidArgument("edge probability must be in [0, 1]");
  Graph g(n);
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v)
      if (rng.unit() < edge_prob) g.add_edge(u, v);
  return g;
}

Graph random_rigid_graph(std::size_t n, double edge_prob, RandomStream& rng) {
  if (n < 6 || n > kOracleBound) throw InvalidArgument("rigid graphs are sampled for 6 <= n <= 12 only");
  for (;;) {
    Graph g = random_graph(n, edge_prob, rng);
    if (is_rigid(g)) return g;
  }
}

std::pair<Graph, Graph> gen_noniso_pair(std::size_t n, RandomStream& rng) {
  if (n < 3) throw InvalidArgument("gen_noniso_pair: n must be at least 3");
  Graph g = random_graph(n, 0.5, rng);
  Graph h = g;
  Vertex u = static_cast<Vertex>(rng.below(n));
  Vertex v = static_cast<Vertex>(rng.below(n - 1));
  if (v >= u) ++v;
  // Toggling one pair changes the edge count, hence the degree sequence.
  h.toggle_edge(u, v);
  return {std::move(g), std::move(h)};
}

bool is_hamiltonian_cycle(const Graph& g, std::span<const Vertex> witness) {
  if (witness.size() != g.size()) return false;
  std::vector<bool> seen(g.size(), false);
  for (Vertex v : witness) {
    if (v >= g.size() || seen[v]) return false;
    seen[v] = true;
  }
  if (g.size() < 3) return false;
  for (std::size_t i = 0; i < witness.size(); ++i)
    if (!g.has_edge(witness[i], witness[(i + 1) % witness.size()])) return false;
  return true;
}

std::vector<Vertex> map_vertices(const Permutation& pi, std::span<const Vertex> seq) {
  std::vector<Vertex> out;
  out.reserve(seq.size());
  for (Vertex v : seq) out.push_back(pi(v));
  return out;
}

PlantedSolution gen_hamiltonian_graph(std::size_t n, std::size_t noise_edges, RandomStream& rng) {
  if (n < 3) throw InvalidArgument("gen_hamiltonian_graph: n must be at least 3");
  Permutation order = random_perm(n, rng);
  std::vector<Vertex> cycle = order.mapping();
  std::rotate(cycle.begin(), std::find(cycle.begin(), cycle.end(), 0), cycle.end());
  Graph g(n);
  for (std::size_t i = 0; i < n; ++i) g.add_edge(cycle[i], cycle[(i + 1) % n]);

  std::vector<std::pair<Vertex, Vertex>> free_pairs;
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v)
      if (!g.has_edge(u, v)) free_pairs.emplace_back(u, v);
  const std::size_t extra = std::min(noise_edges, free_pairs.size());
  for (std::size_t i = 0; i < extra; ++i) {
    std::size_t j = i + rng.below(free_pairs.size() - i);
    std::swap(free_pairs[i], free_pairs[j]);
    g.add_edge(free_pairs[i].first, free_pairs[i].second);
  }
  return {std::move(g), std::move(cycle)};
}

void write_graph(ByteWriter& w, const Graph& g) {
  const std::size_t n = g.size();
  w.u16(static_cast<std::uint16_t>(n));
  Bytes bitmap((n * n + 7) / 8, 0);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v)
      if (g.has_edge(static_cast<Vertex>(u), static_cast<Vertex>(v))) {
        const std::size_t bit = u * n + v;
        bitmap[bit / 8] |= static_cast<std::uint8_t>(0x80u >> (bit % 8));
      }
  w.raw(bitmap);
}

Graph read_graph(ByteReader& r) {
  const std::size_t n = r.u16();
  if (n == 0) throw FramingError("graph with zero vertices");
  ByteView bitmap = r.raw((n * n + 7) / 8);
  auto bit_at = [&](std::size_t bit) { return (bitmap[bit / 8] & (0x80u >> (bit % 8))) != 0; };
  Graph g(n);
  for (std::size_t u = 0; u < n; ++u) {
    if (bit_at(u * n + u)) throw FramingError("graph encoding has a self-loop");
    for (std::size_t v = u + 1; v < n; ++v) {
      const bool a = bit_at(u * n + v);
      if (a != bit_at(v * n + u)) throw FramingError("graph encoding is not symmetric");
      if (a) g.add_edge(static_cast<Vertex>(u), static_cast<Vertex>(v));
    }
  }
  for (std::size_t bit = n * n; bit < bitmap.size() * 8; ++bit)
    if (bit_at(bit)) throw FramingError("graph encoding has nonzero padding");
  return g;
}

void write_vertices(ByteWriter& w, std::span<const Vertex> seq) {
  if (seq.size() > 0xffff) throw InvalidArgument("vertex sequence too long");
  w.u16(static_cast<std::uint16_t>(seq.size()));
  for (Vertex v : seq) w.u16(static_cast<std::uint16_t>(v));
}

std::vector<Vertex> read_vertices(ByteReader& r) {
  const std::size_t count = r.u16();
  std::vector<Vertex> out(count);
  for (auto& v : out) v = r.u16();
  return out;
}

void write_perm(ByteWriter& w, const Permutation& pi) { write_vertices(w, pi.mapping()); }

Permutation read_perm(ByteReader& r) {
  auto m = read_vertices(r);
  try {
    return Permutation(std::move(m));
  } catch (const InvalidArgument& e) {
    throw FramingError(std::string("permutation encoding: ") + e.what());
  }
}

Bytes encode_graph(const Graph& g) {
  ByteWriter w;
  write_graph(w, g);
  return std::move(w).take();
}

Graph decode_graph(ByteView bytes) {
  ByteReader r(bytes);
  Graph g = read_graph(r);
  r.expect_done("graph");
  return g;
}

}  // namespace tpc::graphs
