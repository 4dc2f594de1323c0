#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "tpc/bytes.hpp"
#include "tpc/random.hpp"

namespace tpc::graphs {

using Vertex = std::uint32_t;

/// Largest instance the brute-force isomorphism oracle accepts.
inline constexpr std::size_t kOracleBound = 12;

/// Simple undirected graph on vertices [0, n).
class Graph {
 public:
  /// Empty graph; throws InvalidArgument for n == 0 or n > 65535.
  explicit Graph(std::size_t n);
  static Graph from_edges(std::size_t n, std::span<const std::pair<Vertex, Vertex>> edges);

  std::size_t size() const { return n_; }
  bool has_edge(Vertex u, Vertex v) const { return adj_[u * n_ + v] != 0; }
  /// Throws InvalidArgument on self-loops or out-of-range vertices.
  void add_edge(Vertex u, Vertex v);
  void remove_edge(Vertex u, Vertex v);
  void toggle_edge(Vertex u, Vertex v);

  std::size_t edge_count() const;
  std::vector<std::size_t> degrees() const;
  /// Degrees sorted ascending.
  std::vector<std::size_t> degree_sequence() const;
  std::vector<std::pair<Vertex, Vertex>> edges() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  void check_pair(Vertex u, Vertex v) const;

  std::size_t n_;
  std::vector<std::uint8_t> adj_;
};

/// Bijection on [0, n).
class Permutation {
 public:
  /// Throws InvalidArgument unless `mapping` is a bijection on [0, size).
  explicit Permutation(std::vector<Vertex> mapping);
  static Permutation identity(std::size_t n);

  std::size_t size() const { return map_.size(); }
  Vertex operator()(Vertex v) const { return map_.at(v); }
  const std::vector<Vertex>& mapping() const { return map_; }

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<Vertex> map_;
};

/// Relabels g by pi: (u,v) is an edge of g iff (pi(u), pi(v)) is an edge of the result.
Graph apply_perm(const Graph& g, const Permutation& pi);
/// (pi o sigma)(v) = pi(sigma(v)).
Permutation compose(const Permutation& pi, const Permutation& sigma);
Permutation invert(const Permutation& pi);
/// Uniform permutation by Fisher-Yates.
Permutation random_perm(std::size_t n, RandomStream& rng);

/// Some phi with apply_perm(g, phi) == h, or nullopt. Degree sequences are
/// compared before the search. Throws OracleBoundExceeded above kOracleBound.
std::optional<Permutation> find_isomorphism(const Graph& g, const Graph& h);
/// Number of isomorphisms g -> h, counting stops at `limit`.
std::size_t count_isomorphisms(const Graph& g, const Graph& h, std::size_t limit);
/// True iff the automorphism group is trivial (brute force, n <= kOracleBound).
bool is_rigid(const Graph& g);

/// Each unordered pair is an edge independently with probability edge_prob.
Graph random_graph(std::size_t n, double edge_prob, RandomStream& rng);
/// random_graph resampled until rigid. Requires n <= kOracleBound and n >= 6
/// (no rigid graphs exist on 2..5 vertices).
Graph random_rigid_graph(std::size_t n, double edge_prob, RandomStream& rng);

/// Two graphs certified non-isomorphic by different degree sequences.
std::pair<Graph, Graph> gen_noniso_pair(std::size_t n, RandomStream& rng);

/// Graph together with a Hamiltonian cycle its owner knows.
struct PlantedSolution {
  Graph graph;
  std::vector<Vertex> witness;
};

/// Witness visits every vertex once and every consecutive pair (with
/// wraparound) is an edge.
bool is_hamiltonian_cycle(const Graph& g, std::span<const Vertex> witness);
/// Image of a vertex sequence under pi.
std::vector<Vertex> map_vertices(const Permutation& pi, std::span<const Vertex> seq);

/// Hamiltonian cycle through a random vertex order plus `noise_edges` extra
/// random edges (capped by the number of free pairs). The witness starts at 0.
PlantedSolution gen_hamiltonian_graph(std::size_t n, std::size_t noise_edges, RandomStream& rng);

/// Wire encodings. Graph: 2-byte n, then ceil(n^2/8) bytes of row-major
/// adjacency bitmap, most significant bit first, padding bits zero.
/// Permutation and vertex sequences: 2-byte count then 2-byte entries.
void write_graph(ByteWriter& w, const Graph& g);
Graph read_graph(ByteReader& r);
void write_perm(ByteWriter& w, const Permutation& pi);
Permutation read_perm(ByteReader& r);
void write_vertices(ByteWriter& w, std::span<const Vertex> seq);
std::vector<Vertex> read_vertices(ByteReader& r);

Bytes encode_graph(const Graph& g);
Graph decode_graph(ByteView bytes);

}  // namespace tpc::graphs
