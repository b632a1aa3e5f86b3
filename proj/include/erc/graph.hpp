#pragma once

#include <span>
#include <utility>
#include <vector>

#include "erc/config.hpp"
#include "erc/tensor.hpp"

namespace erc {

enum class RelationType : int { kSelf = 0, kForward = 1, kBackward = 2 };

struct GraphEdge {
  int source;
  int target;
  RelationType rel;
};

enum class SubgraphKind { kInter, kIntra, kUnion };

// Typed edge list of one windowed subgraph. Edges are ordered
// target-major, then source ascending. Message flows source -> target;
// the relation type is self when source == target, forward when the
// source precedes the target, backward otherwise.
struct GraphTopology {
  std::vector<GraphEdge> edges;
  int node_count = 0;
  SubgraphKind kind = SubgraphKind::kUnion;

  // Per-node flag: has at least one incoming edge.
  Mask nodes_with_edges() const;
};

// Exhaustive window-k construction over valid nodes. Ordered pairs within
// the window land in exactly one subgraph: inter when the speakers
// differ, intra (including one self-loop per valid node) when they match.
std::pair<GraphTopology, GraphTopology> build_subgraphs(std::span<const int> speakers, int k,
                                                        const Mask& mask);

// Merged inter+intra edge set (the single-graph strategy), re-sorted into
// the canonical order.
GraphTopology merge_subgraphs(const GraphTopology& inter, const GraphTopology& intra);

template <typename T>
struct GatHeadParams {
  Tensor<T> w;     // d x d
  Tensor<T> attn;  // {2d + d_r, 1}
};

template <typename T>
struct GatParams {
  std::vector<GatHeadParams<T>> heads;  // combined by averaging
  Tensor<T> relation_table;             // 3 x d_r
  double leaky_slope = 0.2;
  GatActivation activation = GatActivation::kElu;
};

// Row lookup into the relation embedding table.
template <typename T>
Tensor<T> relation_embed(RelationType r, const Tensor<T>& table);

template <typename T>
struct GatLayerOut {
  Tensor<T> out;    // N x d
  Tensor<T> alpha;  // {E,1}, attention per edge in topology order
};

// One relation-embedded GAT pass for a single head:
// alpha_ij = softmax_j LeakyReLU(a^T [W z_i || W z_j || e_ij]),
// out_i = act(sum_j alpha_ij W z_j). Nodes without incoming edges pass
// their input feature through unchanged.
template <typename T>
GatLayerOut<T> gat_layer(const Tensor<T>& z, const GraphTopology& topo,
                         const Tensor<T>& relation_table, const GatHeadParams<T>& head,
                         T leaky_slope, GatActivation act);

// Head-averaged pass with the full parameter set.
template <typename T>
Tensor<T> gat_pass(const Tensor<T>& z, const GraphTopology& topo, const GatParams<T>& p);

template <typename T>
struct InteractParams {
  GatParams<T> inter, intra;   // rel_incremental shares one relation table
  GatParams<T> single;         // single-graph strategy
  Tensor<T> combine_w;         // 2d x d, parallel_concat only
  Tensor<T> combine_b;         // {1, d}
};

// Combines the two subgraph passes under one of the five interaction
// strategies; `incremental` (inter first, then intra) is the default.
template <typename T>
Tensor<T> interact(const Tensor<T>& z, const GraphTopology& inter, const GraphTopology& intra,
                   GraphStrategy strategy, const InteractParams<T>& p);

}  // namespace erc
