#include "erc/graph.hpp"

#include <algorithm>
#include <cstdlib>

namespace erc {

Mask GraphTopology::nodes_with_edges() const {
  Mask m(static_cast<std::size_t>(node_count), 0);
  for (const auto& e : edges) m[static_cast<std::size_t>(e.target)] = 1;
  return m;
}

namespace {

RelationType relation_of(int source, int target) {
  if (source == target) return RelationType::kSelf;
  return source < target ? RelationType::kForward : RelationType::kBackward;
}

}  // namespace

std::pair<GraphTopology, GraphTopology> build_subgraphs(std::span<const int> speakers, int k,
                                                        const Mask& mask) {
  if (k < 0) throw ConfigError("build_subgraphs: window must be >= 0");
  if (mask.size() != speakers.size()) {
    throw DimensionError("build_subgraphs: mask length must equal speaker count");
  }
  const int n = static_cast<int>(speakers.size());
  GraphTopology inter{{}, n, SubgraphKind::kInter};
  GraphTopology intra{{}, n, SubgraphKind::kIntra};
  for (int target = 0; target < n; ++target) {
    if (!mask[target]) continue;
    for (int source = 0; source < n; ++source) {
      if (!mask[source] || std::abs(target - source) > k) continue;
      GraphEdge e{source, target, relation_of(source, target)};
      if (speakers[source] == speakers[target]) {
        intra.edges.push_back(e);
      } else {
        inter.edges.push_back(e);
      }
    }
  }
  return {std::move(inter), std::move(intra)};
}

GraphTopology merge_subgraphs(const GraphTopology& inter, const GraphTopology& intra) {
  GraphTopology merged{{}, inter.node_count, SubgraphKind::kUnion};
  merged.edges.reserve(inter.edges.size() + intra.edges.size());
  merged.edges.insert(merged.edges.end(), inter.edges.begin(), inter.edges.end());
  merged.edges.insert(merged.edges.end(), intra.edges.begin(), intra.edges.end());
  std::sort(merged.edges.begin(), merged.edges.end(), [](const GraphEdge& a, const GraphEdge& b) {
    return a.target != b.target ? a.target < b.target : a.source < b.source;
  });
  return merged;
}

template <typename T>
Tensor<T> relation_embed(RelationType r, const Tensor<T>& table) {
  const int idx[] = {static_cast<int>(r)};
  return take_rows(table, idx);
}

template <typename T>
GatLayerOut<T> gat_layer(const Tensor<T>& z, const GraphTopology& topo,
                         const Tensor<T>& relation_table, const GatHeadParams<T>& head,
                         T leaky_slope, GatActivation act) {
  if (topo.node_count != z.rows()) {
    throw DimensionError("gat_layer: topology node count must match feature rows");
  }
  GatLayerOut<T> out;
  if (topo.edges.empty()) {
    out.out = z;  // every node isolated
    return out;
  }
  std::vector<int> sources, targets, rels;
  sources.reserve(topo.edges.size());
  for (const auto& e : topo.edges) {
    sources.push_back(e.source);
    targets.push_back(e.target);
    rels.push_back(static_cast<int>(e.rel));
  }

  auto wz = matmul(z, head.w);
  auto wz_tgt = take_rows(wz, targets);
  auto wz_src = take_rows(wz, sources);
  auto rel_rows = take_rows(relation_table, rels);
  auto edge_feat = concat_cols(concat_cols(wz_tgt, wz_src), rel_rows);
  auto scores = leaky_relu(matmul(edge_feat, head.attn), leaky_slope);
  out.alpha = segment_softmax(scores, targets, topo.node_count);
  auto agg = segment_weighted_rowsum(out.alpha, wz_src, targets, topo.node_count);
  auto activated = act == GatActivation::kElu ? elu(agg) : agg;
  out.out = where_rows(topo.nodes_with_edges(), activated, z);
  return out;
}

template <typename T>
Tensor<T> gat_pass(const Tensor<T>& z, const GraphTopology& topo, const GatParams<T>& p) {
  if (p.heads.empty()) throw ConfigError("gat_pass: at least one head required");
  Tensor<T> acc;
  for (const auto& head : p.heads) {
    auto layer = gat_layer(z, topo, p.relation_table, head, static_cast<T>(p.leaky_slope),
                           p.activation);
    acc = acc.defined() ? add(acc, layer.out) : layer.out;
  }
  return scale(acc, T(1) / static_cast<T>(p.heads.size()));
}

template <typename T>
Tensor<T> interact(const Tensor<T>& z, const GraphTopology& inter, const GraphTopology& intra,
                   GraphStrategy strategy, const InteractParams<T>& p) {
  if (inter.node_count != intra.node_count) {
    throw DimensionError("interact: subgraphs cover different node counts");
  }
  switch (strategy) {
    case GraphStrategy::kSingle:
      return gat_pass(z, merge_subgraphs(inter, intra), p.single);
    case GraphStrategy::kParallelSum:
      return add(gat_pass(z, inter, p.inter), gat_pass(z, intra, p.intra));
    case GraphStrategy::kParallelConcat:
      return add_rowvec(
          matmul(concat_cols(gat_pass(z, inter, p.inter), gat_pass(z, intra, p.intra)),
                 p.combine_w),
          p.combine_b);
    case GraphStrategy::kRelIncremental:
    case GraphStrategy::kIncremental:
      // rel_incremental differs only in construction: both subgraph
      // parameter sets point at one shared relation table.
      return gat_pass(gat_pass(z, inter, p.inter), intra, p.intra);
  }
  throw ConfigError("interact: unknown strategy");
}

#define ERC_INSTANTIATE(T)                                                               \
  template Tensor<T> relation_embed<T>(RelationType, const Tensor<T>&);                 \
  template GatLayerOut<T> gat_layer<T>(const Tensor<T>&, const GraphTopology&,          \
                                       const Tensor<T>&, const GatHeadParams<T>&, T,    \
                                       GatActivation);                                  \
  template Tensor<T> gat_pass<T>(const Tensor<T>&, const GraphTopology&,                \
                                 const GatParams<T>&);                                  \
  template Tensor<T> interact<T>(const Tensor<T>&, const GraphTopology&,                \
                                 const GraphTopology&, GraphStrategy,                   \
                                 const InteractParams<T>&);

ERC_INSTANTIATE(float)
ERC_INSTANTIATE(double)

#undef ERC_INSTANTIATE

}  // namespace erc
