#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "rotvo/so3.hpp"

namespace rotvo {

using FrameId = int64_t;

// Relative orientation between frames j < k in the composition convention
// R_k = R_j * rotation (camera-to-world absolute orientations).
struct Edge {
  FrameId j = 0;
  FrameId k = 0;
  Rot3 rotation;
  int inlier_count = 0;
  bool is_loop = false;
};

// Frames with absolute orientations and the validated relative orientations
// between them. The first node inserted carries the gauge and stays at the
// identity. Node ids must be inserted in increasing order. Lookups are O(1)
// so windowed operations do not depend on the graph size.
class ViewGraph {
 public:
  // Throws kInvalidArgument on a negative, duplicate or out-of-order id.
  void AddNode(FrameId id, const Rot3& init);
  // Inserts edge (j, k). An existing (j, k) edge is replaced only when the
  // new inlier count is higher; returns whether the graph changed. Throws
  // kInvalidArgument on j >= k or a missing endpoint.
  bool AddEdge(FrameId j, FrameId k, const Rot3& rotation, int inlier_count,
               bool is_loop);

  bool HasNode(FrameId id) const;
  const Rot3& Orientation(FrameId id) const;
  // Throws kInvalidArgument for the gauge node or a missing node.
  void SetOrientation(FrameId id, const Rot3& r);

  const Edge* FindEdge(FrameId j, FrameId k) const;

  bool empty() const { return ids_.empty(); }
  size_t num_nodes() const { return ids_.size(); }
  size_t num_edges() const { return edges_.size(); }
  FrameId gauge_id() const { return ids_.front(); }
  // Ascending, i.e. insertion order.
  const std::vector<FrameId>& node_ids() const { return ids_; }
  const std::vector<Edge>& edges() const { return edges_; }
  // Indices into edges() of the edges touching `id`.
  const std::vector<size_t>& IncidentEdges(FrameId id) const;

  bool IsConnected() const;

  // "NODE id qw qx qy qz" and "EDGE j k qw qx qy qz inliers loop_flag" lines.
  std::string Dump() const;

 private:
  struct Slot {
    bool present = false;
    Rot3 orientation;
    std::vector<size_t> incident;
  };
  const Slot& SlotOf(FrameId id) const;

  std::vector<FrameId> ids_;
  std::vector<Slot> slots_;
  std::vector<Edge> edges_;
  std::unordered_map<uint64_t, size_t> edge_index_;
};

// Parses the Dump() format. Nodes must precede the edges that use them.
ViewGraph ReadGraphDump(const std::string& path);

// The optimization window over the newest orientations plus its frozen
// neighbourhood.
struct LocalSubgraph {
  std::vector<FrameId> window;   // ascending
  std::vector<FrameId> anchors;  // ascending, disjoint from window
  std::vector<size_t> edges;     // indices into ViewGraph::edges(), ascending
  // Cold start (no anchors): the earliest window node is held fixed.
  std::optional<FrameId> pinned;
};

LocalSubgraph ExtractLocalSubgraph(const ViewGraph& g, int window_size);

}  // namespace rotvo
