#include "rotvo/viewgraph.hpp"

#include <algorithm>
#include <queue>
#include <sstream>

#include "rotvo/error.hpp"
#include "text_io.hpp"

namespace rotvo {
namespace {

uint64_t EdgeKey(FrameId j, FrameId k) {
  return (static_cast<uint64_t>(j) << 32) ^ static_cast<uint64_t>(k);
}

std::string Id(FrameId id) { return std::to_string(id); }

}  // namespace

void ViewGraph::AddNode(FrameId id, const Rot3& init) {
  if (id < 0) Throw(ErrorCode::kInvalidArgument, "negative frame id " + Id(id));
  if (HasNode(id)) {
    Throw(ErrorCode::kInvalidArgument, "duplicate frame id " + Id(id));
  }
  if (!ids_.empty() && id < ids_.back()) {
    Throw(ErrorCode::kInvalidArgument,
          "frame id " + Id(id) + " inserted after " + Id(ids_.back()));
  }
  if (static_cast<size_t>(id) >= slots_.size()) {
    slots_.resize(std::max<size_t>(id + 1, slots_.size() * 2));
  }
  Slot& s = slots_[id];
  s.present = true;
  s.orientation = ids_.empty() ? Rot3::Identity() : init;
  ids_.push_back(id);
}

bool ViewGraph::HasNode(FrameId id) const {
  return id >= 0 && static_cast<size_t>(id) < slots_.size() &&
         slots_[id].present;
}

const ViewGraph::Slot& ViewGraph::SlotOf(FrameId id) const {
  if (!HasNode(id)) {
    Throw(ErrorCode::kInvalidArgument, "unknown frame id " + Id(id));
  }
  return slots_[id];
}

const Rot3& ViewGraph::Orientation(FrameId id) const {
  return SlotOf(id).orientation;
}

void ViewGraph::SetOrientation(FrameId id, const Rot3& r) {
  SlotOf(id);
  if (id == gauge_id()) {
    Throw(ErrorCode::kInvalidArgument,
          "the gauge node " + Id(id) + " is fixed at the identity");
  }
  slots_[id].orientation = r;
}

const std::vector<size_t>& ViewGraph::IncidentEdges(FrameId id) const {
  return SlotOf(id).incident;
}

bool ViewGraph::AddEdge(FrameId j, FrameId k, const Rot3& rotation,
                        int inlier_count, bool is_loop) {
  if (j >= k) {
    Throw(ErrorCode::kInvalidArgument,
          "edge (" + Id(j) + ", " + Id(k) + ") requires j < k");
  }
  if (!HasNode(j) || !HasNode(k)) {
    Throw(ErrorCode::kInvalidArgument,
          "edge (" + Id(j) + ", " + Id(k) + ") has a missing endpoint");
  }
  const uint64_t key = EdgeKey(j, k);
  if (auto it = edge_index_.find(key); it != edge_index_.end()) {
    Edge& e = edges_[it->second];
    if (inlier_count <= e.inlier_count) return false;
    e.rotation = rotation;
    e.inlier_count = inlier_count;
    e.is_loop = is_loop;
    return true;
  }
  const size_t index = edges_.size();
  edges_.push_back(Edge{j, k, rotation, inlier_count, is_loop});
  edge_index_.emplace(key, index);
  slots_[j].incident.push_back(index);
  slots_[k].incident.push_back(index);
  return true;
}

const Edge* ViewGraph::FindEdge(FrameId j, FrameId k) const {
  if (j < 0 || k < 0) return nullptr;
  const auto it = edge_index_.find(EdgeKey(j, k));
  return it == edge_index_.end() ? nullptr : &edges_[it->second];
}

bool ViewGraph::IsConnected() const {
  if (ids_.size() < 2) return true;
  std::vector<char> seen(slots_.size(), 0);
  std::queue<FrameId> todo;
  todo.push(ids_.front());
  seen[ids_.front()] = 1;
  size_t count = 1;
  while (!todo.empty()) {
    const FrameId v = todo.front();
    todo.pop();
    for (size_t e : slots_[v].incident) {
      const FrameId w = edges_[e].j == v ? edges_[e].k : edges_[e].j;
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        todo.push(w);
      }
    }
  }
  return count == ids_.size();
}

std::string ViewGraph::Dump() const {
  std::ostringstream out;
  for (FrameId id : ids_) {
    out << "NODE " << id << ' ' << FormatQuaternion(slots_[id].orientation)
        << '\n';
  }
  for (const Edge& e : edges_) {
    out << "EDGE " << e.j << ' ' << e.k << ' ' << FormatQuaternion(e.rotation)
        << ' ' << e.inlier_count << ' ' << (e.is_loop ? 1 : 0) << '\n';
  }
  return out.str();
}

ViewGraph ReadGraphDump(const std::string& path) {
  ViewGraph g;
  LineReader reader(path);
  while (reader.Next()) {
    const auto& t = reader.tokens();
    try {
      if (t[0] == "NODE") {
        if (t.size() != 6) reader.Fail("NODE expects 'id qw qx qy qz'");
        g.AddNode(reader.Integer(1),
                  Rot3::FromQuaternion(reader.Number(2), reader.Number(3),
                                       reader.Number(4), reader.Number(5)));
      } else if (t[0] == "EDGE") {
        if (t.size() != 9) {
          reader.Fail("EDGE expects 'j k qw qx qy qz inliers loop_flag'");
        }
        g.AddEdge(reader.Integer(1), reader.Integer(2),
                  Rot3::FromQuaternion(reader.Number(3), reader.Number(4),
                                       reader.Number(5), reader.Number(6)),
                  static_cast<int>(reader.Integer(7)), reader.Integer(8) != 0);
      } else {
        reader.Fail("unknown record '" + t[0] + "'");
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kFormat) throw;
      reader.Fail(e.what());
    }
  }
  return g;
}

LocalSubgraph ExtractLocalSubgraph(const ViewGraph& g, int window_size) {
  LocalSubgraph sub;
  if (g.empty() || window_size <= 0) return sub;
  const auto& ids = g.node_ids();
  const size_t w = std::min<size_t>(window_size, ids.size());
  sub.window.assign(ids.end() - w, ids.end());
  const FrameId first = sub.window.front();

  for (FrameId v : sub.window) {
    for (size_t e : g.IncidentEdges(v)) {
      sub.edges.push_back(e);
      const Edge& edge = g.edges()[e];
      const FrameId other = edge.j == v ? edge.k : edge.j;
      if (other < first) sub.anchors.push_back(other);
    }
  }
  std::sort(sub.edges.begin(), sub.edges.end());
  sub.edges.erase(std::unique(sub.edges.begin(), sub.edges.end()),
                  sub.edges.end());
  std::sort(sub.anchors.begin(), sub.anchors.end());
  sub.anchors.erase(std::unique(sub.anchors.begin(), sub.anchors.end()),
                    sub.anchors.end());
  if (sub.anchors.empty()) sub.pinned = first;
  return sub;
}

}  // namespace rotvo
