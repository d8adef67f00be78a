#include "rotvo/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "rotvo/error.hpp"
#include "text_io.hpp"

namespace rotvo {
namespace {

constexpr double kUnitTol = 1e-6;

std::string JoinPath(const std::string& dir, const char* name) {
  return (std::filesystem::path(dir) / name).string();
}

BearingVec CheckedBearing(const LineReader& r, double x, double y, double z) {
  const Vec3 f(x, y, z);
  if (std::abs(f.norm() - 1.0) > kUnitTol) r.Fail("bearing is not unit length");
  if (!(z > 0.0)) r.Fail("bearing must have z > 0");
  return f.normalized();
}

// Parses correspondence rows until the next header line; returns false at
// end of file.
enum class RowKind { kPixel, kBearing, kEither };

bool ReadRows(LineReader& r, RowKind kind, const std::optional<Intrinsics>& k,
              CorrSet* out) {
  while (r.Next()) {
    const std::string& head = r.tokens()[0];
    if (head == "PAIR" || head == "BPAIR" || head == "LOOP" ||
        head == "FRAMES") {
      return true;
    }
    const std::vector<double> v = r.Numbers();
    const bool pixels = kind == RowKind::kPixel ||
                        (kind == RowKind::kEither && v.size() == 4);
    if (pixels) {
      if (v.size() != 4) r.Fail("expected 4 values \"u v u' v'\"");
      if (!k) r.Fail("pixel correspondences need intrinsics.txt");
      out->push_back({PixelToBearing(v[0], v[1], *k),
                      PixelToBearing(v[2], v[3], *k)});
    } else {
      if (v.size() != 6) r.Fail("expected 6 bearing components");
      out->push_back({CheckedBearing(r, v[0], v[1], v[2]),
                      CheckedBearing(r, v[3], v[4], v[5])});
    }
  }
  return false;
}

std::pair<FrameId, FrameId> ReadPairHeader(const LineReader& r) {
  if (r.tokens().size() != 3) r.Fail("expected '" + r.tokens()[0] + " j k'");
  const FrameId j = r.Integer(1);
  const FrameId k = r.Integer(2);
  if (j < 0 || j >= k) r.Fail("pair requires 0 <= j < k");
  return {j, k};
}

void FormatRows(const CorrSet& c, std::string* out) {
  char buf[512];
  for (const auto& p : c) {
    std::snprintf(buf, sizeof(buf),
                  "%.17g %.17g %.17g %.17g %.17g %.17g\n", p.f.x(), p.f.y(),
                  p.f.z(), p.f_prime.x(), p.f_prime.y(), p.f_prime.z());
    *out += buf;
  }
}

}  // namespace

Dataset ReadDataset(const std::string& dir) {
  if (!std::filesystem::is_directory(dir)) {
    Throw(ErrorCode::kIo, dir + ": not a directory");
  }
  std::optional<Intrinsics> k;
  const std::string intr = JoinPath(dir, "intrinsics.txt");
  if (std::filesystem::exists(intr)) k = ReadIntrinsics(intr);

  Dataset d;
  FrameId max_id = -1;
  std::optional<FrameId> declared;

  LineReader m(JoinPath(dir, "matches.txt"));
  bool more = m.Next();
  while (more) {
    const std::string& head = m.tokens()[0];
    if (head == "FRAMES") {
      if (declared) m.Fail("duplicate FRAMES line");
      if (m.tokens().size() != 2) m.Fail("expected 'FRAMES n'");
      declared = m.Integer(1);
      if (*declared < 0) m.Fail("frame count must be >= 0");
      more = m.Next();
      continue;
    }
    if (head != "PAIR" && head != "BPAIR") {
      m.Fail("expected PAIR or BPAIR header, got '" + head + "'");
    }
    const auto key = ReadPairHeader(m);
    const RowKind kind = head == "PAIR" ? RowKind::kPixel : RowKind::kBearing;
    const int header_line = m.line_number();
    auto [it, fresh] = d.pairs.try_emplace(key);
    if (!fresh) m.Fail("duplicate pair block");
    max_id = std::max(max_id, key.second);
    more = ReadRows(m, kind, k, &it->second);
    if (it->second.empty()) {
      Throw(ErrorCode::kFormat, m.path() + ":" + std::to_string(header_line) +
                                    ": pair block without rows");
    }
  }

  const std::string loops = JoinPath(dir, "loops.txt");
  if (std::filesystem::exists(loops)) {
    LineReader l(loops);
    more = l.Next();
    while (more) {
      if (l.tokens()[0] != "LOOP") l.Fail("expected 'LOOP j k' header");
      const auto [j, kk] = ReadPairHeader(l);
      LoopCandidate cand{j, kk, {}};
      max_id = std::max(max_id, kk);
      more = ReadRows(l, RowKind::kEither, k, &cand.corr);
      d.loops[kk].push_back(std::move(cand));
    }
  }

  if (declared) {
    if (max_id >= *declared) {
      Throw(ErrorCode::kFormat, m.path() + ": frame id " +
                                    std::to_string(max_id) +
                                    " exceeds the FRAMES count");
    }
    d.num_frames = *declared;
  } else {
    d.num_frames = max_id + 1;
  }
  return d;
}

void WriteDataset(const std::string& dir, const Dataset& d) {
  std::string out = "FRAMES " + std::to_string(d.num_frames) + "\n";
  for (const auto& [key, corr] : d.pairs) {
    out += "BPAIR " + std::to_string(key.first) + " " +
           std::to_string(key.second) + "\n";
    FormatRows(corr, &out);
  }
  WriteFileAtomically(JoinPath(dir, "matches.txt"), out);
  if (d.loops.empty()) return;
  std::string lo;
  for (const auto& [k, cands] : d.loops) {
    for (const auto& c : cands) {
      lo += "LOOP " + std::to_string(c.j) + " " + std::to_string(c.k) + "\n";
      FormatRows(c.corr, &lo);
    }
  }
  WriteFileAtomically(JoinPath(dir, "loops.txt"), lo);
}

}  // namespace rotvo
