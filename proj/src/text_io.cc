#include "text_io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "rotvo/error.hpp"

namespace rotvo {

LineReader::LineReader(const std::string& path) : path_(path), in_(path) {
  if (!in_) {
    Throw(ErrorCode::kIo, path + ": cannot open for reading");
  }
}

bool LineReader::Next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_number_;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    tokens_.clear();
    std::string tok;
    while (ss >> tok) tokens_.push_back(tok);
    if (!tokens_.empty()) return true;
  }
  tokens_.clear();
  return false;
}

double LineReader::Number(size_t i) const {
  if (i >= tokens_.size()) Fail("missing value");
  const std::string& tok = tokens_[i];
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0' || errno == ERANGE ||
      !std::isfinite(v)) {
    Fail("invalid number '" + tok + "'");
  }
  return v;
}

int64_t LineReader::Integer(size_t i) const {
  if (i >= tokens_.size()) Fail("missing value");
  const std::string& tok = tokens_[i];
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(tok.c_str(), &end, 10);
  if (end == tok.c_str() || *end != '\0' || errno == ERANGE) {
    Fail("invalid integer '" + tok + "'");
  }
  return v;
}

std::vector<double> LineReader::Numbers() const {
  std::vector<double> out;
  out.reserve(tokens_.size());
  for (size_t i = 0; i < tokens_.size(); ++i) out.push_back(Number(i));
  return out;
}

void LineReader::Fail(const std::string& message) const {
  Throw(ErrorCode::kFormat,
        path_ + ":" + std::to_string(line_number_) + ": " + message);
}

void WriteFileAtomically(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) Throw(ErrorCode::kIo, tmp + ": cannot open for writing");
    out << contents;
    out.flush();
    if (!out) Throw(ErrorCode::kIo, tmp + ": write failed");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    Throw(ErrorCode::kIo, path + ": cannot rename temporary file into place");
  }
}

}  // namespace rotvo
