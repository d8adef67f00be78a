#pragma once

// Line-oriented reader for the whitespace-separated text formats. Blank lines
// and everything after '#' are skipped; errors carry "path:line:".

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace rotvo {

class LineReader {
 public:
  explicit LineReader(const std::string& path);

  // Advances to the next non-empty line. Returns false at end of file.
  bool Next();

  const std::vector<std::string>& tokens() const { return tokens_; }
  int line_number() const { return line_number_; }
  const std::string& path() const { return path_; }

  std::vector<double> Numbers() const;
  double Number(size_t i) const;
  int64_t Integer(size_t i) const;

  [[noreturn]] void Fail(const std::string& message) const;

 private:
  std::string path_;
  std::ifstream in_;
  std::vector<std::string> tokens_;
  int line_number_ = 0;
};

// Writes to a temporary sibling file and renames it over the destination.
void WriteFileAtomically(const std::string& path, const std::string& contents);

}  // namespace rotvo
