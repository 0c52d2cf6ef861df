#pragma once

#include <string>
#include <utility>
#include <vector>

#include "reuse/blocks.hpp"
#include "reuse/document_model.hpp"

namespace reuse::detail {

// Accumulates text into TextBlocks between math and image blocks.
class BlockBuilder {
 public:
  void text(std::string_view s) { buffer_ += s; }
  std::string& buffer() { return buffer_; }

  bool has_output() const { return !blocks_.empty() || !buffer_.empty(); }

  void math(std::string mathml, bool display) {
    flush();
    blocks_.emplace_back(MathBlock{std::move(mathml), display});
  }

  void image(ImageBlock image) {
    flush();
    blocks_.emplace_back(std::move(image));
  }

  void flush() {
    if (buffer_.empty()) return;
    blocks_.emplace_back(TextBlock{escape_placeholder_delimiters(buffer_)});
    buffer_.clear();
  }

  std::vector<Block> finish() {
    flush();
    if (blocks_.empty()) blocks_.emplace_back(TextBlock{});
    return std::move(blocks_);
  }

  std::vector<Block>& blocks() { return blocks_; }

 private:
  std::string buffer_;
  std::vector<Block> blocks_;
};

}  // namespace reuse::detail
