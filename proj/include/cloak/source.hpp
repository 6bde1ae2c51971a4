#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cloak {

// Half-open byte range into a SourceBuffer.
struct Span {
    uint32_t begin = 0;
    uint32_t end = 0;

    static Span join(Span a, Span b) {
        return {a.begin < b.begin ? a.begin : b.begin, a.end > b.end ? a.end : b.end};
    }
};

struct LineCol {
    uint32_t line = 1;  // 1-based
    uint32_t col = 1;   // 1-based, counted in bytes
};

// Owns source text and resolves byte offsets to line/column.
class SourceBuffer {
public:
    SourceBuffer() = default;
    SourceBuffer(std::string path, std::string text);

    const std::string& path() const { return path_; }
    const std::string& text() const { return text_; }
    std::string_view slice(Span s) const;
    LineCol locate(uint32_t offset) const;

private:
    std::string path_ = "<memory>";
    std::string text_;
    std::vector<uint32_t> line_starts_;  // byte offset of each line start
};

}  // namespace cloak
