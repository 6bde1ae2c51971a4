#include "cloak/source.hpp"

#include <algorithm>
#include <sstream>

#include "cloak/diag.hpp"

namespace cloak {

SourceBuffer::SourceBuffer(std::string path, std::string text)
    : path_(std::move(path)), text_(std::move(text)) {
    line_starts_.push_back(0);
    for (uint32_t i = 0; i < text_.size(); ++i) {
        if (text_[i] == '\n') line_starts_.push_back(i + 1);
    }
}

std::string_view SourceBuffer::slice(Span s) const {
    if (s.begin > text_.size()) return {};
    uint32_t end = std::min<uint32_t>(s.end, static_cast<uint32_t>(text_.size()));
    return std::string_view(text_).substr(s.begin, end - s.begin);
}

LineCol SourceBuffer::locate(uint32_t offset) const {
    if (line_starts_.empty()) return {1, offset + 1};  // default-constructed: no line table
    auto it = std::upper_bound(line_starts_.begin(), line_starts_.end(), offset);
    uint32_t line = static_cast<uint32_t>(it - line_starts_.begin());  // >= 1
    uint32_t start = line_starts_[line - 1];
    return {line, offset - start + 1};
}

std::string render_diagnostic(const SourceBuffer& src, const Diagnostic& d) {
    LineCol lc = src.locate(d.span.begin);
    std::ostringstream os;
    os << src.path() << ':' << lc.line << ':' << lc.col << ": "
       << (d.severity == Severity::Error ? "error" : "warning") << '[' << d.code
       << "]: " << d.message;
    return os.str();
}

std::string render_diagnostics(const SourceBuffer& src, const std::vector<Diagnostic>& ds) {
    std::string out;
    for (const auto& d : ds) {
        out += render_diagnostic(src, d);
        out += '\n';
    }
    return out;
}

}  // namespace cloak
