#include "smartbag/store/path.hpp"

#include <stdexcept>

namespace smartbag::store {
namespace {

bool valid_segment(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    const bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
                    c == '_' || c == '-';
    if (!ok) return false;
  }
  return true;
}

}  // namespace

std::optional<StorePath> StorePath::parse(std::string_view text) {
  StorePath p;
  std::size_t start = 0;
  while (true) {
    const auto slash = text.find('/', start);
    const auto seg = text.substr(start, slash == std::string_view::npos ? slash : slash - start);
    if (!valid_segment(seg)) return std::nullopt;
    p.segments_.emplace_back(seg);
    if (slash == std::string_view::npos) break;
    start = slash + 1;
  }
  p.text_ = std::string(text);
  return p;
}

std::optional<StorePath> StorePath::from_rest(std::string_view url_path) {
  constexpr std::string_view suffix = ".json";
  if (url_path.size() <= suffix.size() + 1 || url_path.front() != '/' ||
      url_path.substr(url_path.size() - suffix.size()) != suffix)
    return std::nullopt;
  return parse(url_path.substr(1, url_path.size() - 1 - suffix.size()));
}

std::optional<StorePath> StorePath::parent() const {
  if (segments_.size() < 2) return std::nullopt;
  return parse(std::string_view(text_).substr(0, text_.rfind('/')));
}

StorePath StorePath::child(std::string_view segment) const {
  auto p = parse(text_ + "/" + std::string(segment));
  if (!p) throw std::invalid_argument("store path: invalid segment");
  return *p;
}

}  // namespace smartbag::store
