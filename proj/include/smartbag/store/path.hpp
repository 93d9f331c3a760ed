#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace smartbag::store {

/// Slash-separated document address, e.g. bags/BAG1/latest. Segments are
/// non-empty and drawn from [A-Za-z0-9_-].
class StorePath {
 public:
  static std::optional<StorePath> parse(std::string_view text);
  /// REST form: leading slash and mandatory `.json` suffix, e.g. /bags/BAG1/latest.json.
  static std::optional<StorePath> from_rest(std::string_view url_path);

  const std::vector<std::string>& segments() const { return segments_; }
  const std::string& str() const { return text_; }
  const std::string& leaf() const { return segments_.back(); }
  std::optional<StorePath> parent() const;
  StorePath child(std::string_view segment) const;

  auto operator<=>(const StorePath& o) const { return text_ <=> o.text_; }
  bool operator==(const StorePath& o) const { return text_ == o.text_; }

 private:
  std::vector<std::string> segments_;
  std::string text_;
};

}  // namespace smartbag::store
