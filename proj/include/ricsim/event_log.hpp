#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ricsim {

/// Ordered JSON-lines record of a run. Each entry is one JSON object
/// without the trailing newline.
class EventLog {
public:
    void append(std::string line) { lines_.push_back(std::move(line)); }

    const std::vector<std::string>& lines() const noexcept { return lines_; }
    std::size_t size() const noexcept { return lines_.size(); }
    bool empty() const noexcept { return lines_.empty(); }

    /// Newline-terminated text, exactly as written to disk.
    std::string str() const;

    static EventLog parse(std::string_view text);
    static EventLog read(const std::filesystem::path& path);
    void write(const std::filesystem::path& path) const;

    bool operator==(const EventLog&) const = default;

private:
    std::vector<std::string> lines_;
};

}  // namespace ricsim
