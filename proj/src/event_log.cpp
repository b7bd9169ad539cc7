#include "ricsim/event_log.hpp"

#include <fstream>
#include <sstream>

#include "ricsim/error.hpp"

namespace ricsim {

std::string EventLog::str() const {
    std::string out;
    std::size_t n = 0;
    for (const auto& l : lines_) n += l.size() + 1;
    out.reserve(n);
    for (const auto& l : lines_) {
        out += l;
        out += '\n';
    }
    return out;
}

EventLog EventLog::parse(std::string_view text) {
    EventLog log;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        auto line = text.substr(pos, nl - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!line.empty()) log.append(std::string(line));
        pos = nl + 1;
    }
    return log;
}

EventLog EventLog::read(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

void EventLog::write(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out << str();
    if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

}  // namespace ricsim
