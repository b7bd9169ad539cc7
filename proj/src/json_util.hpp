#pragma once

// Internal helpers for reading nlohmann::json with field-path diagnostics.

#include <cmath>
#include <cstdint>
#include <string>

#include <json.hpp>

#include "ricsim/error.hpp"
#include "ricsim/types.hpp"

namespace ricsim::detail {

using json = nlohmann::json;

class Reader {
public:
    Reader(const json& node, std::string path, ErrorCode code) : node_(node), path_(std::move(path)), code_(code) {}

    const json& node() const noexcept { return node_; }
    const std::string& path() const noexcept { return path_; }

    [[noreturn]] void fail(const std::string& field, const std::string& what) const {
        throw Error(code_, path_ + "/" + field + ": " + what);
    }

    bool has(const char* field) const { return node_.is_object() && node_.contains(field); }

    const json& at(const char* field) const {
        if (!node_.is_object()) throw Error(code_, (path_.empty() ? "/" : path_) + ": expected object");
        auto it = node_.find(field);
        if (it == node_.end()) fail(field, "missing");
        return *it;
    }

    Reader child(const char* field) const { return Reader(at(field), path_ + "/" + field, code_); }
    Reader element(const json& j, std::size_t i, const char* field) const {
        return Reader(j, path_ + "/" + field + "/" + std::to_string(i), code_);
    }

    std::int64_t integer(const char* field) const {
        const json& v = at(field);
        if (!v.is_number_integer()) fail(field, "expected integer");
        return v.get<std::int64_t>();
    }

    double number(const char* field) const {
        const json& v = at(field);
        if (!v.is_number()) fail(field, "expected number");
        double d = v.get<double>();
        if (!std::isfinite(d)) fail(field, "expected finite number");
        return d;
    }

    bool boolean(const char* field) const {
        const json& v = at(field);
        if (!v.is_boolean()) fail(field, "expected boolean");
        return v.get<bool>();
    }

    std::string string(const char* field) const {
        const json& v = at(field);
        if (!v.is_string()) fail(field, "expected string");
        return v.get<std::string>();
    }

    const json& array(const char* field) const {
        const json& v = at(field);
        if (!v.is_array()) fail(field, "expected array");
        return v;
    }

    CellId cell(const char* field) const { return cell_from(at(field), field); }

    CellId cell_from(const json& v, const std::string& field) const {
        if (!v.is_array() || v.size() != 3) fail(field, "expected [site, sector, band]");
        for (const auto& e : v)
            if (!e.is_number_integer()) fail(field, "expected integer triple");
        CellId id{v[0].get<int>(), v[1].get<int>(), v[2].get<int>()};
        if (id.site < 0 || id.sector < 0 || id.band < 0) fail(field, "negative index");
        return id;
    }

private:
    const json& node_;
    std::string path_;
    ErrorCode code_;
};

inline json cell_json(const CellId& id) { return json::array({id.site, id.sector, id.band}); }

inline json parse_or_throw(std::string_view text, ErrorCode code, const std::string& what) {
    json j = json::parse(text.begin(), text.end(), nullptr, false);
    if (j.is_discarded()) throw Error(code, what + ": malformed JSON");
    return j;
}

}  // namespace ricsim::detail
