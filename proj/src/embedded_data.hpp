#pragma once

#include <optional>
#include <span>
#include <string_view>

namespace codegenlink::embedded {

/// A data file compiled into the library, addressed by its path under data/.
struct Resource {
    std::string_view name;
    std::string_view content;
};

std::span<const Resource> resources();

inline std::optional<std::string_view> find(std::string_view name) {
    for (const Resource& r : resources()) {
        if (r.name == name) return r.content;
    }
    return std::nullopt;
}

}  // namespace codegenlink::embedded
