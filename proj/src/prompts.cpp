#include "stratmap/prompts.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "stratmap/errors.hpp"

#ifndef STRATMAP_SOURCE_DIR
#define STRATMAP_SOURCE_DIR "."
#endif

namespace stratmap {

PromptLibrary PromptLibrary::load(const std::filesystem::path& dir) {
    PromptLibrary library;
    if (!std::filesystem::is_directory(dir)) {
        throw IoFailure("prompt directory not found: " + dir.string());
    }
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".txt") {
            continue;
        }
        std::ifstream in(entry.path());
        if (!in) {
            throw IoFailure("cannot read prompt template: " + entry.path().string());
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        library.templates_[entry.path().stem().string()] = buf.str();
    }
    if (library.templates_.empty()) {
        throw IoFailure("no prompt templates in " + dir.string());
    }
    return library;
}

std::filesystem::path PromptLibrary::default_dir() {
    if (const char* env = std::getenv("STRATMAP_PROMPTS_DIR")) {
        return env;
    }
    const std::filesystem::path local = "assets/prompts";
    if (std::filesystem::is_directory(local)) {
        return local;
    }
    return std::filesystem::path(STRATMAP_SOURCE_DIR) / "assets" / "prompts";
}

std::string PromptLibrary::render(const std::string& name,
                                  const std::map<std::string, std::string>& slots) const {
    auto it = templates_.find(name);
    if (it == templates_.end()) {
        throw ConfigError("unknown prompt template: " + name);
    }
    const std::string& source = it->second;
    std::string out;
    out.reserve(source.size());
    std::size_t pos = 0;
    while (pos < source.size()) {
        const auto open = source.find("{{", pos);
        if (open == std::string::npos) {
            out.append(source, pos, std::string::npos);
            break;
        }
        const auto close = source.find("}}", open + 2);
        if (close == std::string::npos) {
            out.append(source, pos, std::string::npos);
            break;
        }
        out.append(source, pos, open - pos);
        const std::string slot = source.substr(open + 2, close - open - 2);
        auto value = slots.find(slot);
        if (value == slots.end()) {
            throw ConfigError("prompt '" + name + "': no value for placeholder {{" + slot + "}}");
        }
        out.append(value->second);
        pos = close + 2;
    }
    return out;
}

}  // namespace stratmap
