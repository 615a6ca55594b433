#pragma once

#include <filesystem>
#include <map>
#include <string>

namespace stratmap {

/// Plain-text prompt templates with {{name}} placeholder slots. One file per
/// template under the prompt directory; the template name is the file stem.
class PromptLibrary {
public:
    static PromptLibrary load(const std::filesystem::path& dir);

    /// Resolution order: $STRATMAP_PROMPTS_DIR, ./assets/prompts, then the
    /// source-tree assets directory baked in at build time.
    static std::filesystem::path default_dir();

    /// Substitute every {{slot}} in the template. Throws ConfigError when
    /// the template is unknown or a placeholder has no provided value.
    std::string render(const std::string& name,
                       const std::map<std::string, std::string>& slots) const;

    bool has(const std::string& name) const { return templates_.count(name) > 0; }
    const std::map<std::string, std::string>& templates() const { return templates_; }

private:
    std::map<std::string, std::string> templates_;
};

}  // namespace stratmap
