#pragma once

#include <string>
#include <vector>

namespace stratmap {

enum class LessonCategory { penalty, navigation, mechanic };

const char* to_string(LessonCategory category);
bool lesson_category_from_string(const std::string& name, LessonCategory& out);

/// A reusable cross-episode lesson, injected into the agent's context at
/// every step.
struct Lesson {
    LessonCategory category = LessonCategory::mechanic;
    std::string text;
    int added_episode = 0;
};

/// FIFO-truncate a lesson buffer to the given capacity (oldest entries are
/// evicted first; the buffer is kept in insertion order).
void trim_lessons(std::vector<Lesson>& buffer, std::size_t capacity);

}  // namespace stratmap
