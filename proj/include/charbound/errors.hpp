#pragma once

#include <stdexcept>
#include <string>

namespace charbound {

/// A computed quantity broke one of the exact inequalities it is supposed to
/// satisfy. Signals a bug or a numerical breakdown, never bad input.
class SoundnessError : public std::runtime_error {
public:
    explicit SoundnessError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace charbound
