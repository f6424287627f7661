#include "chainrisk/rng.hpp"

#include <stdexcept>
#include <string>

namespace chainrisk {

double ScriptedSource::next_uniform() {
    if (pos_ >= values_.size()) {
        throw std::out_of_range("scripted uniform source exhausted after " +
                                std::to_string(values_.size()) + " draws");
    }
    return values_[pos_++];
}

}  // namespace chainrisk
