#include "hie/common.hpp"

#include <iostream>

namespace hie {

namespace {
void (*g_handler)(const std::string&) = nullptr;
}

void warn(const std::string& message) {
    if (g_handler) {
        g_handler(message);
        return;
    }
    std::cerr << "warning: " << message << '\n';
}

void set_warning_handler(void (*handler)(const std::string&)) { g_handler = handler; }

}  // namespace hie
