#include "casimir/diagnostics.hpp"

#include <iostream>
#include <mutex>

namespace casimir::diagnostics {

namespace {
std::mutex handler_mutex;
WarningHandler& handler() {
    static WarningHandler h = [](const std::string& m) { std::cerr << "warning: " << m << '\n'; };
    return h;
}
}  // namespace

WarningHandler set_warning_handler(WarningHandler h) {
    std::lock_guard lock(handler_mutex);
    WarningHandler previous = std::move(handler());
    handler() = std::move(h);
    return previous;
}

void warn(const std::string& message) {
    std::lock_guard lock(handler_mutex);
    if (handler()) handler()(message);
}

}  // namespace casimir::diagnostics
