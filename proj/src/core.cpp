#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

#include "coorbit/error.hpp"
#include "coorbit/parallel.hpp"

namespace coorbit {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidPoint: return "invalid-point";
        case ErrorCode::InvalidInput: return "invalid-input";
        case ErrorCode::EmptyFamily: return "empty-family";
        case ErrorCode::OutOfRange: return "out-of-range";
        case ErrorCode::UnsupportedDimension: return "unsupported-dimension";
        case ErrorCode::Unsupported: return "unsupported";
        case ErrorCode::NotAFrame: return "not-a-frame";
        case ErrorCode::IllConditioned: return "ill-conditioned";
        case ErrorCode::MissingDual: return "missing-dual";
        case ErrorCode::InfiniteEnvelope: return "infinite-envelope";
        case ErrorCode::HypothesisViolation: return "hypothesis-violation";
        case ErrorCode::Resolution: return "resolution";
        case ErrorCode::Config: return "config";
    }
    return "error";
}

namespace {
std::atomic<unsigned> g_threads{0};
}

void set_thread_count(unsigned n) { g_threads = n; }

unsigned thread_count() {
    unsigned n = g_threads.load();
    if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
    return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_count(), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    auto run = [&] {
        try {
            for (std::size_t i = next++; i < n && !failed; i = next++) body(i);
        } catch (...) {
            if (!failed.exchange(true)) error = std::current_exception();
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace coorbit
